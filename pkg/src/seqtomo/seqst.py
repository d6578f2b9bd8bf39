"""Selective state tomography via an ancilla-controlled preparation circuit.

Any matrix element alpha_ab = <psi_a|rho|psi_b> of a state, written in a
basis {|psi_a> = V_a|psi_0>} of unitarily prepared states, can be read off
one ancilla qubit:

    ancilla in (|0> + |1>)/sqrt(2);
    V_b† applied to the system controlled on ancilla |0>,
    V_a† controlled on ancilla |1>;
    then Re(alpha_ab) = Tr(rho_F |psi_0><psi_0| ⊗ X) and
         Im(alpha_ab) = Tr(rho_F |psi_0><psi_0| ⊗ Y)

for the joint state rho_F before measurement. The control polarity is pinned
by that postcondition under the Y = [[0,-i],[i,0]] convention: swapping the
two controlled operators yields the complex conjugate instead.

A single run has three outcomes: +1 (system found in |psi_0>, ancilla in the
+1 eigenstate of the measured axis), -1 (system in |psi_0>, ancilla in the
-1 eigenstate), or 0 (system elsewhere). Averaging M such outcomes per axis
estimates the real and imaginary parts with Chernoff-bounded shot counts
that do not grow with the system size.

The conventional Pauli-expectation route (standard_pauli_qst) is included
as a baseline: rho = (1/D) sum_i Tr(rho P_i) P_i.
"""

import enum
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import DensityMatrix, Operator, PureState, haar_random_unitary, unitarity_residual
from .errors import DimensionMismatch, IndexOutOfRange
from .estimation import RandomStream, ShotPlan, sample_categorical_partitioned
from .pauli import PauliLabel, pauli_basis

_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_S = np.array([[1, 0], [0, 1j]], dtype=complex)

# +1/-1 eigenvectors of X and Y for the ancilla readout.
_AXIS_EIGENVECTORS = {
    "X": (np.array([1, 1], dtype=complex) / np.sqrt(2), np.array([1, -1], dtype=complex) / np.sqrt(2)),
    "Y": (np.array([1, 1j], dtype=complex) / np.sqrt(2), np.array([1, -1j], dtype=complex) / np.sqrt(2)),
}


class SeqstOutcome(enum.IntEnum):
    """The three results of a single run."""

    PLUS = 1
    MINUS = -1
    NULL = 0


# Tally vectors are ordered (PLUS, MINUS, NULL).
OUTCOME_ORDER = (SeqstOutcome.PLUS, SeqstOutcome.MINUS, SeqstOutcome.NULL)


class PreparationBasis:
    """A basis {V_a |psi_0>} of states prepared from a fiducial state.

    ``preparator_fn`` maps an index a in [0, 2**n) to the unitary matrix V_a.
    Matrices are generated lazily and cached.
    """

    def __init__(self, n: int, fiducial: PureState, preparator_fn: Callable[[int], np.ndarray], name: str = "custom"):
        if fiducial.dim != 2**n:
            raise DimensionMismatch(f"fiducial dim {fiducial.dim} != 2**{n}")
        self.n = n
        self.fiducial = fiducial
        self.name = name
        self._fn = preparator_fn
        self._cache: dict = {}

    @property
    def dim(self) -> int:
        return 2**self.n

    def preparator_matrix(self, a: int) -> np.ndarray:
        if not 0 <= a < self.dim:
            raise IndexOutOfRange(f"basis index {a} outside [0, {self.dim})")
        if a not in self._cache:
            m = np.array(np.asarray(self._fn(a), dtype=complex))
            m.setflags(write=False)
            self._cache[a] = m
        return self._cache[a]

    def preparator(self, a: int) -> Operator:
        return Operator(self.preparator_matrix(a))

    def element(self, a: int) -> PureState:
        """The basis state V_a |psi_0>."""
        return PureState(self.preparator_matrix(a) @ self.fiducial.amplitudes)

    def residuals(self) -> tuple:
        """(max unitarity residual of the V_a, max Gram deviation of the basis)."""
        vecs = np.stack([self.element(a).amplitudes for a in range(self.dim)])
        gram = vecs.conj() @ vecs.T
        gram_res = float(np.max(np.abs(gram - np.eye(self.dim))))
        unit_res = max(unitarity_residual(self.preparator_matrix(a)) for a in range(self.dim))
        return unit_res, gram_res

    @classmethod
    def computational(cls, n: int) -> "PreparationBasis":
        """V_a = bit flips on the set bits of a; fiducial |0...0>."""

        def prep(a: int) -> np.ndarray:
            mats = [_X if (a >> (n - 1 - q)) & 1 else np.eye(2, dtype=complex) for q in range(n)]
            out = mats[0]
            for m in mats[1:]:
                out = np.kron(out, m)
            return out

        fid = np.zeros(2**n, dtype=complex)
        fid[0] = 1.0
        return cls(n, PureState(fid), prep, name="computational")

    @classmethod
    def pauli_eigenbasis(cls, n: int, axis: str) -> "PreparationBasis":
        """Per-qubit eigenbases of X, Y or Z (Z is the computational basis)."""
        axis = axis.upper()
        rot = {"X": _H, "Y": _S @ _H, "Z": np.eye(2, dtype=complex)}.get(axis)
        if rot is None:
            raise ValueError(f"axis must be X, Y or Z, got {axis!r}")

        def prep(a: int) -> np.ndarray:
            out = np.array([[1.0]], dtype=complex)
            for q in range(n):
                flip = _X if (a >> (n - 1 - q)) & 1 else np.eye(2, dtype=complex)
                out = np.kron(out, rot @ flip)
            return out

        fid = np.zeros(2**n, dtype=complex)
        fid[0] = 1.0
        return cls(n, PureState(fid), prep, name=f"pauli-{axis}")

    @classmethod
    def random_unitary_columns(cls, n: int, rng: np.random.Generator) -> "PreparationBasis":
        """Basis states are the columns of one Haar-random unitary."""
        u = haar_random_unitary(2**n, rng).matrix
        comp = cls.computational(n)

        def prep(a: int) -> np.ndarray:
            return u @ comp.preparator_matrix(a) @ u.conj().T

        return cls(n, PureState(u[:, 0]), prep, name="random-unitary")


@dataclass(frozen=True)
class EstimateReport:
    """A sampled estimate of one coefficient with shot tallies and error bars.

    ``tallies_x`` / ``tallies_y`` count (+1, -1, 0) outcomes over m_shots
    runs per axis; standard errors are sqrt(var/m) of the outcome values.
    """

    a: int
    b: int
    estimate: complex
    se_re: float
    se_im: float
    m_shots: int
    tallies_x: tuple
    tallies_y: tuple
    seed: int

    def to_json(self) -> dict:
        return {
            "a": self.a,
            "b": self.b,
            "re": self.estimate.real,
            "im": self.estimate.imag,
            "se_re": self.se_re,
            "se_im": self.se_im,
            "m_shots": self.m_shots,
            "tallies": {"x": list(self.tallies_x), "y": list(self.tallies_y)},
            "seed": self.seed,
        }


def _controlled_preparation(rho: DensityMatrix, basis: PreparationBasis, a: int, b: int) -> np.ndarray:
    """The joint system+ancilla state after the controlled V† stage."""
    if rho.dim != basis.dim:
        raise DimensionMismatch(f"state dim {rho.dim} != basis dim {basis.dim}")
    va = basis.preparator_matrix(a)
    vb = basis.preparator_matrix(b)
    plus = np.full((2, 2), 0.5, dtype=complex)
    p0 = np.diag([1.0, 0.0]).astype(complex)
    p1 = np.diag([0.0, 1.0]).astype(complex)
    # b's preparator on ancilla |0>, a's on ancilla |1> (see module docstring).
    u = np.kron(vb.conj().T, p0) + np.kron(va.conj().T, p1)
    joint = np.kron(rho.matrix, plus)
    return u @ joint @ u.conj().T


def seqst_joint_state(rho: DensityMatrix, basis: PreparationBasis, a: int, b: int) -> DensityMatrix:
    """The pre-measurement joint state rho_F on n system qubits plus the ancilla."""
    return DensityMatrix(_controlled_preparation(rho, basis, a, b))


def seqst_exact(rho: DensityMatrix, basis: PreparationBasis, a: int, b: int) -> complex:
    """The coefficient <psi_a|rho|psi_b> read exactly off the circuit state.

    Returns Tr(rho_F P_0 ⊗ X) + i Tr(rho_F P_0 ⊗ Y) with P_0 the fiducial
    projector; equals the direct inner product to numerical precision.
    """
    rho_f = _controlled_preparation(rho, basis, a, b)
    fid = basis.fiducial.amplitudes
    p0 = np.outer(fid, fid.conj())
    x = np.einsum("ij,ji->", rho_f, np.kron(p0, _X))
    y = np.einsum("ij,ji->", rho_f, np.kron(p0, _Y))
    return complex(x.real, y.real)


def seqst_outcome_distribution(rho: DensityMatrix, basis: PreparationBasis, a: int, b: int, axis: str) -> tuple:
    """Probabilities (p_plus, p_minus, p_zero) of the three run outcomes.

    p_plus - p_minus equals Re(alpha_ab) for axis "X" and Im(alpha_ab) for
    axis "Y".
    """
    if axis not in _AXIS_EIGENVECTORS:
        raise ValueError(f"axis must be 'X' or 'Y', got {axis!r}")
    rho_f = _controlled_preparation(rho, basis, a, b)
    fid = basis.fiducial.amplitudes
    p0 = np.outer(fid, fid.conj())
    splus, sminus = _AXIS_EIGENVECTORS[axis]
    p_plus = float(np.einsum("ij,ji->", rho_f, np.kron(p0, np.outer(splus, splus.conj()))).real)
    p_minus = float(np.einsum("ij,ji->", rho_f, np.kron(p0, np.outer(sminus, sminus.conj()))).real)
    p_plus = min(max(p_plus, 0.0), 1.0)
    p_minus = min(max(p_minus, 0.0), 1.0)
    return p_plus, p_minus, max(1.0 - p_plus - p_minus, 0.0)


def _tally_stats(tallies: np.ndarray, m: int) -> tuple:
    """Mean and standard error of (+1, -1, 0)-valued outcomes from tallies."""
    mean = (tallies[0] - tallies[1]) / m
    var = (tallies[0] + tallies[1]) / m - mean**2
    return float(mean), float(np.sqrt(max(var, 0.0) / m))


def seqst_sample(
    rho: DensityMatrix,
    basis: PreparationBasis,
    a: int,
    b: int,
    plan: ShotPlan,
    stream: RandomStream,
    workers: int = 1,
) -> EstimateReport:
    """Estimate alpha_ab from plan.m sampled runs per measurement axis.

    Deterministic for a given stream; shot draws may be partitioned across
    `workers` derived substreams.
    """
    dist_x = seqst_outcome_distribution(rho, basis, a, b, "X")
    dist_y = seqst_outcome_distribution(rho, basis, a, b, "Y")
    tx = sample_categorical_partitioned(dist_x, plan.m, stream.substream(0), workers)
    ty = sample_categorical_partitioned(dist_y, plan.m, stream.substream(1), workers)
    mean_x, se_x = _tally_stats(tx, plan.m)
    mean_y, se_y = _tally_stats(ty, plan.m)
    return EstimateReport(
        a=a,
        b=b,
        estimate=complex(mean_x, mean_y),
        se_re=se_x,
        se_im=se_y,
        m_shots=plan.m,
        tallies_x=tuple(int(t) for t in tx),
        tallies_y=tuple(int(t) for t in ty),
        seed=stream.seed,
    )


def standard_pauli_qst(rho: DensityMatrix) -> list:
    """All Pauli expectations Tr(rho P_i); the conventional tomography data.

    The state is recovered as rho = (1/D) sum_i Tr(rho P_i) P_i.
    """
    n = int(np.log2(rho.dim))
    if 2**n != rho.dim:
        raise DimensionMismatch(f"dimension {rho.dim} is not a power of two")
    basis = pauli_basis(n)
    out = []
    for i, p in enumerate(basis):
        val = float(np.einsum("ij,ji->", rho.matrix, p).real)
        out.append((PauliLabel.from_index(n, i), val))
    return out
