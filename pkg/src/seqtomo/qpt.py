"""Process tomography protocols built on the channel and selective-QST layers.

Everything revolves around the channel-state duality: the state
rho_E = (E ⊗ I)|I><I| of two n-qubit registers determines the channel E,
and the process matrix over the Pauli basis is exactly the matrix of rho_E
in the orthonormal basis {(P_k ⊗ I)|I>}:

    chi_mn = <r_m| rho_E |r_n>.

Four routes to chi coefficients are implemented, each checkable against the
direct Kraus-to-chi conversion:

- aapt_full_chi: full state tomography of rho_E, as an exact matrix-element
  computation (dense, size-limited).
- dcqd_diagonal: the diagonal chi_kk as outcome probabilities of a
  measurement in the {(P_k ⊗ I)|I>} basis.
- seqst_qpt_*: the selective circuit from ``seqst`` run on rho_E with that
  basis, giving any single chi_ab exactly or by shot sampling.
- seqpt_*: an ancilla-controlled Pauli pair around the channel with the
  system state averaged over the Haar measure; the averages obey
      avg_x = (D Re(chi_ab) + delta_ab) / (D + 1),
      avg_y =  D Im(chi_ab) / (D + 1),
  inverted to recover chi_ab. ``seqpt_exact_average`` evaluates the Haar
  integral in closed form through the two-copy identity
  ∫ |psi><psi|⊗|psi><psi| dpsi = (I + SWAP) / (D(D+1)).
"""

from dataclasses import dataclass

import numpy as np

from .core import PureState, haar_random_state, maximally_entangled_state
from .channels import ChiMatrix, KrausChannel, choi_state
from .errors import DimensionMismatch, IndexOutOfRange, SizeLimitExceeded
from .estimation import RandomStream, ShotPlan, sample_categorical_partitioned
from .pauli import PauliLabel, pauli_basis
from .seqst import (
    _AXIS_EIGENVECTORS,
    EstimateReport,
    PreparationBasis,
    _tally_stats,
    seqst_exact,
    seqst_sample,
)

# Dense-simulation ceilings: full-matrix protocols hold a 4**n × 4**n chi;
# selective ones simulate 2n+1 qubits.
AAPT_MAX_QUBITS = 2
SELECTIVE_MAX_QUBITS = 3

_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)


@dataclass(frozen=True)
class ChiEstimate:
    """A sampled estimate of one process-matrix coefficient."""

    a: int
    b: int
    n: int
    value: complex
    se_re: float
    se_im: float
    protocol: str
    shots: int
    seed: int

    def to_json(self) -> dict:
        return {
            "protocol": self.protocol,
            "a": str(PauliLabel.from_index(self.n, self.a)),
            "b": str(PauliLabel.from_index(self.n, self.b)),
            "re": self.value.real,
            "im": self.value.imag,
            "se_re": self.se_re,
            "se_im": self.se_im,
            "shots": self.shots,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class GateCounts:
    single_qubit: int
    two_qubit: int


def choi_basis(n: int) -> PreparationBasis:
    """The preparation basis {(P_k ⊗ I)|I>} on two n-qubit registers."""
    d = 2**n
    basis = pauli_basis(n)
    eye = np.eye(d, dtype=complex)
    fid = maximally_entangled_state(n)
    return PreparationBasis(2 * n, fid, lambda k: np.kron(basis[k], eye), name="choi-pauli")


def choi_basis_state(n: int, k: int) -> PureState:
    """Element k of the basis: (P_k ⊗ I) applied to the maximally entangled state."""
    if not 0 <= k < 4**n:
        raise IndexOutOfRange(f"index {k} outside [0, {4**n})")
    return choi_basis(n).element(k)


def _check_pauli_indices(n: int, *indices) -> None:
    for idx in indices:
        if not 0 <= idx < 4**n:
            raise IndexOutOfRange(f"Pauli index {idx} outside [0, {4**n}) for n={n}")


def aapt_full_chi(ch: KrausChannel, max_qubits: int = AAPT_MAX_QUBITS) -> ChiMatrix:
    """The full process matrix as exact matrix elements of the dual state.

    Builds rho_E once and projects it onto the {(P_k ⊗ I)|I>} basis; agrees
    with kraus_to_chi entrywise.
    """
    if ch.n > max_qubits:
        raise SizeLimitExceeded(f"full chi for n={ch.n} exceeds the limit of {max_qubits} qubits")
    rho_e = choi_state(ch).matrix
    cb = choi_basis(ch.n)
    vecs = np.stack([cb.element(k).amplitudes for k in range(4**ch.n)])
    chi = vecs.conj() @ rho_e @ vecs.T
    return ChiMatrix(ch.n, chi)


def dcqd_diagonal(ch: KrausChannel, k: int) -> float:
    """chi_kk as the probability of finding the dual state in (P_k ⊗ I)|I>."""
    _check_pauli_indices(ch.n, k)
    rho_e = choi_state(ch).matrix
    r = choi_basis_state(ch.n, k).amplitudes
    p = float((r.conj() @ rho_e @ r).real)
    return min(max(p, 0.0), 1.0)


def _dcqd_distribution(ch: KrausChannel) -> np.ndarray:
    rho_e = choi_state(ch).matrix
    cb = choi_basis(ch.n)
    vecs = np.stack([cb.element(k).amplitudes for k in range(4**ch.n)])
    probs = np.einsum("ki,ij,kj->k", vecs.conj(), rho_e, vecs).real
    return np.clip(probs, 0.0, None)


def dcqd_diagonal_sample(ch: KrausChannel, plan: ShotPlan, stream: RandomStream, workers: int = 1) -> list:
    """Sample the basis measurement and return (k, frequency, stderr) per index.

    The exact outcome distribution over all 4**n basis states sums to one
    for a trace-preserving channel; frequencies converge to the chi diagonal.
    """
    probs = _dcqd_distribution(ch)
    tallies = sample_categorical_partitioned(probs, plan.m, stream, workers)
    out = []
    for k, t in enumerate(tallies):
        f = t / plan.m
        out.append((k, float(f), float(np.sqrt(f * (1.0 - f) / plan.m))))
    return out


def seqst_qpt_exact(ch: KrausChannel, a: int, b: int, max_qubits: int = SELECTIVE_MAX_QUBITS) -> complex:
    """One chi_ab coefficient via the selective circuit on the dual state."""
    if ch.n > max_qubits:
        raise SizeLimitExceeded(f"selective tomography for n={ch.n} exceeds the limit of {max_qubits} qubits")
    _check_pauli_indices(ch.n, a, b)
    return seqst_exact(choi_state(ch), choi_basis(ch.n), a, b)


def seqst_qpt_sample(
    ch: KrausChannel,
    a: int,
    b: int,
    plan: ShotPlan,
    stream: RandomStream,
    max_qubits: int = SELECTIVE_MAX_QUBITS,
    workers: int = 1,
) -> ChiEstimate:
    """Shot-sampled chi_ab via the selective circuit on the dual state."""
    if ch.n > max_qubits:
        raise SizeLimitExceeded(f"selective tomography for n={ch.n} exceeds the limit of {max_qubits} qubits")
    _check_pauli_indices(ch.n, a, b)
    rep: EstimateReport = seqst_sample(choi_state(ch), choi_basis(ch.n), a, b, plan, stream, workers)
    return ChiEstimate(
        a=a,
        b=b,
        n=ch.n,
        value=rep.estimate,
        se_re=rep.se_re,
        se_im=rep.se_im,
        protocol="SEQST-QPT",
        shots=2 * plan.m,
        seed=stream.seed,
    )


def _seqpt_joint_output(ch: KrausChannel, a: int, b: int, psi: PureState) -> np.ndarray:
    """Joint system+ancilla state after controlled Paulis and the channel."""
    _check_pauli_indices(ch.n, a, b)
    if psi.dim != ch.dim:
        raise DimensionMismatch(f"state dim {psi.dim} != channel dim {ch.dim}")
    basis = pauli_basis(ch.n)
    p0 = np.diag([1.0, 0.0]).astype(complex)
    p1 = np.diag([0.0, 1.0]).astype(complex)
    # Same control polarity as the state circuit: index b on ancilla |0>,
    # index a on ancilla |1> (Paulis are Hermitian, so daggers are moot).
    u = np.kron(basis[b], p0) + np.kron(basis[a], p1)
    plus = np.full((2, 2), 0.5, dtype=complex)
    joint = u @ np.kron(np.outer(psi.amplitudes, psi.amplitudes.conj()), plus) @ u.conj().T
    eye2 = np.eye(2, dtype=complex)
    out = np.zeros_like(joint)
    for k in ch.kraus_ops:
        big = np.kron(k, eye2)
        out += big @ joint @ big.conj().T
    return out


def seqpt_single_state(ch: KrausChannel, a: int, b: int, psi: PureState) -> tuple:
    """Ancilla X and Y expectations, conditioned on finding the system in psi.

    Returns (x_val, y_val) with x_val + i y_val = <psi|E(P_a |psi><psi| P_b)|psi>.
    """
    out = _seqpt_joint_output(ch, a, b, psi)
    proj = np.outer(psi.amplitudes, psi.amplitudes.conj())
    x = float(np.einsum("ij,ji->", out, np.kron(proj, _X)).real)
    y = float(np.einsum("ij,ji->", out, np.kron(proj, _Y)).real)
    return x, y


def seqpt_outcome_distribution(ch: KrausChannel, a: int, b: int, psi: PureState, axis: str) -> tuple:
    """Three-outcome probabilities (p_plus, p_minus, p_zero) of a single run."""
    if axis not in _AXIS_EIGENVECTORS:
        raise ValueError(f"axis must be 'X' or 'Y', got {axis!r}")
    out = _seqpt_joint_output(ch, a, b, psi)
    proj = np.outer(psi.amplitudes, psi.amplitudes.conj())
    splus, sminus = _AXIS_EIGENVECTORS[axis]
    p_plus = float(np.einsum("ij,ji->", out, np.kron(proj, np.outer(splus, splus.conj()))).real)
    p_minus = float(np.einsum("ij,ji->", out, np.kron(proj, np.outer(sminus, sminus.conj()))).real)
    p_plus = min(max(p_plus, 0.0), 1.0)
    p_minus = min(max(p_minus, 0.0), 1.0)
    return p_plus, p_minus, max(1.0 - p_plus - p_minus, 0.0)


def seqpt_estimate(
    ch: KrausChannel,
    a: int,
    b: int,
    n_states: int,
    plan: ShotPlan,
    stream: RandomStream,
    workers: int = 1,
) -> ChiEstimate:
    """Estimate chi_ab from sampled runs on n_states Haar-random input states.

    Pools plan.m outcomes per axis per state, then inverts the Haar-average
    relations: Re = ((D+1) avg_x - delta_ab)/D, Im = (D+1) avg_y / D.
    """
    if n_states < 1:
        raise IndexOutOfRange(f"n_states must be >= 1, got {n_states}")
    _check_pauli_indices(ch.n, a, b)
    d = ch.dim
    means_x = np.empty(n_states)
    means_y = np.empty(n_states)
    se_x = se_y = 0.0
    for s in range(n_states):
        ss = stream.substream(s)
        psi = haar_random_state(d, ss.substream(0).generator())
        tx = sample_categorical_partitioned(
            seqpt_outcome_distribution(ch, a, b, psi, "X"), plan.m, ss.substream(1), workers
        )
        ty = sample_categorical_partitioned(
            seqpt_outcome_distribution(ch, a, b, psi, "Y"), plan.m, ss.substream(2), workers
        )
        means_x[s], se_x = _tally_stats(tx, plan.m)
        means_y[s], se_y = _tally_stats(ty, plan.m)
    avg_x = float(means_x.mean())
    avg_y = float(means_y.mean())
    # With several states the per-state means carry both the shot noise and
    # the state-sampling spread, so their scatter is the honest error bar;
    # for a single state only the shot-level error is observable.
    if n_states > 1:
        se_x = float(means_x.std(ddof=1) / np.sqrt(n_states))
        se_y = float(means_y.std(ddof=1) / np.sqrt(n_states))
    total = n_states * plan.m
    delta = 1.0 if a == b else 0.0
    scale = (d + 1) / d
    return ChiEstimate(
        a=a,
        b=b,
        n=ch.n,
        value=complex(scale * avg_x - delta / d, scale * avg_y),
        se_re=scale * se_x,
        se_im=scale * se_y,
        protocol="SEQPT",
        shots=2 * total,
        seed=stream.seed,
    )


def seqpt_exact_average(ch: KrausChannel, a: int, b: int) -> tuple:
    """The Haar averages (avg_x, avg_y) of the single-state expectations.

    Evaluated in closed form: the average of <psi|A|psi><psi|B|psi> equals
    Tr((A ⊗ B)(I + SWAP)) / (D(D+1)), applied to A = K_k P_a, B = P_b K_k†
    and summed over the Kraus operators.
    """
    _check_pauli_indices(ch.n, a, b)
    d = ch.dim
    basis = pauli_basis(ch.n)
    swap = np.zeros((d * d, d * d))
    for i in range(d):
        for j in range(d):
            swap[i * d + j, j * d + i] = 1.0
    two_copy = (np.eye(d * d) + swap) / (d * (d + 1))
    avg = 0j
    for k in ch.kraus_ops:
        avg += np.einsum("ij,ji->", np.kron(k @ basis[a], basis[b] @ k.conj().T), two_copy)
    return float(avg.real), float(avg.imag)


def entangled_state_circuit(n: int) -> tuple:
    """Prepare the maximally entangled state by an audited gate sequence.

    One Hadamard per first-register qubit and one CNOT per qubit pair, acting
    on |0...0> of 2n qubits; returns (state, GateCounts). The gate count is
    linear in n, unlike the 2**n nonzero amplitudes written out directly.
    """
    if n < 1:
        raise DimensionMismatch("need at least one qubit")
    total = 2 * n
    dim = 2**total
    state = np.zeros(dim, dtype=complex)
    state[0] = 1.0
    singles = 0
    doubles = 0
    h = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
    for q in range(n):
        state = _apply_single_qubit_gate(state, h, q, total)
        singles += 1
    for q in range(n):
        state = _apply_cnot(state, q, n + q, total)
        doubles += 1
    return PureState(state), GateCounts(single_qubit=singles, two_qubit=doubles)


def _apply_single_qubit_gate(state: np.ndarray, gate: np.ndarray, qubit: int, total: int) -> np.ndarray:
    pre = 2**qubit
    post = 2 ** (total - qubit - 1)
    t = state.reshape(pre, 2, post)
    return np.einsum("ab,ibj->iaj", gate, t).reshape(-1)


def _apply_cnot(state: np.ndarray, control: int, target: int, total: int) -> np.ndarray:
    idx = np.arange(state.size)
    cbit = (idx >> (total - 1 - control)) & 1
    flipped = idx ^ (1 << (total - 1 - target))
    out = state.copy()
    mask = cbit == 1
    out[idx[mask]] = state[flipped[mask]]
    return out
