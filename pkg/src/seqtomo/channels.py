"""Quantum channels in Kraus and process-matrix (chi) form.

A channel acts as E(rho) = sum_k K_k rho K_k†, or equivalently as
E(rho) = sum_mn chi_mn P_m rho P_n† over the n-qubit Pauli basis {P_m}.
The chi matrix of a physical channel is Hermitian (hermiticity
preservation), satisfies sum_mn chi_mn P_n† P_m = I (trace preservation),
and is positive semidefinite (complete positivity); ``validate_channel``
reports all three predicates with their numerical residuals and never
throws, so malformed matrices can be diagnosed.

Only trace-preserving, dimension-preserving qubit channels are in scope.
"""

import json
from dataclasses import dataclass

import numpy as np

from .core import DensityMatrix, as_matrix, maximally_entangled_state
from .errors import (
    DimensionMismatch,
    NotCompletelyPositive,
    ParamOutOfRange,
    UnknownChannel,
)
from .pauli import PauliLabel, pauli_basis

# Eigenvalues of a chi matrix in (CHI_EIG_ZERO_LO, CHI_EIG_ZERO_HI) are
# treated as numerical zeros when extracting Kraus operators; anything
# below the lower cutoff is a genuine negativity.
CHI_EIG_ZERO_LO = -1e-7
CHI_EIG_ZERO_HI = 1e-9


class KrausChannel:
    """A channel given by Kraus operators on n qubits.

    Construction checks shapes only; trace preservation is a property
    (``completeness_residual``) so that deliberately corrupted channels can
    still be represented and diagnosed.
    """

    def __init__(self, n: int, kraus_ops):
        if n < 1:
            raise DimensionMismatch("need at least one qubit")
        d = 2**n
        ops = tuple(np.array(as_matrix(k), dtype=complex) for k in kraus_ops)
        if not ops:
            raise DimensionMismatch("need at least one Kraus operator")
        for k in ops:
            if k.shape != (d, d):
                raise DimensionMismatch(f"Kraus operator shape {k.shape} != ({d}, {d})")
            k.setflags(write=False)
        self.n = n
        self.kraus_ops = ops

    @property
    def dim(self) -> int:
        return 2**self.n

    def completeness_residual(self) -> float:
        """Max-norm deviation of sum_k K_k† K_k from the identity."""
        s = sum(k.conj().T @ k for k in self.kraus_ops)
        return float(np.max(np.abs(s - np.eye(self.dim))))

    def __repr__(self):
        return f"KrausChannel(n={self.n}, rank={len(self.kraus_ops)})"


class ChiMatrix:
    """A D²×D² process matrix over the Pauli basis, D = 2**n.

    Entry (m, n) multiplies P_m rho P_n† in the channel expansion. The
    constructor checks the shape only; physicality is assessed by
    ``validate_channel``.
    """

    def __init__(self, n: int, entries):
        if n < 1:
            raise DimensionMismatch("need at least one qubit")
        d2 = 4**n
        m = np.array(np.asarray(entries, dtype=complex))
        if m.shape != (d2, d2):
            raise DimensionMismatch(f"chi matrix shape {m.shape} != ({d2}, {d2})")
        m.setflags(write=False)
        self.n = n
        self.entries = m

    @property
    def dim(self) -> int:
        return 2**self.n

    def __repr__(self):
        return f"ChiMatrix(n={self.n})"


@dataclass(frozen=True)
class ValidityReport:
    """The three channel predicates with their numerical evidence."""

    hermitian: bool
    hermitian_residual: float
    trace_preserving: bool
    tp_residual: float
    completely_positive: bool
    min_eigenvalue: float

    @property
    def all_valid(self) -> bool:
        return self.hermitian and self.trace_preserving and self.completely_positive

    def to_json(self) -> dict:
        return {
            "hermitian": {"ok": self.hermitian, "residual": self.hermitian_residual},
            "trace_preserving": {"ok": self.trace_preserving, "residual": self.tp_residual},
            "completely_positive": {
                "ok": self.completely_positive,
                "min_eigenvalue": self.min_eigenvalue,
            },
        }


def apply_kraus(ch: KrausChannel, rho: DensityMatrix) -> DensityMatrix:
    """E(rho) = sum_k K_k rho K_k†."""
    if ch.dim != rho.dim:
        raise DimensionMismatch(f"channel dim {ch.dim} != state dim {rho.dim}")
    out = sum(k @ rho.matrix @ k.conj().T for k in ch.kraus_ops)
    return DensityMatrix(out)


def apply_chi(chi: ChiMatrix, rho: DensityMatrix) -> DensityMatrix:
    """Evaluate the double sum sum_mn chi_mn P_m rho P_n† literally."""
    if chi.dim != rho.dim:
        raise DimensionMismatch(f"channel dim {chi.dim} != state dim {rho.dim}")
    basis = pauli_basis(chi.n)
    d2 = 4**chi.n
    out = np.zeros((chi.dim, chi.dim), dtype=complex)
    for m in range(d2):
        left = basis[m] @ rho.matrix
        for k in range(d2):
            c = chi.entries[m, k]
            if c != 0:
                out += c * (left @ basis[k].conj().T)
    return DensityMatrix(out)


def kraus_to_chi(ch: KrausChannel) -> ChiMatrix:
    """Expand each Kraus operator over the Pauli basis and form chi.

    K_k = sum_m c_km P_m with c_km = Tr(P_m† K_k) / D, and
    chi_mn = sum_k c_km conj(c_kn).
    """
    d = ch.dim
    basis = np.stack(pauli_basis(ch.n))
    kstack = np.stack(ch.kraus_ops)
    # c[k, m] = Tr(P_m K_k) / D  (Pauli matrices are Hermitian)
    c = np.einsum("mij,kji->km", basis, kstack) / d
    chi = np.einsum("km,kn->mn", c, c.conj())
    return ChiMatrix(ch.n, chi)


def chi_to_kraus(chi: ChiMatrix) -> KrausChannel:
    """Extract Kraus operators from a positive chi matrix by eigendecomposition.

    K_k = sqrt(l_k) sum_m v_mk P_m for eigenpairs (l_k, v_k). Eigenvalues in
    the numerical-zero window are dropped; below it, NotCompletelyPositive.
    """
    herm = (chi.entries + chi.entries.conj().T) / 2
    vals, vecs = np.linalg.eigh(herm)
    if vals.min() < CHI_EIG_ZERO_LO:
        raise NotCompletelyPositive(f"chi has eigenvalue {vals.min():.3e}")
    basis = np.stack(pauli_basis(chi.n))
    ops = []
    for lam, v in zip(vals, vecs.T):
        if lam < CHI_EIG_ZERO_HI:
            continue
        ops.append(np.sqrt(lam) * np.einsum("m,mij->ij", v, basis))
    return KrausChannel(chi.n, ops)


def choi_state(ch: KrausChannel) -> DensityMatrix:
    """The state isomorphic to the channel: (E ⊗ I) applied to the projector
    onto the maximally entangled state of two n-qubit registers."""
    d = ch.dim
    phi = maximally_entangled_state(ch.n).amplitudes
    proj = np.outer(phi, phi.conj())
    eye = np.eye(d)
    out = np.zeros((d * d, d * d), dtype=complex)
    for k in ch.kraus_ops:
        big = np.kron(k, eye)
        out += big @ proj @ big.conj().T
    return DensityMatrix(out)


def validate_channel(chi: ChiMatrix, atol: float = 1e-9) -> ValidityReport:
    """Report hermiticity, trace preservation and complete positivity.

    Positivity is assessed on the Hermitian part (chi + chi†)/2, so a purely
    anti-Hermitian defect shows up only in the hermiticity predicate.
    """
    m = chi.entries
    herm_res = float(np.max(np.abs(m - m.conj().T)))
    basis = pauli_basis(chi.n)
    d2 = 4**chi.n
    tp = np.zeros((chi.dim, chi.dim), dtype=complex)
    for a in range(d2):
        for b in range(d2):
            c = m[a, b]
            if c != 0:
                tp += c * (basis[b].conj().T @ basis[a])
    tp_res = float(np.max(np.abs(tp - np.eye(chi.dim))))
    min_eig = float(np.linalg.eigvalsh((m + m.conj().T) / 2).min())
    return ValidityReport(
        hermitian=herm_res <= atol,
        hermitian_residual=herm_res,
        trace_preserving=tp_res <= atol,
        tp_residual=tp_res,
        completely_positive=min_eig >= -atol,
        min_eigenvalue=min_eig,
    )


# ---------------------------------------------------------------------------
# Named channels
# ---------------------------------------------------------------------------

_GATES = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
    "h": np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2),
    "s": np.array([[1, 0], [0, 1j]], dtype=complex),
    "t": np.array([[1, 0], [0, np.exp(1j * np.pi / 4)]], dtype=complex),
    "cnot": np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
    ),
}


def _check_prob(name: str, value: float, hi: float = 1.0) -> float:
    value = float(value)
    if not 0.0 <= value <= hi:
        raise ParamOutOfRange(f"{name} must be in [0, {hi}], got {value}")
    return value


def channel_zoo(name: str, n: int = 1, **params) -> KrausChannel:
    """Construct a named channel.

    Names: identity(n), unitary (param ``gate`` from {x,y,z,h,s,t,cnot} or
    ``u`` an explicit matrix), bit_flip(p), phase_flip(p), bit_phase_flip(p),
    depolarizing(p), amplitude_damping(gamma). The flip and damping channels
    are single-qubit; build multi-qubit ones with ``tensor_channels``.
    """
    eye2 = np.eye(2, dtype=complex)
    if name == "identity":
        return KrausChannel(n, [np.eye(2**n, dtype=complex)])
    if name == "unitary":
        if "u" in params:
            u = np.asarray(params["u"], dtype=complex)
        elif "gate" in params:
            gate = str(params["gate"]).lower()
            if gate not in _GATES:
                raise UnknownChannel(f"unknown gate {gate!r}; known: {sorted(_GATES)}")
            u = _GATES[gate]
        else:
            raise ParamOutOfRange("unitary channel needs a 'gate' name or matrix 'u'")
        nq = int(np.log2(u.shape[0]))
        if 2**nq != u.shape[0]:
            raise DimensionMismatch(f"unitary dimension {u.shape[0]} is not a power of two")
        return KrausChannel(nq, [u])
    if name == "bit_flip":
        p = _check_prob("p", params["p"])
        return KrausChannel(1, [np.sqrt(1 - p) * eye2, np.sqrt(p) * _GATES["x"]])
    if name == "phase_flip":
        p = _check_prob("p", params["p"])
        return KrausChannel(1, [np.sqrt(1 - p) * eye2, np.sqrt(p) * _GATES["z"]])
    if name == "bit_phase_flip":
        p = _check_prob("p", params["p"])
        return KrausChannel(1, [np.sqrt(1 - p) * eye2, np.sqrt(p) * _GATES["y"]])
    if name == "depolarizing":
        # Kraus weights stay nonnegative up to p = 4/3.
        p = _check_prob("p", params["p"], hi=4.0 / 3.0)
        return KrausChannel(
            1,
            [
                np.sqrt(1 - 3 * p / 4) * eye2,
                np.sqrt(p / 4) * _GATES["x"],
                np.sqrt(p / 4) * _GATES["y"],
                np.sqrt(p / 4) * _GATES["z"],
            ],
        )
    if name == "amplitude_damping":
        g = _check_prob("gamma", params["gamma"])
        k0 = np.array([[1, 0], [0, np.sqrt(1 - g)]], dtype=complex)
        k1 = np.array([[0, np.sqrt(g)], [0, 0]], dtype=complex)
        return KrausChannel(1, [k0, k1])
    raise UnknownChannel(f"unknown channel {name!r}; see zoo_descriptions()")


def compose_channels(first: KrausChannel, then: KrausChannel) -> KrausChannel:
    """Sequential composition: apply `first`, then `then` (all pairwise products)."""
    if first.n != then.n:
        raise DimensionMismatch(f"cannot compose channels on {first.n} and {then.n} qubits")
    return KrausChannel(first.n, [b @ a for b in then.kraus_ops for a in first.kraus_ops])


def tensor_channels(a: KrausChannel, b: KrausChannel) -> KrausChannel:
    """Per-register tensor product, `a` on the leading qubits."""
    return KrausChannel(a.n + b.n, [np.kron(ka, kb) for ka in a.kraus_ops for kb in b.kraus_ops])


def random_channel(n: int, kraus_rank: int, rng: np.random.Generator) -> KrausChannel:
    """A random CPTP channel from normalized Ginibre Kraus operators."""
    d = 2**n
    gs = [rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)) for _ in range(kraus_rank)]
    s = sum(g.conj().T @ g for g in gs)
    vals, vecs = np.linalg.eigh(s)
    inv_sqrt = vecs @ np.diag(1.0 / np.sqrt(vals)) @ vecs.conj().T
    return KrausChannel(n, [g @ inv_sqrt for g in gs])


def zoo_descriptions() -> dict:
    """Name -> parameter description for every zoo channel."""
    return {
        "identity": "no parameters (any n)",
        "unitary": "gate: one of x,y,z,h,s,t,cnot — or u: explicit matrix",
        "bit_flip": "p in [0, 1]",
        "phase_flip": "p in [0, 1]",
        "bit_phase_flip": "p in [0, 1]",
        "depolarizing": "p in [0, 4/3]",
        "amplitude_damping": "gamma in [0, 1]",
        "tensor": "factors: list of channel specs",
        "compose": "first, then: channel specs",
    }


def zoo_catalog(n: int = 1) -> dict:
    """Canonical named instances used by tests and the CLI.

    n=1 covers every zoo family; n=2 gives representative products and a
    two-qubit unitary.
    """
    if n == 1:
        return {
            "identity": channel_zoo("identity"),
            "hadamard": channel_zoo("unitary", gate="h"),
            "bit_flip(0.3)": channel_zoo("bit_flip", p=0.3),
            "phase_flip(0.3)": channel_zoo("phase_flip", p=0.3),
            "bit_phase_flip(0.3)": channel_zoo("bit_phase_flip", p=0.3),
            "depolarizing(0.2)": channel_zoo("depolarizing", p=0.2),
            "amplitude_damping(0.3)": channel_zoo("amplitude_damping", gamma=0.3),
        }
    if n == 2:
        return {
            "identity": channel_zoo("identity", n=2),
            "cnot": channel_zoo("unitary", gate="cnot"),
            "bit_flip(0.2) ⊗ amplitude_damping(0.4)": tensor_channels(
                channel_zoo("bit_flip", p=0.2), channel_zoo("amplitude_damping", gamma=0.4)
            ),
            "depolarizing(0.5) ⊗ phase_flip(0.1)": tensor_channels(
                channel_zoo("depolarizing", p=0.5), channel_zoo("phase_flip", p=0.1)
            ),
        }
    raise ParamOutOfRange(f"catalog provided for n in {{1, 2}}, got {n}")


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def channel_from_json(spec) -> KrausChannel:
    """Build a channel from {"name", "params"} or {"kraus": [...]}.

    Combinators: {"name": "tensor", "params": {"factors": [spec, ...]}} and
    {"name": "compose", "params": {"first": spec, "then": spec}}. Explicit
    Kraus matrices are nested lists of [re, im] pairs.
    """
    if isinstance(spec, str):
        spec = json.loads(spec)
    if "kraus" in spec:
        ops = [_matrix_from_pairs(k) for k in spec["kraus"]]
        n = int(np.log2(ops[0].shape[0]))
        return KrausChannel(n, ops)
    name = spec.get("name")
    if name is None:
        raise UnknownChannel(f"channel spec needs 'name' or 'kraus': {spec!r}")
    params = dict(spec.get("params") or {})
    if name == "tensor":
        factors = [channel_from_json(f) for f in params["factors"]]
        out = factors[0]
        for f in factors[1:]:
            out = tensor_channels(out, f)
        return out
    if name == "compose":
        return compose_channels(channel_from_json(params["first"]), channel_from_json(params["then"]))
    n = int(params.pop("n", 1))
    return channel_zoo(name, n=n, **params)


def channel_to_json(ch: KrausChannel) -> dict:
    """Serialize to the explicit {"kraus": ...} form ([re, im] pair matrices)."""
    return {"kraus": [_matrix_to_pairs(k) for k in ch.kraus_ops]}


def chi_csv_rows(chi: ChiMatrix) -> list:
    """Rows (m, n, label_m, label_n, re, im) for every chi entry."""
    d2 = 4**chi.n
    labels = [str(PauliLabel.from_index(chi.n, i)) for i in range(d2)]
    rows = []
    for m in range(d2):
        for k in range(d2):
            v = chi.entries[m, k]
            rows.append((m, k, labels[m], labels[k], float(v.real), float(v.imag)))
    return rows


def _matrix_from_pairs(rows) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in rows], dtype=complex)


def _matrix_to_pairs(m: np.ndarray) -> list:
    return [[[float(v.real), float(v.imag)] for v in row] for row in m]
