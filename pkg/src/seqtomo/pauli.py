"""The n-fold tensor-product Pauli operator basis with symbolic index algebra.

Labels are words over {I, X, Y, Z}; the basis index is the base-4 encoding
I=0, X=1, Y=2, Z=3 with the qubit-0 letter as the most significant digit,
so index 0 is always the all-identity operator. The sign convention is
fixed here once for the whole package: Y = [[0, -i], [i, 0]].

Products and trace inner products are computed symbolically, without
materializing matrices; ``pauli_matrix`` builds the dense operator when one
is actually needed.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import Operator
from .errors import IndexOutOfRange, LengthMismatch

LETTERS = "IXYZ"

_SIGMA = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

# Single-qubit products sigma_a sigma_b = phase * sigma_c.
_PRODUCT = {
    ("X", "Y"): (1j, "Z"),
    ("Y", "X"): (-1j, "Z"),
    ("Y", "Z"): (1j, "X"),
    ("Z", "Y"): (-1j, "X"),
    ("Z", "X"): (1j, "Y"),
    ("X", "Z"): (-1j, "Y"),
}
for _a in LETTERS:
    _PRODUCT[("I", _a)] = (1, _a)
    _PRODUCT[(_a, "I")] = (1, _a)
    _PRODUCT[(_a, _a)] = (1, "I")

PHASES = (1, -1, 1j, -1j)


@dataclass(frozen=True)
class PauliLabel:
    """A symbolic n-qubit Pauli operator, e.g. PauliLabel("XZ") = X ⊗ Z."""

    letters: str

    def __post_init__(self):
        if not self.letters or any(c not in LETTERS for c in self.letters):
            raise ValueError(f"letters must be a nonempty word over {LETTERS}, got {self.letters!r}")

    @property
    def n(self) -> int:
        return len(self.letters)

    @property
    def index(self) -> int:
        """Base-4 index in [0, 4**n), qubit 0 most significant."""
        m = 0
        for c in self.letters:
            m = 4 * m + LETTERS.index(c)
        return m

    @classmethod
    def from_index(cls, n: int, index: int) -> "PauliLabel":
        if not 0 <= index < 4**n:
            raise IndexOutOfRange(f"index {index} outside [0, {4**n}) for n={n}")
        digits = []
        m = index
        for _ in range(n):
            digits.append(LETTERS[m % 4])
            m //= 4
        return cls("".join(reversed(digits)))

    def __str__(self):
        return self.letters


@dataclass(frozen=True)
class PhasedPauli:
    """A Pauli label together with a unit phase from {+1, -1, +i, -i}."""

    label: PauliLabel
    phase: complex

    def __post_init__(self):
        if self.phase not in PHASES:
            raise ValueError(f"phase must be one of {PHASES}, got {self.phase!r}")


@lru_cache(maxsize=None)
def pauli_basis(n: int) -> tuple:
    """All 4**n dense Pauli matrices for n qubits, in index order (cached)."""
    if n == 1:
        mats = [_SIGMA[c].copy() for c in LETTERS]
    else:
        mats = [np.kron(_SIGMA[c], sub) for c in LETTERS for sub in pauli_basis(n - 1)]
    for m in mats:
        m.setflags(write=False)
    return tuple(mats)


def pauli_matrix(label: PauliLabel) -> Operator:
    """The dense 2**n × 2**n matrix of a Pauli label."""
    return Operator(pauli_basis(label.n)[label.index])


def pauli_product(a: PauliLabel, b: PauliLabel) -> PhasedPauli:
    """The symbolic product: pauli(a) @ pauli(b) = phase * pauli(result)."""
    if a.n != b.n:
        raise LengthMismatch(f"labels act on {a.n} and {b.n} qubits")
    phase = 1 + 0j
    out = []
    for ca, cb in zip(a.letters, b.letters):
        ph, c = _PRODUCT[(ca, cb)]
        phase *= ph
        out.append(c)
    # Collapse the accumulated phase to an exact unit.
    phase = min(PHASES, key=lambda p: abs(p - phase))
    return PhasedPauli(PauliLabel("".join(out)), phase)


def pauli_trace_inner(a: PauliLabel, b: PauliLabel) -> float:
    """Tr(pauli(a)† pauli(b)) = D when a == b else 0, computed symbolically."""
    if a.n != b.n:
        raise LengthMismatch(f"labels act on {a.n} and {b.n} qubits")
    return float(2**a.n) if a.letters == b.letters else 0.0
