"""Pauli strings in symplectic (x-mask, z-mask) form.

Letter ``j`` of a string acts on qubit ``j``; qubit 0 is the most significant
bit of a basis index, so letter ``j`` maps to bit ``n - 1 - j``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_LETTERS = "IXYZ"


@dataclass(frozen=True)
class PauliString:
    ops: str
    coefficient: float = 1.0

    def __post_init__(self):
        if not self.ops or any(c not in _LETTERS for c in self.ops):
            raise ValueError(f"invalid Pauli string {self.ops!r}")

    @property
    def num_qubits(self) -> int:
        return len(self.ops)

    @property
    def x_mask(self) -> int:
        n = len(self.ops)
        return sum(1 << (n - 1 - j) for j, c in enumerate(self.ops) if c in "XY")

    @property
    def z_mask(self) -> int:
        n = len(self.ops)
        return sum(1 << (n - 1 - j) for j, c in enumerate(self.ops) if c in "ZY")

    @property
    def weight(self) -> int:
        return sum(c != "I" for c in self.ops)

    @classmethod
    def from_masks(cls, x: int, z: int, n: int, coefficient: float = 1.0) -> "PauliString":
        return cls(masks_to_ops(x, z, n), coefficient)

    def matrix(self) -> np.ndarray:
        """Dense 2^n x 2^n matrix (without the coefficient)."""
        out = np.ones((1, 1), dtype=complex)
        for c in self.ops:
            out = np.kron(out, PAULI_MATRICES[c])
        return out


PAULI_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def masks_to_ops(x: int, z: int, n: int) -> str:
    letters = []
    for j in range(n):
        bit = 1 << (n - 1 - j)
        letters.append("IXZY"[((x & bit) != 0) + 2 * ((z & bit) != 0)])
    return "".join(letters)


def popcount(a):
    """Bit count for Python ints or integer numpy arrays."""
    if isinstance(a, (int, np.integer)):
        return int(a).bit_count()
    return np.bitwise_count(a).astype(np.int64)


def parity_sign(a):
    """(-1) ** popcount(a), elementwise."""
    return 1 - 2 * (popcount(a) & 1)


def matrix_element_phase(x: int, z: int, b):
    """Phase of <b^x| P |b> for the string with masks (x, z); ``b`` may be an array."""
    return (1j) ** (popcount(x & z) % 4) * parity_sign(np.bitwise_and(b, z))
