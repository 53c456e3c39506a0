"""Phase-tracked Pauli strings.

Qubits are 1-indexed; qubit 1 is the leftmost tensor factor and the most
significant bit of a computational-basis index. Phases are restricted to
the fourth roots of unity and stored as an exponent ``k`` of ``i**k``, so
the algebra never touches floating point.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Mapping

import numpy as np

LETTERS = "IXYZ"
MATRIX_GUARD = 12

# (a, b) -> (phase exponent, letter) for the single-qubit product a*b
_PRODUCT = {
    ("I", "I"): (0, "I"), ("I", "X"): (0, "X"), ("I", "Y"): (0, "Y"), ("I", "Z"): (0, "Z"),
    ("X", "I"): (0, "X"), ("X", "X"): (0, "I"), ("X", "Y"): (1, "Z"), ("X", "Z"): (3, "Y"),
    ("Y", "I"): (0, "Y"), ("Y", "X"): (3, "Z"), ("Y", "Y"): (0, "I"), ("Y", "Z"): (1, "X"),
    ("Z", "I"): (0, "Z"), ("Z", "X"): (1, "Y"), ("Z", "Y"): (3, "X"), ("Z", "Z"): (0, "I"),
}

_PHASE_TOKENS = {0: "+", 1: "+i", 2: "-", 3: "-i"}
_PHASE_VALUES = (1, 1j, -1, -1j)

_SINGLE = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


class PauliError(ValueError):
    """Malformed Pauli string or incompatible registers."""


@dataclass(frozen=True)
class PauliString:
    """Tensor product of Pauli letters times ``i**phase``.

    Parameters
    ----------
    letters : str
        One symbol from ``"IXYZ"`` per qubit, qubit 1 first.
    phase : int
        Exponent ``k`` of the global factor ``i**k``; reduced mod 4.
    """

    letters: str
    phase: int = 0

    def __post_init__(self):
        if not isinstance(self.letters, str):
            raise PauliError(f"letters must be a str, got {type(self.letters).__name__}")
        bad = [c for c in self.letters if c not in LETTERS]
        if bad:
            raise PauliError(f"invalid Pauli letter {bad[0]!r} in {self.letters!r}")
        object.__setattr__(self, "phase", int(self.phase) % 4)

    # construction

    @classmethod
    def identity(cls, n_qubits: int) -> PauliString:
        return cls("I" * n_qubits)

    @classmethod
    def from_sparse(cls, n_qubits: int, ops: Mapping[int, str], phase: int = 0) -> PauliString:
        """Build a string from ``{qubit: letter}`` with 1-based qubit indices."""
        letters = ["I"] * n_qubits
        for q, c in ops.items():
            if not 1 <= q <= n_qubits:
                raise PauliError(f"qubit {q} outside register of size {n_qubits}")
            letters[q - 1] = c
        return cls("".join(letters), phase)

    @classmethod
    def parse(cls, text: str) -> PauliString:
        """Parse ``"<phase><letters>"``, e.g. ``"-iZXY"`` or ``"XZI"``.

        The phase token is one of ``+``, ``-``, ``i``, ``+i``, ``-i`` and may
        be omitted. The letters are upper case; a lower-case ``i`` is only
        ever a phase.
        """
        s = text.strip()
        phase = 0
        if s[:1] in "+-" and s:
            phase = 0 if s[0] == "+" else 2
            s = s[1:]
        if s[:1] == "i":
            phase += 1
            s = s[1:]
        if not s:
            raise PauliError(f"no Pauli letters in {text!r}")
        for c in s:
            if c not in LETTERS:
                raise PauliError(f"invalid Pauli token {text.strip()!r}: bad letter {c!r}")
        return cls(s, phase)

    # queries

    @property
    def n_qubits(self) -> int:
        return len(self.letters)

    @property
    def coefficient(self) -> complex:
        return _PHASE_VALUES[self.phase]

    def support(self) -> frozenset[int]:
        return frozenset(q for q, c in enumerate(self.letters, start=1) if c != "I")

    @property
    def weight(self) -> int:
        return sum(c != "I" for c in self.letters)

    def is_hermitian(self) -> bool:
        return self.phase in (0, 2)

    def __getitem__(self, qubit: int) -> str:
        return self.letters[qubit - 1]

    def __str__(self) -> str:
        return _PHASE_TOKENS[self.phase] + self.letters

    # algebra

    def __mul__(self, other: PauliString) -> PauliString:
        return multiply(self, other)

    def __neg__(self) -> PauliString:
        return PauliString(self.letters, self.phase + 2)

    def times_i(self, k: int = 1) -> PauliString:
        """Multiply by ``i**k``."""
        return PauliString(self.letters, self.phase + k)

    def unsigned(self) -> PauliString:
        return PauliString(self.letters)

    def adjoint(self) -> PauliString:
        return PauliString(self.letters, -self.phase)

    def embed(self, n_total: int, offset: int) -> PauliString:
        """Place this string on qubits ``offset+1 .. offset+n`` of a larger register."""
        if offset < 0 or offset + self.n_qubits > n_total:
            raise PauliError(
                f"cannot embed {self.n_qubits} qubits at offset {offset} into {n_total}")
        pad = n_total - offset - self.n_qubits
        return PauliString("I" * offset + self.letters + "I" * pad, self.phase)

    # bit masks for state-vector kernels; qubit 1 is the most significant bit

    def masks(self) -> tuple[int, int, int]:
        """Return ``(x_mask, z_mask, n_y)`` so that the operator is
        ``i**(phase + n_y) * X^x_mask Z^z_mask``."""
        n = self.n_qubits
        x_mask = z_mask = n_y = 0
        for q, c in enumerate(self.letters):
            bit = 1 << (n - 1 - q)
            if c in "XY":
                x_mask |= bit
            if c in "ZY":
                z_mask |= bit
            if c == "Y":
                n_y += 1
        return x_mask, z_mask, n_y


def _check_sizes(a: PauliString, b: PauliString):
    if a.n_qubits != b.n_qubits:
        raise PauliError(f"register size mismatch: {a.n_qubits} vs {b.n_qubits}")


def multiply(a: PauliString, b: PauliString) -> PauliString:
    """Exact operator product ``a·b``."""
    _check_sizes(a, b)
    phase = a.phase + b.phase
    out = []
    for ca, cb in zip(a.letters, b.letters):
        k, c = _PRODUCT[ca, cb]
        phase += k
        out.append(c)
    return PauliString("".join(out), phase)


def product(strings: Iterable[PauliString], n_qubits: int) -> PauliString:
    """Left-to-right operator product; the empty product is the identity."""
    return reduce(multiply, strings, PauliString.identity(n_qubits))


def anticommutes(a: PauliString, b: PauliString) -> bool:
    _check_sizes(a, b)
    clashes = sum(
        1 for ca, cb in zip(a.letters, b.letters) if ca != "I" and cb != "I" and ca != cb
    )
    return clashes % 2 == 1


def commutes(a: PauliString, b: PauliString) -> bool:
    return not anticommutes(a, b)


def as_matrix(p: PauliString, guard: int = MATRIX_GUARD) -> np.ndarray:
    """Dense ``2**n x 2**n`` matrix of ``p``."""
    if p.n_qubits > guard:
        raise PauliError(f"{p.n_qubits} qubits exceeds the dense-matrix guard of {guard}")
    mat = np.ones((1, 1), dtype=complex)
    for c in p.letters:
        mat = np.kron(mat, _SINGLE[c])
    return p.coefficient * mat
