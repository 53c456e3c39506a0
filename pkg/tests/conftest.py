"""Shared oracles and random-instance generators.

The dense helpers here build matrices straight from 2x2 Pauli blocks so the
checks do not lean on the package's own ``as_matrix``.
"""
from __future__ import annotations

from functools import reduce

import numpy as np
import pytest

from tfqubit.pauli import PauliString

_MATS = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

ACCEPTANCE_LINES: list[str] = []


def dense(p: PauliString) -> np.ndarray:
    """Kronecker product of the letters, qubit 1 leftmost, times the phase."""
    return (1j ** p.phase) * reduce(np.kron, [_MATS[c] for c in p.letters])


def dense_letters(letters: str) -> np.ndarray:
    return reduce(np.kron, [_MATS[c] for c in letters])


def jw_majoranas(n: int) -> list[PauliString]:
    """The 2n Jordan-Wigner Majorana strings on n qubits, all pairwise anticommuting."""
    out = []
    for k in range(1, n + 1):
        for tail in "XY":
            out.append(PauliString("Z" * (k - 1) + tail + "I" * (n - k)))
    return out


def random_anticommuting(rng: np.random.Generator, L: int, n: int) -> list[PauliString]:
    """L Hermitian, pairwise anticommuting strings on n qubits.

    Drawn from the Majoranas of a smaller register, spread over random
    qubit positions, with a random letter permutation per qubit (which
    keeps every commutation relation) and random signs.
    """
    m = max(1, (L + 1) // 2)
    if m > n:
        raise ValueError("register too small")
    pool = jw_majoranas(m)
    picked = [pool[i] for i in rng.choice(len(pool), size=L, replace=False)]
    positions = rng.choice(n, size=m, replace=False)
    perms = [dict(zip("XYZ", rng.permutation(list("XYZ")))) | {"I": "I"} for _ in range(n)]
    out = []
    for p in picked:
        letters = ["I"] * n
        for src, dst in enumerate(positions):
            letters[dst] = perms[dst][p.letters[src]]
        out.append(PauliString("".join(letters), int(rng.choice([0, 2]))))
    return out


def random_pauli(rng: np.random.Generator, n: int, phase: int | None = None) -> PauliString:
    letters = "".join(rng.choice(list("IXYZ"), size=n))
    return PauliString(letters, int(rng.integers(4)) if phase is None else phase)


def random_state(rng: np.random.Generator, n: int) -> np.ndarray:
    v = rng.normal(size=2 ** n) + 1j * rng.normal(size=2 ** n)
    return v / np.linalg.norm(v)


def random_hamiltonian_terms(rng: np.random.Generator, lam: int, n_sim: int):
    """``lam`` distinct non-identity Hermitian strings with random signed weights."""
    if lam > 4 ** n_sim - 1:
        raise ValueError(f"only {4 ** n_sim - 1} distinct terms on {n_sim} qubits")
    seen = set()
    terms = []
    while len(terms) < lam:
        letters = "".join(rng.choice(list("IXYZ"), size=n_sim))
        if letters in seen or set(letters) == {"I"}:
            continue
        seen.add(letters)
        coeff = float(rng.uniform(0.1, 1.0) * rng.choice([-1, 1]))
        terms.append((coeff, PauliString(letters)))
    return terms


def record(criterion: int, passed: bool, detail: str) -> None:
    ACCEPTANCE_LINES.append(f"criterion {criterion:>2}: {'PASS' if passed else 'FAIL'}  {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
