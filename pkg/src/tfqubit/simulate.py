"""Dense state-vector simulation and dense-matrix oracles.

Amplitude index bit ``n - q`` holds qubit ``q``, so qubit 1 is the most
significant bit. Kernels act on arrays of shape ``(2**n, batch)`` so the
same code runs single states and whole unitaries column by column.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .circuit import (Circuit, ControlledPauliRotation, ControlledPauliString, Gate,
                      Hadamard, Measure, PauliRotation, PhaseGate)
from .pauli import PauliString, anticommutes, as_matrix

MATRIX_GUARD = 12
STATE_GUARD = 24


class GuardExceeded(ValueError):
    """Instance too large for exact dense verification."""


class SimulationError(ValueError):
    pass


class LCUOracleError(AssertionError):
    """The two routes of the linear-combination oracle disagree."""


@dataclass
class StateVector:
    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if self.amplitudes.shape[0] != 2 ** self.n_qubits:
            raise SimulationError(
                f"{self.amplitudes.shape[0]} amplitudes for {self.n_qubits} qubits")

    @classmethod
    def zero(cls, n_qubits: int) -> StateVector:
        return cls.basis(n_qubits, 0)

    @classmethod
    def basis(cls, n_qubits: int, index: int | str) -> StateVector:
        if isinstance(index, str):
            index = int(index, 2)
        if n_qubits > STATE_GUARD:
            raise GuardExceeded(f"{n_qubits} qubits exceeds the state-vector guard of {STATE_GUARD}")
        amps = np.zeros(2 ** n_qubits, dtype=complex)
        amps[index] = 1.0
        return cls(n_qubits, amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def copy(self) -> StateVector:
        return StateVector(self.n_qubits, self.amplitudes.copy())

    def tensor(self, other: StateVector) -> StateVector:
        """``self ⊗ other``; ``self`` supplies the leading qubits."""
        return StateVector(self.n_qubits + other.n_qubits,
                           np.kron(self.amplitudes, other.amplitudes))

    def inner(self, other: StateVector) -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))


@lru_cache(maxsize=32)
def _indices(n: int) -> np.ndarray:
    return np.arange(2 ** n, dtype=np.int64)


def _bit(n: int, qubit: int) -> np.ndarray:
    return (_indices(n) >> (n - qubit)) & 1


def _apply_pauli(amps: np.ndarray, string: PauliString) -> np.ndarray:
    n = string.n_qubits
    x_mask, z_mask, n_y = string.masks()
    idx = _indices(n)
    src = idx ^ x_mask
    sign = 1 - 2 * (np.bitwise_count(src & z_mask) & 1).astype(np.int8)
    coeff = 1j ** ((string.phase + n_y) % 4)
    return coeff * sign[:, None] * amps[src]


def _control_mask(n: int, controls, parity: bool) -> np.ndarray:
    bits = [_bit(n, q) for q in controls]
    if parity:
        acc = np.zeros_like(bits[0])
        for b in bits:
            acc ^= b
        return acc.astype(bool)
    return np.logical_and.reduce([b.astype(bool) for b in bits])


def _rotate(amps: np.ndarray, gate) -> np.ndarray:
    q, t = gate.generator()
    return np.cos(t) * amps + 1j * np.sin(t) * _apply_pauli(amps, q)


def apply_gate(amps: np.ndarray, gate: Gate, n: int) -> np.ndarray:
    """Apply one unitary gate to a ``(2**n, batch)`` array."""
    if isinstance(gate, PauliRotation):
        return _rotate(amps, gate)
    if isinstance(gate, ControlledPauliRotation):
        active = _bit(n, gate.control) == (0 if gate.open else 1)
        return np.where(active[:, None], _rotate(amps, gate), amps)
    if isinstance(gate, ControlledPauliString):
        active = _control_mask(n, gate.controls, gate.parity)
        return np.where(active[:, None], _apply_pauli(amps, gate.string), amps)
    if isinstance(gate, Hadamard):
        q = gate.qubit
        view = amps.reshape(2 ** (q - 1), 2, 2 ** (n - q), -1)
        a0, a1 = view[:, 0], view[:, 1]
        out = np.stack(((a0 + a1), (a0 - a1)), axis=1) / np.sqrt(2)
        return out.reshape(amps.shape)
    if isinstance(gate, PhaseGate):
        phase = np.where(_bit(n, gate.qubit) == 1, np.exp(1j * gate.angle), 1.0)
        return phase[:, None] * amps
    if isinstance(gate, Measure):
        raise SimulationError("measurement is not unitary; use run_and_measure")
    raise SimulationError(f"unsupported gate {gate!r}")


def apply_circuit(state: StateVector, c: Circuit) -> StateVector:
    if state.n_qubits != c.n_qubits:
        raise SimulationError(
            f"state has {state.n_qubits} qubits, circuit has {c.n_qubits}")
    if any(isinstance(g, Measure) for g in c.gates):
        raise SimulationError("circuit contains measurements; use run_and_measure")
    amps = state.amplitudes[:, None]
    for g in c.gates:
        amps = apply_gate(amps, g, c.n_qubits)
    return StateVector(c.n_qubits, amps[:, 0])


def circuit_unitary(c: Circuit, guard: int = MATRIX_GUARD) -> np.ndarray:
    """Dense unitary, column ``j`` being the circuit applied to ``|j>``."""
    if c.n_qubits > guard:
        raise GuardExceeded(f"{c.n_qubits} qubits exceeds the dense-matrix guard of {guard}")
    if any(isinstance(g, Measure) for g in c.gates):
        raise SimulationError("circuit contains measurements")
    amps = np.eye(2 ** c.n_qubits, dtype=complex)
    for g in c.gates:
        amps = apply_gate(amps, g, c.n_qubits)
    return amps


def is_unitary(u: np.ndarray, tol: float = 1e-9) -> bool:
    return bool(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) <= tol)


# measurement


def probability_of(state: StateVector, qubit: int, value: int) -> float:
    if not 1 <= qubit <= state.n_qubits:
        raise SimulationError(f"invalid qubit {qubit} for {state.n_qubits}-qubit state")
    mask = _bit(state.n_qubits, qubit) == value
    return float(np.sum(np.abs(state.amplitudes[mask]) ** 2))


def measure_qubit(state: StateVector, qubit: int,
                  rng: np.random.Generator | int | None = None) -> tuple[int, StateVector]:
    """Z-basis measurement with Born-rule sampling and renormalized post-state."""
    rng = np.random.default_rng(rng)
    p1 = probability_of(state, qubit, 1)
    outcome = int(rng.random() < p1)
    keep = _bit(state.n_qubits, qubit) == outcome
    amps = np.where(keep, state.amplitudes, 0.0)
    amps = amps / np.sqrt(p1 if outcome else 1.0 - p1)
    return outcome, StateVector(state.n_qubits, amps)


def measure_all_zero_probability(state: StateVector, qubits) -> float:
    """Probability that every listed qubit reads 0; no sampling."""
    mask = np.ones(2 ** state.n_qubits, dtype=bool)
    for q in qubits:
        if not 1 <= q <= state.n_qubits:
            raise SimulationError(f"invalid qubit {q} for {state.n_qubits}-qubit state")
        mask &= _bit(state.n_qubits, q) == 0
    return float(np.sum(np.abs(state.amplitudes[mask]) ** 2))


def project_all_zero(state: StateVector, qubits) -> StateVector:
    """Post-selected state after all listed qubits read 0 (renormalized)."""
    mask = np.ones(2 ** state.n_qubits, dtype=bool)
    for q in qubits:
        mask &= _bit(state.n_qubits, q) == 0
    amps = np.where(mask, state.amplitudes, 0.0)
    norm = np.linalg.norm(amps)
    if norm == 0:
        raise SimulationError("all-zero outcome has probability 0")
    return StateVector(state.n_qubits, amps / norm)


def run_and_measure(state: StateVector, c: Circuit,
                    rng: np.random.Generator | int | None = None) -> tuple[list[int], StateVector]:
    """Run a circuit that may contain Z-basis measurements; returns the record."""
    rng = np.random.default_rng(rng)
    record = []
    amps = state.amplitudes[:, None]
    for g in c.gates:
        if isinstance(g, Measure):
            if g.basis != "Z":
                raise SimulationError(f"unsupported measurement basis {g.basis!r}")
            bit, post = measure_qubit(StateVector(c.n_qubits, amps[:, 0]), g.qubit, rng)
            record.append(bit)
            amps = post.amplitudes[:, None]
        else:
            amps = apply_gate(amps, g, c.n_qubits)
    return record, StateVector(c.n_qubits, amps[:, 0])


# oracles


def expm(a: np.ndarray, tol: float = 1e-13) -> np.ndarray:
    """Matrix exponential by scaling and squaring with a truncated Taylor series."""
    a = np.asarray(a, dtype=complex)
    norm = np.linalg.norm(a, 1)
    s = max(0, int(np.ceil(np.log2(norm / 0.5))) if norm > 0.5 else 0)
    b = a / 2 ** s
    out = np.eye(a.shape[0], dtype=complex)
    term = out.copy()
    for k in range(1, 200):
        term = term @ b / k
        out = out + term
        if np.max(np.abs(term)) <= tol * max(1.0, np.max(np.abs(out))):
            break
    for _ in range(s):
        out = out @ out
    return out


def exact_lcu_oracle(h, beta, guard: int = MATRIX_GUARD, tol: float = 1e-10) -> np.ndarray:
    """Dense ``exp(i sum_k beta_k h_k)`` for pairwise-anticommuting strings.

    Computes the matrix exponential directly and the closed form
    ``cos(theta) I + i sin(theta)/theta sum_k beta_k h_k``; raises
    :class:`LCUOracleError` if they differ by more than ``tol``.
    """
    h = list(h)
    beta = np.asarray(beta, dtype=float)
    if len(h) != len(beta) or not h:
        raise ValueError("need one coefficient per string")
    n = h[0].n_qubits
    if n > guard:
        raise GuardExceeded(f"{n} qubits exceeds the dense-matrix guard of {guard}")
    mats = [as_matrix(p, guard) for p in h]
    gen = sum(b * m for b, m in zip(beta, mats))
    direct = expm(1j * gen)
    theta = float(np.sqrt(np.sum(beta ** 2)))
    if theta == 0:
        closed = np.eye(2 ** n, dtype=complex)
    else:
        closed = np.cos(theta) * np.eye(2 ** n) + 1j * np.sin(theta) / theta * gen
    err = float(np.max(np.abs(direct - closed)))
    if err > tol:
        pairs = [(i + 1, j + 1) for i in range(len(h)) for j in range(i + 1, len(h))
                 if not anticommutes(h[i], h[j])]
        raise LCUOracleError(
            f"matrix exponential and closed form differ by {err:.3e}"
            + (f"; commuting pairs {pairs}" if pairs else ""))
    return direct


# state dumps


def dump_state(state: StateVector, path) -> None:
    with open(path, "w") as f:
        f.write(f"# n_qubits {state.n_qubits}\n")
        for i, a in enumerate(state.amplitudes):
            if a != 0:
                f.write(f"{i:0{state.n_qubits}b} {float(a.real)!r} {float(a.imag)!r}\n")


def load_state(path) -> StateVector:
    n = None
    entries = []
    with open(path) as f:
        for lineno, line in enumerate(f, 1):
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                parts = line[1:].split()
                if len(parts) == 2 and parts[0] == "n_qubits":
                    n = int(parts[1])
                continue
            try:
                bits, re_, im_ = line.split()
                entries.append((bits, float(re_), float(im_)))
            except ValueError as exc:
                raise SimulationError(f"line {lineno}: cannot parse {line!r}") from exc
    if not entries:
        raise SimulationError("state file has no amplitudes")
    n = n if n is not None else len(entries[0][0])
    amps = np.zeros(2 ** n, dtype=complex)
    for bits, re_, im_ in entries:
        if len(bits) != n or set(bits) - {"0", "1"}:
            raise SimulationError(f"bad basis label {bits!r} for {n} qubits")
        amps[int(bits, 2)] = complex(re_, im_)
    return StateVector(n, amps)
