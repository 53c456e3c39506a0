"""End-to-end runs: single-ancilla energy readout, eigenstate recovery and
depth-scaling tables."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .circuit import Circuit, Hadamard, PhaseGate, compose, depth, moment_weights
from .compile import (CompiledBlock, Hamiltonian, compile_G, compile_walk,
                      normalize_hamiltonian)
from .encoding import Encoding, make_encoding
from .pauli import PauliString
from .simulate import (MATRIX_GUARD, STATE_GUARD, GuardExceeded, StateVector, apply_circuit,
                       circuit_unitary, measure_all_zero_probability, probability_of,
                       project_all_zero)

EXACT = "exact"
SAMPLED = "sampled"


class HarnessError(ValueError):
    pass


@dataclass(frozen=True)
class EstimationResult:
    mode: str
    shots: int | None
    p_zero: float
    energy_estimate: float
    rescaled_energy: float
    histogram: dict[str, int] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class RecoveryResult:
    flag_probability: float
    post_state_fidelity: float
    walk_eigenphase: float
    energy: float

    def to_dict(self) -> dict:
        return asdict(self)


def _check_inputs(H: Hamiltonian, enc: Encoding, trial: StateVector):
    if enc.lam != H.lam:
        raise HarnessError(f"encoding has {enc.lam} terms, Hamiltonian has {H.lam}")
    if trial.n_qubits != H.n_sim:
        raise HarnessError(f"trial state has {trial.n_qubits} qubits, sim register {H.n_sim}")
    if abs(trial.norm() - 1.0) > 1e-10:
        raise HarnessError(f"trial state has norm {trial.norm():.12g}")


def readout_circuit(block: CompiledBlock) -> Circuit:
    """Estimator ``|+>``, walk, ledger-phase correction, Hadamard."""
    n, est = block.layout.n_qubits, block.layout.estimator
    circ = Circuit(n, (Hadamard(est),))
    circ = compose(circ, block.circuit)
    tail = (PhaseGate(est, -float(np.angle(block.global_phase))), Hadamard(est))
    return compose(circ, Circuit(n, tail))


def estimate_energy(H: Hamiltonian, enc: Encoding, kind: str, trial: StateVector,
                    mode: str = EXACT, shots: int = 10_000,
                    seed: int | None = None) -> EstimationResult:
    """Single-ancilla readout of ``<walk>``; ``P(0) = (1 + <trial|H|trial>) / 2``."""
    _check_inputs(H, enc, trial)
    block = compile_walk(enc, H, kind)
    lay = block.layout
    if lay.n_qubits > STATE_GUARD:
        raise GuardExceeded(
            f"instance too large for exact verification: {lay.n_qubits} qubits "
            f"(limit {STATE_GUARD})")
    start = StateVector.zero(1 + len(lay.qubitization)).tensor(trial)
    final = apply_circuit(start, readout_circuit(block))
    p_zero = min(1.0, max(0.0, probability_of(final, lay.estimator, 0)))
    if mode == EXACT:
        p_hat, n_shots, hist = p_zero, None, {}
    elif mode in (SAMPLED, "sample"):
        if shots < 1:
            raise HarnessError("need at least one shot")
        zeros = int(np.random.default_rng(seed).binomial(shots, p_zero))
        p_hat, n_shots, hist = zeros / shots, shots, {"0": zeros, "1": shots - zeros}
        mode = SAMPLED
    else:
        raise HarnessError(f"unknown mode {mode!r}")
    energy = 2 * p_hat - 1
    return EstimationResult(mode, n_shots, p_hat, energy, energy * H.scale, hist)


def _eigenspaces(w: np.ndarray, tol: float = 1e-8) -> list[tuple[complex, np.ndarray]]:
    """Orthonormal bases of the eigenspaces of a unitary, grouped by eigenvalue."""
    vals, vecs = np.linalg.eig(w)
    groups: list[tuple[complex, list[int]]] = []
    for i, v in enumerate(vals):
        for g in groups:
            if abs(g[0] - v) < tol:
                g[1].append(i)
                break
        else:
            groups.append((v, [i]))
    out = []
    for v, idx in groups:
        q, _ = np.linalg.qr(vecs[:, idx])
        out.append((complex(np.mean(vals[idx])), q))
    return out


def recover_eigenstate(H: Hamiltonian, enc: Encoding, kind: str, trial: StateVector,
                       seed: int | None = None) -> RecoveryResult:
    """Flag probability and post-flag fidelity after an ideal phase readout.

    The phase-estimation outcome is modeled as the projection of
    ``|0..0> ⊗ trial`` onto one eigenspace of the corrected walk block
    ``G S V G`` (sampled with ``seed``). The block ends with ``G``, so the
    qubitization register is then measured directly; reading all zeros
    flags the sim register.
    """
    _check_inputs(H, enc, trial)
    block = compile_walk(enc, H, kind)
    lay = block.layout
    if lay.n_qubits > MATRIX_GUARD:
        raise GuardExceeded(
            f"instance too large for exact verification: {lay.n_qubits} qubits "
            f"(limit {MATRIX_GUARD})")
    u = circuit_unitary(block.circuit)
    d = u.shape[0] // 2
    walk = u[d:, d:] / block.global_phase
    n_rest = lay.n_qubits - 1
    start = StateVector.zero(len(lay.qubitization)).tensor(trial).amplitudes

    spaces = _eigenspaces(walk)
    weights = np.array([np.linalg.norm(q.conj().T @ start) ** 2 for _, q in spaces])
    weights = weights / weights.sum()
    pick = int(np.random.default_rng(seed).choice(len(spaces), p=weights))
    val, q = spaces[pick]
    post = StateVector(n_rest, q @ (q.conj().T @ start) / np.sqrt(weights[pick]))

    qub = [i - 1 for i in lay.qubitization]
    flag = measure_all_zero_probability(post, qub)
    energy = float(np.real(val))
    if flag < 1e-12:
        return RecoveryResult(flag, 0.0, float(np.angle(val)), energy)
    sim = project_all_zero(post, qub).amplitudes.reshape(2 ** len(qub), -1)[0]

    # target: the trial's component in the eigenspace of H with this energy
    evals, evecs = np.linalg.eigh(H.matrix())
    near = np.abs(evals - energy) < 1e-7
    target = evecs[:, near] @ (evecs[:, near].conj().T @ trial.amplitudes)
    fidelity = 0.0
    if np.linalg.norm(target) > 1e-12:
        target = target / np.linalg.norm(target)
        fidelity = float(abs(np.vdot(target, sim)) ** 2)
    return RecoveryResult(flag, fidelity, float(np.angle(val)), energy)


@dataclass(frozen=True)
class DepthRow:
    lam: int
    gadget_depth: int
    max_rotation_weight: int
    walk_depth: int

    def to_dict(self) -> dict:
        return asdict(self)


def synthetic_hamiltonian(lam: int) -> Hamiltonian:
    """Uniform weights on ``Z_k`` of a ``lam``-qubit sim register."""
    return normalize_hamiltonian(
        [(1.0, PauliString.from_sparse(lam, {k: "Z"})) for k in range(1, lam + 1)])


def depth_row(enc: Encoding, H: Hamiltonian, kind: str) -> DepthRow:
    g = compile_G(enc, H, kind).circuit
    walk = compile_walk(enc, H, kind).circuit
    return DepthRow(enc.lam, depth(g), max(moment_weights(g), default=0), depth(walk))


def depth_report(encoding_kind: str, gadget_kind: str, lambdas) -> list[DepthRow]:
    """Moment counts of the ``g^x`` gadget and of the walk for each ``lambda``."""
    rows = []
    for lam in lambdas:
        rows.append(depth_row(make_encoding(encoding_kind, lam), synthetic_hamiltonian(lam),
                              gadget_kind))
    return rows


def ground_state(H: Hamiltonian) -> tuple[float, StateVector]:
    if H.n_sim > MATRIX_GUARD:
        raise GuardExceeded(
            f"instance too large for exact verification: {H.n_sim} sim qubits "
            f"(limit {MATRIX_GUARD})")
    evals, evecs = np.linalg.eigh(H.matrix())
    return float(evals[0]), StateVector(H.n_sim, evecs[:, 0])
