"""Assembly of the prepare, reflect and select blocks and the walk circuit.

Register layout (1-based, left to right): the estimator qubit when present,
then the qubitization register, then the simulation register.

Global phases are kept as exponents ``k`` of ``i**k``:

* ``G``: the gadget at ``theta = pi/2`` realizes ``i g^x``.
* ``S``: two gadgets give ``(i g^y)(i g^x) = -i (-i g^y g^x)``.
* walk, power ``m``: the estimator-``|1>`` block is ``-(-i)**m G (S V)**m G``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, ControlledPauliString, compose
from .encoding import Encoding
from .gadget import (ANTISYMMETRIC, SYMMETRIC, GadgetPlan, build_gadget, make_plan,
                     pairing_schedule_doubling, pairing_schedule_tree, qubitization_betas)
from .pauli import PauliString, as_matrix

PHASE_NAMES = {0: "+1", 1: "+i", 2: "-1", 3: "-i"}


class CompileError(ValueError):
    pass


@dataclass(frozen=True)
class Hamiltonian:
    """``H = sum_k alpha_k p_k`` with ``alpha_k > 0`` summing to one.

    Signs live in the string phases; ``scale`` is the 1-norm of the raw
    coefficients, so the physical operator is ``scale * H``.
    """

    terms: tuple[tuple[float, PauliString], ...]
    scale: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple((float(a), p) for a, p in self.terms))
        if not self.terms:
            raise CompileError("Hamiltonian has no terms")
        n = self.terms[0][1].n_qubits
        seen = set()
        for a, p in self.terms:
            if a <= 0:
                raise CompileError(f"non-positive weight {a} on {p}")
            if p.n_qubits != n:
                raise CompileError("terms act on registers of different sizes")
            if not p.is_hermitian():
                raise CompileError(f"term {p} is not Hermitian")
            if p.letters in seen:
                raise CompileError(f"duplicate term {p.letters}")
            seen.add(p.letters)
        if abs(sum(self.alphas) - 1.0) > 1e-10:
            raise CompileError(f"weights sum to {sum(self.alphas):.12g}, not 1")
        if self.scale <= 0:
            raise CompileError("scale must be positive")

    @property
    def lam(self) -> int:
        return len(self.terms)

    @property
    def n_sim(self) -> int:
        return self.terms[0][1].n_qubits

    @property
    def alphas(self) -> tuple[float, ...]:
        return tuple(a for a, _ in self.terms)

    @property
    def strings(self) -> tuple[PauliString, ...]:
        return tuple(p for _, p in self.terms)

    def matrix(self, guard: int = 12) -> np.ndarray:
        return sum(a * as_matrix(p, guard) for a, p in self.terms)


def normalize_hamiltonian(raw_terms, n_sim: int | None = None) -> Hamiltonian:
    """Merge duplicate strings, fold signs into the strings and normalize.

    ``raw_terms`` holds ``(coefficient, PauliString)`` pairs with Hermitian
    strings; a string's own sign multiplies its coefficient.
    """
    merged: dict[str, float] = {}
    for coeff, p in raw_terms:
        if not p.is_hermitian():
            raise CompileError(f"term {p} is not Hermitian")
        if n_sim is not None and p.n_qubits != n_sim:
            raise CompileError(f"term {p} does not act on {n_sim} qubits")
        merged[p.letters] = merged.get(p.letters, 0.0) + float(coeff) * p.coefficient.real
    merged = {k: v for k, v in merged.items() if v != 0.0}
    if not merged:
        raise CompileError("all coefficients are zero")
    scale = sum(abs(v) for v in merged.values())
    terms = tuple(
        (abs(v) / scale, PauliString(letters, 0 if v > 0 else 2))
        for letters, v in merged.items())
    return Hamiltonian(terms, scale)


@dataclass(frozen=True)
class Layout:
    n_qubits: int
    estimator: int | None
    qubitization: tuple[int, ...]
    sim: tuple[int, ...]

    @classmethod
    def build(cls, n_qub: int, n_sim: int, estimator: bool) -> Layout:
        off = 1 if estimator else 0
        qub = tuple(range(off + 1, off + n_qub + 1))
        sim = tuple(range(off + n_qub + 1, off + n_qub + n_sim + 1))
        return cls(off + n_qub + n_sim, 1 if estimator else None, qub, sim)

    def to_dict(self) -> dict:
        return {"n_qubits": self.n_qubits, "estimator": self.estimator,
                "qubitization": list(self.qubitization), "sim": list(self.sim)}

    @classmethod
    def from_dict(cls, d: dict) -> Layout:
        return cls(int(d["n_qubits"]), d["estimator"], tuple(d["qubitization"]), tuple(d["sim"]))


@dataclass(frozen=True)
class CompiledBlock:
    """A circuit equal to ``i**phase`` times its target operator."""

    circuit: Circuit
    layout: Layout
    phase: int
    encoding: str
    gadget: str | None = None

    @property
    def global_phase(self) -> complex:
        return 1j ** (self.phase % 4)

    def to_dict(self) -> dict:
        return {
            "ledger": {
                "global_phase": PHASE_NAMES[self.phase % 4],
                "encoding": self.encoding,
                "gadget": self.gadget,
                "layout": self.layout.to_dict(),
            },
            "circuit": self.circuit.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> CompiledBlock:
        led = d["ledger"]
        phase = {v: k for k, v in PHASE_NAMES.items()}[led["global_phase"]]
        return cls(Circuit.from_dict(d["circuit"]), Layout.from_dict(led["layout"]),
                   phase, led["encoding"], led.get("gadget"))

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def loads(cls, text: str) -> CompiledBlock:
        return cls.from_dict(json.loads(text))


def _check(enc: Encoding, H: Hamiltonian):
    if enc.lam != H.lam:
        raise CompileError(f"encoding has {enc.lam} terms, Hamiltonian has {H.lam}")


def _canonical_kind(kind: str) -> str:
    if kind in (SYMMETRIC, "sym"):
        return SYMMETRIC
    if kind in (ANTISYMMETRIC, "anti"):
        return ANTISYMMETRIC
    raise CompileError(f"unknown gadget kind {kind!r}")


def gadget_plan(enc: Encoding, H: Hamiltonian, kind: str, family: str,
                layout: Layout) -> GadgetPlan:
    """Plan for ``g^x`` (``family="x"``) or ``g^y`` on ``layout``.

    Antisymmetric gadgets follow the tree schedule on tree encodings and
    the doubling schedule otherwise.
    """
    kind = _canonical_kind(kind)
    gammas = enc.gamma_x if family == "x" else enc.gamma_y
    off = layout.qubitization[0] - 1
    h = [g.embed(layout.n_qubits, off) for g in gammas]
    schedule = None
    if kind == ANTISYMMETRIC:
        schedule = pairing_schedule_tree(enc) if enc.is_tree else pairing_schedule_doubling(enc.lam)
    return make_plan(kind, h, qubitization_betas(H.alphas), schedule)


def _select_circuit(enc: Encoding, H: Hamiltonian, layout: Layout) -> Circuit:
    off = layout.sim[0] - 1 if layout.sim else layout.n_qubits
    qub = layout.qubitization
    gates = []
    for k, p in enumerate(H.strings, 1):
        controls = tuple(qub[q - 1] for q in sorted(enc.flip_sets[k - 1]))
        gates.append(ControlledPauliString(controls, p.embed(layout.n_qubits, off)))
    return Circuit(layout.n_qubits, tuple(gates))


def compile_G(enc: Encoding, H: Hamiltonian, kind: str, control: bool = False,
              layout: Layout | None = None) -> CompiledBlock:
    """Prepare block ``G = g^x``; ``|0..0> -> i sum_k sqrt(alpha_k) |mu_k>``."""
    _check(enc, H)
    layout = layout or Layout.build(enc.n_qubits, 0, control)
    plan = gadget_plan(enc, H, kind, "x", layout)
    circ = build_gadget(plan, layout.estimator if control else None)
    return CompiledBlock(circ, layout, 1, enc.kind, plan.kind)


def compile_S(enc: Encoding, H: Hamiltonian, kind: str,
              layout: Layout | None = None) -> CompiledBlock:
    """Reflection ``S = -i g^y g^x`` as the ``g^x`` gadget followed by the ``g^y`` gadget."""
    _check(enc, H)
    layout = layout or Layout.build(enc.n_qubits, 0, False)
    gx = build_gadget(gadget_plan(enc, H, kind, "x", layout))
    gy = build_gadget(gadget_plan(enc, H, kind, "y", layout))
    return CompiledBlock(compose(gx, gy), layout, 3, enc.kind, _canonical_kind(kind))


def compile_V(enc: Encoding, H: Hamiltonian, layout: Layout | None = None) -> CompiledBlock:
    """Select block: ``p_k`` on the sim register conditioned on the parity of ``F(k)``.

    For the one-hot encoding ``F(k) = {k}`` and every string has one control.
    """
    _check(enc, H)
    if enc.flip_sets is None:
        raise CompileError("encoding carries no flip sets")
    layout = layout or Layout.build(enc.n_qubits, H.n_sim, False)
    return CompiledBlock(_select_circuit(enc, H, layout), layout, 0, enc.kind)


def compile_walk(enc: Encoding, H: Hamiltonian, kind: str, power: int = 1) -> CompiledBlock:
    """Phase-estimation block: identity for estimator ``|0>`` (with the
    qubitization register in ``|0..0>``), ``G (S V)**power G`` up to the
    ledger phase for estimator ``|1>``.

    Adjacent ``g^x`` pairs of ``G S V G S V ... G`` cancel, leaving
    ``c-g^x, V, (c-g^x, c-g^y, V) * (power - 1), c-g^y``.
    """
    _check(enc, H)
    if power < 1:
        raise CompileError("walk power must be at least 1")
    layout = Layout.build(enc.n_qubits, H.n_sim, True)
    gx = build_gadget(gadget_plan(enc, H, kind, "x", layout), layout.estimator)
    gy = build_gadget(gadget_plan(enc, H, kind, "y", layout), layout.estimator)
    v = _select_circuit(enc, H, layout)
    circ = compose(gx, v)
    for _ in range(power - 1):
        circ = compose(compose(compose(circ, gx), gy), v)
    circ = compose(circ, gy)
    return CompiledBlock(circ, layout, (2 + 3 * power) % 4, enc.kind, _canonical_kind(kind))
