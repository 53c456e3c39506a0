"""Rotation gadgets for linear combinations of anticommuting Pauli strings.

Given pairwise-anticommuting Hermitian strings ``h_1..h_L`` and real
coefficients ``beta``, both gadgets realize

    exp(i sum_k beta_k h_k) = cos(theta) + i sin(theta)/theta sum_k beta_k h_k

with ``theta = |beta|`` using ``2L - 1`` Pauli-string rotations.

* symmetric: a palindromic product of single-string rotations whose angles
  are generalized Euler angles; linear depth.
* antisymmetric: a central ``h_root`` rotation conjugated by layers of
  pair rotations ``exp(phi/2 h_j h_k)``; logarithmic depth when the pairs
  of a layer act on disjoint qubits.

Angles are indexed like the strings: ``phi[k-1]`` belongs to ``h_k``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .circuit import Circuit, ControlledPauliRotation, PauliRotation
from .encoding import Encoding, EncodingError
from .pauli import PauliString, anticommutes, multiply

SYMMETRIC = "symmetric"
ANTISYMMETRIC = "antisymmetric"

FORWARD_TOL = 1e-10
CLAMP_TOL = 1e-12


class GadgetError(ValueError):
    pass


@dataclass(frozen=True)
class PairingSchedule:
    """Layers of ``(j, k)`` pairs, innermost layer first.

    Each pair rotates ``h_j h_k`` where ``j`` is already in the
    superposition and ``k`` is new. ``root`` is the index of the central
    rotation.
    """

    layers: tuple[tuple[tuple[int, int], ...], ...]
    root: int = 1

    def __post_init__(self):
        object.__setattr__(
            self, "layers", tuple(tuple(tuple(p) for p in layer) for layer in self.layers))

    @property
    def pairs(self) -> list[tuple[int, int]]:
        return [p for layer in self.layers for p in layer]

    def validate(self, n_terms: int) -> None:
        seen = {self.root}
        if not 1 <= self.root <= n_terms:
            raise GadgetError(f"root {self.root} outside 1..{n_terms}")
        for m, layer in enumerate(self.layers, start=1):
            used = [i for p in layer for i in p]
            if len(used) != len(set(used)):
                raise GadgetError(f"layer {m} reuses an index: {layer}")
            for j, k in layer:
                if j not in seen:
                    raise GadgetError(f"layer {m}: {j} is not introduced by an inner layer")
                if k in seen or not 1 <= k <= n_terms:
                    raise GadgetError(f"layer {m}: {k} is not a fresh index")
            seen.update(k for _, k in layer)
        if len(seen) != n_terms:
            missing = sorted(set(range(1, n_terms + 1)) - seen)
            raise GadgetError(f"schedule never introduces {missing}")

    def to_list(self) -> list[list[list[int]]]:
        return [[list(p) for p in layer] for layer in self.layers]


@dataclass(frozen=True)
class GadgetPlan:
    kind: str
    h: tuple[PauliString, ...]
    beta: tuple[float, ...]
    phi: tuple[float, ...]
    schedule: PairingSchedule | None = None
    theta: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "h", tuple(self.h))
        object.__setattr__(self, "beta", tuple(float(b) for b in self.beta))
        object.__setattr__(self, "phi", tuple(float(p) for p in self.phi))
        object.__setattr__(self, "theta", float(np.sqrt(np.sum(np.square(self.beta)))))
        if self.kind not in (SYMMETRIC, ANTISYMMETRIC):
            raise GadgetError(f"unknown gadget kind {self.kind!r}")
        if not (len(self.h) == len(self.beta) == len(self.phi)) or not self.h:
            raise GadgetError("h, beta and phi must have the same nonzero length")
        if self.theta <= 0:
            raise GadgetError("all coefficients are zero")
        for (a, p), (b, q) in combinations(enumerate(self.h, 1), 2):
            if not anticommutes(p, q):
                raise GadgetError(f"h_{a}={p} and h_{b}={q} commute")
        for k, p in enumerate(self.h, 1):
            if not p.is_hermitian():
                raise GadgetError(f"h_{k}={p} is not Hermitian")
        if self.kind == ANTISYMMETRIC:
            if self.schedule is None:
                raise GadgetError("antisymmetric plan needs a pairing schedule")
            self.schedule.validate(len(self.h))

    @property
    def size(self) -> int:
        return len(self.h)

    @property
    def n_qubits(self) -> int:
        return self.h[0].n_qubits

    @property
    def center(self) -> int:
        return self.schedule.root if self.kind == ANTISYMMETRIC else 1

    def forward(self) -> tuple[float, np.ndarray]:
        if self.kind == SYMMETRIC:
            return symmetric_forward(self.phi)
        return antisymmetric_forward(self.phi, self.schedule)

    def to_dict(self) -> dict:
        d = {
            "kind": self.kind,
            "h": [str(p) for p in self.h],
            "beta": list(self.beta),
            "phi": [float(f"{p:.17g}") for p in self.phi],
        }
        if self.schedule is not None:
            d["schedule"] = {"root": self.schedule.root, "layers": self.schedule.to_list()}
        return d

    @classmethod
    def from_dict(cls, d: dict) -> GadgetPlan:
        sched = None
        if "schedule" in d:
            sched = PairingSchedule(d["schedule"]["layers"], d["schedule"]["root"])
        return cls(d["kind"], tuple(PauliString.parse(s) for s in d["h"]),
                   tuple(d["beta"]), tuple(d["phi"]), sched)

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def loads(cls, text: str) -> GadgetPlan:
        return cls.from_dict(json.loads(text))


def qubitization_betas(alpha, tol: float = 1e-10) -> tuple[float, ...]:
    """Coefficients ``(pi/2) sqrt(alpha_k)``, giving ``theta = pi/2``.

    At ``theta = pi/2`` the gadget realizes ``i * sum_k sqrt(alpha_k) h_k``.
    """
    alpha = np.asarray(alpha, dtype=float)
    if alpha.size == 0 or np.any(alpha <= 0):
        raise GadgetError("weights must be positive")
    if abs(alpha.sum() - 1.0) > tol:
        raise GadgetError(f"weights sum to {alpha.sum():.12g}, not 1")
    return tuple(float(b) for b in (np.pi / 2) * np.sqrt(alpha))


def _targets(beta) -> tuple[float, np.ndarray]:
    beta = np.asarray(beta, dtype=float)
    theta = float(np.sqrt(np.sum(beta ** 2)))
    if theta == 0:
        raise GadgetError("all coefficients are zero")
    return math.cos(theta), math.sin(theta) / theta * beta


def _guarded_arcsin(x: float, k: int) -> float:
    if abs(x) > 1 + CLAMP_TOL:
        raise GadgetError(f"infeasible angle system: sin(phi_{k}) = {x!r}")
    return math.asin(max(-1.0, min(1.0, x)))


# symmetric gadget


def symmetric_forward(phi) -> tuple[float, np.ndarray]:
    """Constant and ``h_k`` coefficients (divided by ``i``) of the symmetric product."""
    phi = np.asarray(phi, dtype=float)
    cos = np.cos(phi)
    prefix = np.concatenate(([1.0], np.cumprod(cos)[:-1]))
    return float(np.prod(cos)), np.sin(phi) * prefix


def match_angles_symmetric(beta) -> tuple[float, ...]:
    """Solve ``sin(phi_k) = c_k / prod_{j<k} cos(phi_j)`` front to back.

    ``c_k = beta_k sin(theta)/theta``. The last angle also fixes the sign of
    the constant term, so it is taken from ``atan2`` of both remaining
    targets.
    """
    const, c = _targets(beta)
    L = len(c)
    phi = []
    prefix = 1.0
    for k in range(1, L + 1):
        ck = c[k - 1]
        if prefix < 1e-14:
            # an earlier rotation already spent the whole amplitude
            if abs(ck) > 1e-12:
                raise GadgetError(f"infeasible angle system at phi_{k}")
            phi.append(0.0)
            continue
        if k < L:
            p = _guarded_arcsin(ck / prefix, k)
        else:
            p = math.atan2(ck / prefix, const / prefix)
        phi.append(p)
        prefix *= math.cos(p)
    return tuple(phi)


# antisymmetric gadget


def pairing_schedule_doubling(L: int) -> PairingSchedule:
    """Layer ``m`` pairs every used ``j`` with ``j + 2**(m-1)`` while that is ``<= L``."""
    if L < 1:
        raise GadgetError("need at least one term")
    layers = []
    used = 1
    while used < L:
        layers.append(tuple((j, j + used) for j in range(1, used + 1) if j + used <= L))
        used *= 2
    return PairingSchedule(tuple(layers), root=1)


def pairing_schedule_tree(enc: Encoding) -> PairingSchedule:
    """Two layers per tree level: first children, then the other children."""
    if not enc.is_tree:
        raise GadgetError("encoding lacks a tree structure")
    try:
        levels = enc.levels()
    except EncodingError as exc:
        raise GadgetError(str(exc)) from exc
    layers = []
    for level in levels[:-1]:
        kids = {j: enc.children(j) for j in level}
        width = max(len(v) for v in kids.values())
        for slot in range(width):
            layer = tuple((j, kids[j][slot]) for j in level if len(kids[j]) > slot)
            layers.append(layer)
    return PairingSchedule(tuple(layers), root=enc.root)


def antisymmetric_forward(phi, schedule: PairingSchedule) -> tuple[float, np.ndarray]:
    """Evaluate the fork tree: each pair ``(j, k)`` splits the weight on ``h_j``
    into ``cos(phi_k)`` kept on ``h_j`` and ``sin(phi_k)`` moved to ``h_k``."""
    phi = np.asarray(phi, dtype=float)
    c = np.zeros(len(phi))
    r = schedule.root
    c[r - 1] = math.sin(phi[r - 1])
    for layer in schedule.layers:
        for j, k in layer:
            w = c[j - 1]
            c[j - 1] = w * math.cos(phi[k - 1])
            c[k - 1] = w * math.sin(phi[k - 1])
    return math.cos(phi[r - 1]), c


def match_angles_antisymmetric(beta, schedule: PairingSchedule) -> tuple[float, ...]:
    """Solve the fork-tree angles from the leaves inward.

    In the outermost layer ``tan(phi_k)`` is the ratio of the target
    coefficients of ``h_k`` and ``h_j``; the pair then collapses into a
    single weight on ``h_j`` for the next layer in. The central angle
    matches the remaining weight against ``cos(theta)``.
    """
    const, c = _targets(beta)
    L = len(c)
    schedule.validate(L)
    w = c.copy()
    phi = np.zeros(L)
    for layer in reversed(schedule.layers):
        for j, k in layer:
            cj, ck = w[j - 1], w[k - 1]
            if ck == 0:
                p, merged = 0.0, cj
            elif cj == 0:
                p, merged = math.pi / 2, ck
            else:
                p = math.atan(ck / cj)
                merged = math.copysign(math.hypot(cj, ck), cj)
            phi[k - 1] = p
            w[j - 1] = merged
            w[k - 1] = 0.0
    r = schedule.root
    phi[r - 1] = math.atan2(w[r - 1], const)
    return tuple(float(p) for p in phi)


# plans and circuits


def _check_forward(plan: GadgetPlan, tol: float = FORWARD_TOL):
    const, c = plan.forward()
    want_const, want_c = _targets(plan.beta)
    err = max(abs(const - want_const), float(np.max(np.abs(c - want_c))))
    if err > tol:
        raise GadgetError(f"forward evaluation misses the targets by {err:.3e}")


def make_plan(kind: str, h, beta, schedule: PairingSchedule | None = None) -> GadgetPlan:
    """Solve the angles for ``kind`` and return a checked plan.

    For the antisymmetric kind the doubling schedule is used unless one is
    given.
    """
    h = tuple(h)
    if kind in (SYMMETRIC, "sym"):
        plan = GadgetPlan(SYMMETRIC, h, beta, match_angles_symmetric(beta))
    elif kind in (ANTISYMMETRIC, "anti"):
        schedule = schedule or pairing_schedule_doubling(len(h))
        plan = GadgetPlan(ANTISYMMETRIC, h, beta,
                          match_angles_antisymmetric(beta, schedule), schedule)
    else:
        raise GadgetError(f"unknown gadget kind {kind!r}")
    _check_forward(plan)
    return plan


def build_gadget(plan: GadgetPlan, control: int | None = None) -> Circuit:
    """Time-ordered circuit of the gadget, optionally behind one control qubit.

    Rotations with a zero angle are left out. With a control, the
    circuit is the identity when the control reads 0 and the plain gadget
    when it reads 1.
    """
    n = plan.n_qubits
    h, phi = plan.h, plan.phi
    if control is not None:
        if not 1 <= control <= n:
            raise GadgetError(f"control {control} outside register of size {n}")
        for k, p in enumerate(h, 1):
            if control in p.support():
                raise GadgetError(f"control {control} overlaps the support of h_{k}")
    gates = []
    c = plan.center
    if plan.kind == SYMMETRIC:
        arm = [PauliRotation(h[k - 1], phi[k - 1] / 2)
               for k in range(2, plan.size + 1) if phi[k - 1] != 0]
        gates.extend(reversed(arm))
        gates.append(PauliRotation(h[0], phi[0]))
        if control is not None:
            gates.append(ControlledPauliRotation(control, h[0], math.pi / 2 - phi[0], open=True))
        gates.extend(arm)
        if control is not None:
            gates.append(ControlledPauliRotation(control, h[0], -math.pi / 2, open=True))
    else:
        pair = {k: multiply(h[j - 1], h[k - 1]) for j, k in plan.schedule.pairs}
        for layer in reversed(plan.schedule.layers):
            gates.extend(PauliRotation(pair[k], phi[k - 1] / 2)
                         for _, k in layer if phi[k - 1] != 0)
        if control is None:
            gates.append(PauliRotation(h[c - 1], phi[c - 1]))
        else:
            gates.append(ControlledPauliRotation(control, h[c - 1], phi[c - 1]))
        for layer in plan.schedule.layers:
            gates.extend(PauliRotation(pair[k], -phi[k - 1] / 2)
                         for _, k in layer if phi[k - 1] != 0)
    return Circuit(n, tuple(gates))
