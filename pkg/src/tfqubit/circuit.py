"""Gate-list circuits, moment scheduling and the Toffoli-free gate-set check.

Circuits are time-ordered left to right: ``gates[0]`` acts first, so the
unitary of ``compose(a, b)`` is ``U_b @ U_a``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Union

from .pauli import PauliString


class CircuitError(ValueError):
    pass


def _check_control(control: int, string: PauliString):
    if control in string.support():
        raise CircuitError(f"control qubit {control} overlaps target support of {string}")


@dataclass(frozen=True)
class PauliRotation:
    """``exp(angle * P)`` for an anti-Hermitian string (phase ``±i``),
    ``exp(i * angle * P)`` for a Hermitian one (phase ``±1``)."""

    string: PauliString
    angle: float

    def generator(self) -> tuple[PauliString, float]:
        """Return ``(Q, t)`` with ``Q`` unsigned and the gate equal to ``exp(i t Q)``."""
        sign = 1.0 if self.string.phase in (0, 1) else -1.0
        return self.string.unsigned(), sign * self.angle

    def qubits(self) -> frozenset[int]:
        return self.string.support()

    def inverse(self) -> PauliRotation:
        return PauliRotation(self.string, -self.angle)


@dataclass(frozen=True)
class ControlledPauliRotation:
    """Rotation applied when ``control`` reads 1, or 0 when ``open``."""

    control: int
    string: PauliString
    angle: float
    open: bool = False

    def __post_init__(self):
        _check_control(self.control, self.string)

    def generator(self) -> tuple[PauliString, float]:
        return PauliRotation(self.string, self.angle).generator()

    def qubits(self) -> frozenset[int]:
        return self.string.support() | {self.control}

    def inverse(self) -> ControlledPauliRotation:
        return ControlledPauliRotation(self.control, self.string, -self.angle, self.open)


@dataclass(frozen=True)
class ControlledPauliString:
    """Pauli string applied conditionally on a set of control qubits.

    With ``parity=True`` the condition is the joint parity of the controls
    (a single control is the ordinary case). With ``parity=False`` and more
    than one control the condition is the AND of all controls, which is a
    multi-controlled (Toffoli-class) gate.
    """

    controls: tuple[int, ...]
    string: PauliString
    parity: bool = True

    def __post_init__(self):
        if not self.controls:
            raise CircuitError("controlled string needs at least one control")
        if len(set(self.controls)) != len(self.controls):
            raise CircuitError(f"repeated control qubits {self.controls}")
        for c in self.controls:
            _check_control(c, self.string)

    def qubits(self) -> frozenset[int]:
        return self.string.support() | set(self.controls)

    def inverse(self) -> ControlledPauliString:
        return ControlledPauliString(self.controls, self.string.adjoint(), self.parity)


@dataclass(frozen=True)
class Hadamard:
    qubit: int

    def qubits(self) -> frozenset[int]:
        return frozenset({self.qubit})

    def inverse(self) -> Hadamard:
        return self


@dataclass(frozen=True)
class PhaseGate:
    """``diag(1, exp(i angle))`` on one qubit."""

    qubit: int
    angle: float

    def qubits(self) -> frozenset[int]:
        return frozenset({self.qubit})

    def inverse(self) -> PhaseGate:
        return PhaseGate(self.qubit, -self.angle)


@dataclass(frozen=True)
class Measure:
    qubit: int
    basis: str = "Z"

    def qubits(self) -> frozenset[int]:
        return frozenset({self.qubit})

    def inverse(self):
        raise CircuitError("measurement has no inverse")


Gate = Union[PauliRotation, ControlledPauliRotation, ControlledPauliString,
             Hadamard, PhaseGate, Measure]


def cnot(control: int, target: int, n_qubits: int) -> ControlledPauliString:
    return ControlledPauliString((control,), PauliString.from_sparse(n_qubits, {target: "X"}))


def _string_of(g: Gate) -> PauliString | None:
    return getattr(g, "string", None)


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    gates: tuple[Gate, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            s = _string_of(g)
            if s is not None and s.n_qubits != self.n_qubits:
                raise CircuitError(
                    f"gate string on {s.n_qubits} qubits in a {self.n_qubits}-qubit circuit")
            for q in g.qubits():
                if not 1 <= q <= self.n_qubits:
                    raise CircuitError(f"qubit {q} outside register of size {self.n_qubits}")

    def __len__(self) -> int:
        return len(self.gates)

    def __add__(self, other: Circuit) -> Circuit:
        return compose(self, other)

    def inverse(self) -> Circuit:
        return Circuit(self.n_qubits, tuple(g.inverse() for g in reversed(self.gates)))

    def count(self, gate_type) -> int:
        return sum(isinstance(g, gate_type) for g in self.gates)

    def to_dict(self) -> dict:
        return {"n_qubits": self.n_qubits, "gates": [gate_to_dict(g) for g in self.gates]}

    @classmethod
    def from_dict(cls, d: dict) -> Circuit:
        n = int(d["n_qubits"])
        return cls(n, tuple(gate_from_dict(g) for g in d["gates"]))

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def loads(cls, text: str) -> Circuit:
        return cls.from_dict(json.loads(text))


def compose(a: Circuit, b: Circuit) -> Circuit:
    """Run ``a`` then ``b``."""
    if a.n_qubits != b.n_qubits:
        raise CircuitError(f"register size mismatch: {a.n_qubits} vs {b.n_qubits}")
    return Circuit(a.n_qubits, a.gates + b.gates)


def moments(c: Circuit) -> list[list[int]]:
    """Greedy earliest-moment schedule as lists of gate indices.

    A gate lands in the moment after the latest moment used by any of its
    qubits (controls included).
    """
    last: dict[int, int] = {}
    out: list[list[int]] = []
    for i, g in enumerate(c.gates):
        qs = g.qubits()
        m = max((last.get(q, -1) for q in qs), default=-1) + 1
        if m == len(out):
            out.append([])
        out[m].append(i)
        for q in qs:
            last[q] = m
    return out


def depth(c: Circuit) -> int:
    return len(moments(c))


def moment_weights(c: Circuit) -> list[int]:
    """Largest Pauli weight of any rotation/string in each moment (0 if none)."""
    weights = []
    for m in moments(c):
        ws = [_string_of(c.gates[i]).weight for i in m if _string_of(c.gates[i]) is not None]
        weights.append(max(ws, default=0))
    return weights


def depth_report(c: Circuit) -> dict:
    ms = moments(c)
    ws = moment_weights(c)
    return {
        "depth": len(ms),
        "gate_count": len(c),
        "moments": [{"gates": m, "max_weight": w} for m, w in zip(ms, ws)],
    }


def lower_parity_controls(c: Circuit) -> Circuit:
    """Rewrite each parity-controlled string with a CNOT ladder.

    For sorted controls ``c1 < ... < cm`` the ladder ``c1->c2, ..., c(m-1)->cm``
    leaves the joint parity on ``cm``; a singly controlled string follows,
    then the ladder is undone.
    """
    out: list[Gate] = []
    n = c.n_qubits
    for g in c.gates:
        if isinstance(g, ControlledPauliString) and g.parity and len(g.controls) > 1:
            cs = sorted(g.controls)
            ladder = [cnot(a, b, n) for a, b in zip(cs, cs[1:])]
            out.extend(ladder)
            out.append(ControlledPauliString((cs[-1],), g.string))
            out.extend(reversed(ladder))
        else:
            out.append(g)
    return Circuit(n, tuple(out))


def validate_toffoli_free(c: Circuit) -> tuple[bool, list[tuple[int, Gate]]]:
    """Check that nothing needs a multi-controlled primitive.

    Returns ``(ok, offenders)`` with offenders as ``(gate index, gate)``.
    Parity-controlled strings pass: they lower to CNOTs plus one singly
    controlled string.
    """
    offenders = []
    for i, g in enumerate(c.gates):
        if isinstance(g, ControlledPauliString):
            if not g.parity and len(g.controls) > 1:
                offenders.append((i, g))
        elif not isinstance(g, (PauliRotation, ControlledPauliRotation, Hadamard,
                                PhaseGate, Measure)):
            offenders.append((i, g))
    return not offenders, offenders


# serialization: one record per gate


def gate_to_dict(g: Gate) -> dict:
    if isinstance(g, PauliRotation):
        return {"type": "rot", "string": str(g.string), "angle": g.angle}
    if isinstance(g, ControlledPauliRotation):
        return {"type": "crot", "control": g.control, "open": g.open,
                "string": str(g.string), "angle": g.angle}
    if isinstance(g, ControlledPauliString):
        return {"type": "cstring", "controls": list(g.controls), "parity": g.parity,
                "string": str(g.string)}
    if isinstance(g, Hadamard):
        return {"type": "h", "qubit": g.qubit}
    if isinstance(g, PhaseGate):
        return {"type": "phase", "qubit": g.qubit, "angle": g.angle}
    if isinstance(g, Measure):
        return {"type": "measure", "qubit": g.qubit, "basis": g.basis}
    raise CircuitError(f"cannot serialize {g!r}")


def gate_from_dict(d: dict) -> Gate:
    t = d["type"]
    if t == "rot":
        return PauliRotation(PauliString.parse(d["string"]), float(d["angle"]))
    if t == "crot":
        return ControlledPauliRotation(int(d["control"]), PauliString.parse(d["string"]),
                                       float(d["angle"]), bool(d.get("open", False)))
    if t == "cstring":
        return ControlledPauliString(tuple(d["controls"]), PauliString.parse(d["string"]),
                                     bool(d.get("parity", True)))
    if t == "h":
        return Hadamard(int(d["qubit"]))
    if t == "phase":
        return PhaseGate(int(d["qubit"]), float(d["angle"]))
    if t == "measure":
        return Measure(int(d["qubit"]), d.get("basis", "Z"))
    raise CircuitError(f"unknown gate type {t!r}")
