"""Command-line entry point.

Hamiltonian files are line based::

    # comment
    n_sim 2          (optional)
    0.5  XX
    -0.25 ZI

Exit codes: 0 success, 1 parse or validation failure, 2 guard exceeded.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .circuit import depth, depth_report as circuit_depth_report, lower_parity_controls
from .circuit import validate_toffoli_free
from .compile import CompileError, Hamiltonian, compile_G, compile_walk, normalize_hamiltonian
from .encoding import EncodingError, make_encoding, validate_encoding
from .gadget import GadgetError
from .harness import (HarnessError, depth_report, depth_row, estimate_energy, ground_state,
                      recover_eigenstate)
from .pauli import PauliError, PauliString
from .simulate import GuardExceeded, SimulationError, load_state

EXIT_OK, EXIT_INVALID, EXIT_GUARD = 0, 1, 2


class ParseError(ValueError):
    pass


def parse_hamiltonian_text(text: str) -> Hamiltonian:
    n_sim = None
    raw = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "n_sim":
            if len(parts) != 2 or not parts[1].isdigit() or int(parts[1]) < 1:
                raise ParseError(f"line {lineno}: bad n_sim declaration {line!r}")
            n_sim = int(parts[1])
            continue
        if len(parts) != 2:
            raise ParseError(f"line {lineno}: expected '<coeff> <pauli>', got {line!r}")
        try:
            coeff = float(parts[0])
        except ValueError:
            raise ParseError(f"line {lineno}: bad coefficient {parts[0]!r}") from None
        try:
            p = PauliString.parse(parts[1])
        except PauliError as e:
            raise ParseError(f"line {lineno}: bad Pauli string {parts[1]!r} ({e})") from None
        if not p.is_hermitian():
            raise ParseError(f"line {lineno}: Pauli string {parts[1]!r} is not Hermitian")
        if raw and p.n_qubits != raw[0][1].n_qubits:
            raise ParseError(f"line {lineno}: {parts[1]!r} has {p.n_qubits} qubits, "
                             f"expected {raw[0][1].n_qubits}")
        raw.append((coeff, p))
    if not raw:
        raise ParseError("no terms")
    try:
        return normalize_hamiltonian(raw, n_sim)
    except CompileError as e:
        raise ParseError(str(e)) from None


def load_hamiltonian(path) -> Hamiltonian:
    return parse_hamiltonian_text(Path(path).read_text())


def _energy_lines(label: str, normalized: float, scale: float) -> list[str]:
    return [f"{label} (normalized): {normalized:.12f}",
            f"{label} (rescaled, scale {scale:.12g}): {normalized * scale:.12f}"]


def cmd_validate(args) -> int:
    H = load_hamiltonian(args.path)
    print(f"terms: {H.lam}  sim qubits: {H.n_sim}  scale: {H.scale:.12g}")
    ok = True
    for kind in ("unary", "tree"):
        report = validate_encoding(make_encoding(kind, H.lam))
        print(f"[{kind}]")
        print(report)
        ok &= report.ok
    return EXIT_OK if ok else EXIT_INVALID


def cmd_compile(args) -> int:
    H = load_hamiltonian(args.path)
    enc = make_encoding(args.encoding, H.lam)
    block = compile_walk(enc, H, args.gadget)
    gx = compile_G(enc, H, args.gadget)
    ok, offenders = validate_toffoli_free(lower_parity_controls(block.circuit))
    out = Path(args.out)
    out.write_text(block.dumps())
    report = circuit_depth_report(block.circuit)
    report["gadget_depth"] = depth(gx.circuit)
    report["row"] = depth_row(enc, H, args.gadget).to_dict()
    out.with_name(out.name + ".depth.json").write_text(json.dumps(report, indent=1))
    print(f"gate count: {len(block.circuit)}")
    print(f"walk depth: {depth(block.circuit)}")
    print(f"gadget depth: {depth(gx.circuit)}")
    print(f"global phase: {block.to_dict()['ledger']['global_phase']}")
    print(f"toffoli-free: {str(ok).lower()}")
    for i, g in offenders:
        print(f"  offender {i}: {g}")
    print(f"wrote {out}")
    return EXIT_OK if ok else EXIT_INVALID


def _trial(args, H: Hamiltonian):
    if args.trial == "ground":
        return ground_state(H)[1]
    return load_state(args.trial)


def cmd_estimate(args) -> int:
    H = load_hamiltonian(args.path)
    enc = make_encoding(args.encoding, H.lam)
    res = estimate_energy(H, enc, args.gadget, _trial(args, H), args.mode, args.shots, args.seed)
    print(f"mode: {res.mode}")
    if res.shots is not None:
        print(f"shots: {res.shots}  histogram: {json.dumps(res.histogram)}")
    print(f"p_zero: {res.p_zero:.12f}")
    for line in _energy_lines("energy", res.energy_estimate, H.scale):
        print(line)
    return EXIT_OK


def cmd_recover(args) -> int:
    H = load_hamiltonian(args.path)
    enc = make_encoding(args.encoding, H.lam)
    res = recover_eigenstate(H, enc, args.gadget, _trial(args, H), args.seed)
    print(f"flag probability: {res.flag_probability:.12f}")
    print(f"post-flag fidelity: {res.post_state_fidelity:.12f}")
    for line in _energy_lines("energy", res.energy, H.scale):
        print(line)
    return EXIT_OK


def cmd_depth(args) -> int:
    lambdas = [int(x) for x in args.lambdas.split(",") if x.strip()]
    print(f"{'lambda':>7} {'gadget_depth':>13} {'max_weight':>11} {'walk_depth':>11}")
    for row in depth_report(args.encoding, args.gadget, lambdas):
        print(f"{row.lam:>7} {row.gadget_depth:>13} {row.max_rotation_weight:>11} "
              f"{row.walk_depth:>11}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tfqubit", description="Toffoli-free qubitization toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, path=True):
        if path:
            p.add_argument("path", help="Hamiltonian file")
        p.add_argument("--encoding", choices=["unary", "tree"], default="unary")
        p.add_argument("--gadget", choices=["sym", "anti"], default="anti")

    p = sub.add_parser("validate", help="parse a Hamiltonian and check both encodings")
    p.add_argument("path")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("compile", help="write the walk circuit and its phase ledger")
    common(p)
    p.add_argument("--out", default="walk.json")
    p.set_defaults(func=cmd_compile)

    for name, func, text in (("estimate", cmd_estimate, "energy readout from the walk"),
                             ("recover", cmd_recover, "flagged eigenstate recovery")):
        p = sub.add_parser(name, help=text)
        common(p)
        p.add_argument("--trial", default="ground", help="'ground' or a state dump file")
        p.add_argument("--seed", type=int, default=None)
        if name == "estimate":
            p.add_argument("--mode", choices=["exact", "sample"], default="exact")
            p.add_argument("--shots", type=int, default=10_000)
        p.set_defaults(func=func)

    p = sub.add_parser("depth", help="depth-scaling table")
    common(p, path=False)
    p.add_argument("--lambdas", default="3,7,15")
    p.set_defaults(func=cmd_depth)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except GuardExceeded as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_GUARD
    except (ParseError, PauliError, EncodingError, CompileError, GadgetError, HarnessError,
            SimulationError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
