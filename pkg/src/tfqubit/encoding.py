"""Generalized unary encodings of the qubitization register.

An encoding maps each term index ``k`` to a basis bitstring ``mu_k`` and
supplies two families of pairwise-anticommuting Majorana strings with
``gx_k |0..0> = -i gy_k |0..0> = |mu_k>``.

Two constructions are provided: the one-hot (Jordan-Wigner-like) encoding
and the binary-tree encoding, whose strings are built from flip sets
``F(j)`` (``j`` and its direct children) and update sets ``U(k)`` (``k`` and
its ancestors).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations

from .pauli import PauliString, anticommutes, multiply

UNARY = "unary"
BINARY_TREE = "binary-tree"


class EncodingError(ValueError):
    pass


@dataclass(frozen=True)
class Encoding:
    """Basis strings and Majorana strings of a generalized unary encoding.

    ``parent`` is indexed by label (entry 0 unused); the root has parent 0.
    ``flip_sets`` and ``update_sets`` are indexed by ``k - 1``.
    """

    kind: str
    lam: int
    n_qubits: int
    mu: tuple[str, ...]
    gamma_x: tuple[PauliString, ...]
    gamma_y: tuple[PauliString, ...]
    flip_sets: tuple[frozenset[int], ...] | None = None
    update_sets: tuple[frozenset[int], ...] | None = None
    parent: tuple[int, ...] | None = field(default=None)

    @property
    def is_tree(self) -> bool:
        return self.parent is not None

    @property
    def root(self) -> int:
        if self.parent is None:
            raise EncodingError("encoding has no tree structure")
        return next(k for k in range(1, self.lam + 1) if self.parent[k] == 0)

    def children(self, j: int) -> list[int]:
        if self.parent is None:
            raise EncodingError("encoding has no tree structure")
        return sorted(k for k in range(1, self.lam + 1) if self.parent[k] == j)

    def levels(self) -> list[list[int]]:
        """Tree nodes grouped by depth, root level first."""
        out = [[self.root]]
        while True:
            nxt = [c for j in out[-1] for c in self.children(j)]
            if not nxt:
                return out
            out.append(nxt)

    def to_dict(self) -> dict:
        d = {
            "kind": self.kind,
            "lambda": self.lam,
            "n_qubits": self.n_qubits,
            "terms": [
                {"k": k, "mu": self.mu[k - 1], "gamma_x": str(self.gamma_x[k - 1]),
                 "gamma_y": str(self.gamma_y[k - 1])}
                for k in range(1, self.lam + 1)
            ],
        }
        if self.flip_sets is not None:
            for k, t in enumerate(d["terms"], start=1):
                t["flip_set"] = sorted(self.flip_sets[k - 1])
                t["update_set"] = sorted(self.update_sets[k - 1])
        if self.parent is not None:
            d["parent"] = list(self.parent[1:])
        return d

    @classmethod
    def from_dict(cls, d: dict) -> Encoding:
        terms = sorted(d["terms"], key=lambda t: t["k"])
        has_sets = all("flip_set" in t for t in terms)
        return cls(
            kind=d["kind"],
            lam=int(d["lambda"]),
            n_qubits=int(d["n_qubits"]),
            mu=tuple(t["mu"] for t in terms),
            gamma_x=tuple(PauliString.parse(t["gamma_x"]) for t in terms),
            gamma_y=tuple(PauliString.parse(t["gamma_y"]) for t in terms),
            flip_sets=tuple(frozenset(t["flip_set"]) for t in terms) if has_sets else None,
            update_sets=tuple(frozenset(t["update_set"]) for t in terms) if has_sets else None,
            parent=(0, *d["parent"]) if "parent" in d else None,
        )

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def loads(cls, text: str) -> Encoding:
        return cls.from_dict(json.loads(text))


def _unit(n: int, k: int) -> str:
    return "".join("1" if q == k else "0" for q in range(1, n + 1))


def unary_encoding(lam: int) -> Encoding:
    """One-hot encoding: ``mu_k = e_k``, ``gx_k = Z_1..Z_{k-1} X_k``."""
    if lam < 1:
        raise EncodingError("lambda must be at least 1")
    gx, gy = [], []
    for k in range(1, lam + 1):
        tail = {q: "Z" for q in range(1, k)}
        gx.append(PauliString.from_sparse(lam, {**tail, k: "X"}))
        gy.append(PauliString.from_sparse(lam, {**tail, k: "Y"}))
    return Encoding(
        kind=UNARY,
        lam=lam,
        n_qubits=lam,
        mu=tuple(_unit(lam, k) for k in range(1, lam + 1)),
        gamma_x=tuple(gx),
        gamma_y=tuple(gy),
        flip_sets=tuple(frozenset({k}) for k in range(1, lam + 1)),
        update_sets=tuple(frozenset({k}) for k in range(1, lam + 1)),
    )


def perfect_tree_parents(depth: int) -> list[int]:
    """Parent array of the perfect binary tree with ``2**depth - 1`` nodes.

    Built by doubling: two copies of the previous tree, the second shifted
    by its size, joined under a new root carrying the largest label. The
    result is a post-order labeling (every label exceeds its descendants').
    """
    if depth < 1:
        raise EncodingError("tree depth must be at least 1")
    parent = [0, 0]
    for n in range(1, depth):
        size = 2 ** n - 1
        root = 2 ** (n + 1) - 1
        left = parent[1:]
        right = [p + size if p else 0 for p in left]
        parent = [0] + [p or root for p in left] + [p or root for p in right] + [0]
        assert len(parent) == root + 1
    return parent


def pruned_tree_parents(lam: int) -> list[int]:
    """Parent array for arbitrary ``lam``.

    Starts from the smallest perfect tree with at least ``lam`` nodes,
    repeatedly deletes the largest-labeled leaf, then relabels the
    survivors ``1..lam`` in their original order.
    """
    if lam < 1:
        raise EncodingError("lambda must be at least 1")
    full = perfect_tree_parents(lam.bit_length())
    alive = set(range(1, len(full)))
    n_children = {j: 0 for j in alive}
    for k in alive:
        if full[k]:
            n_children[full[k]] += 1
    for _ in range(len(full) - 1 - lam):
        leaf = max(j for j in alive if n_children[j] == 0)
        alive.remove(leaf)
        if full[leaf]:
            n_children[full[leaf]] -= 1
    relabel = {old: new for new, old in enumerate(sorted(alive), start=1)}
    parent = [0] * (lam + 1)
    for old, new in relabel.items():
        parent[new] = relabel[full[old]] if full[old] else 0
    return parent


def _encoding_from_tree(parent: list[int]) -> Encoding:
    lam = len(parent) - 1
    children = {j: [] for j in range(1, lam + 1)}
    for k in range(1, lam + 1):
        if parent[k]:
            children[parent[k]].append(k)
    flip = [frozenset({j, *children[j]}) for j in range(1, lam + 1)]
    update = []
    for k in range(1, lam + 1):
        s, a = {k}, parent[k]
        while a:
            s.add(a)
            a = parent[a]
        update.append(frozenset(s))

    def x_on(qs):
        return PauliString.from_sparse(lam, {q: "X" for q in qs})

    def z_on(qs):
        return PauliString.from_sparse(lam, {q: "Z" for q in qs})

    gx, gy, mu = [], [], []
    parity: set[int] = set()  # symmetric difference of F(j) over j < k
    for k in range(1, lam + 1):
        xs = x_on(update[k - 1])
        gx.append(multiply(xs, z_on(parity)))
        parity ^= flip[k - 1]
        gy.append(multiply(xs, z_on(parity)).times_i())
        mu.append("".join("1" if q in update[k - 1] else "0" for q in range(1, lam + 1)))
    return Encoding(
        kind=BINARY_TREE,
        lam=lam,
        n_qubits=lam,
        mu=tuple(mu),
        gamma_x=tuple(gx),
        gamma_y=tuple(gy),
        flip_sets=tuple(flip),
        update_sets=tuple(update),
        parent=tuple(parent),
    )


def binary_tree_encoding(lam: int) -> Encoding:
    enc = _encoding_from_tree(pruned_tree_parents(lam))
    report = validate_encoding(enc)
    if not report.ok:
        raise EncodingError(f"binary-tree encoding for lambda={lam} is invalid:\n{report}")
    return enc


def make_encoding(kind: str, lam: int) -> Encoding:
    if kind in (UNARY, "u"):
        return unary_encoding(lam)
    if kind in (BINARY_TREE, "tree", "t"):
        return binary_tree_encoding(lam)
    raise EncodingError(f"unknown encoding kind {kind!r}")


# validation


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    counterexample: str | None = None


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[Check, ...]

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def __str__(self) -> str:
        lines = []
        for c in self.checks:
            tail = f"  ({c.counterexample})" if c.counterexample else ""
            lines.append(f"{'PASS' if c.passed else 'FAIL'}  {c.name}{tail}")
        return "\n".join(lines)


def apply_to_zero(p: PauliString) -> tuple[int, str]:
    """Return ``(phase, bits)`` with ``p|0..0> = i**phase |bits>``."""
    phase = p.phase + p.letters.count("Y")
    bits = "".join("1" if c in "XY" else "0" for c in p.letters)
    return phase % 4, bits


def gf2_rank(rows: list[int]) -> int:
    rank, rows = 0, list(rows)
    while rows:
        pivot = rows.pop()
        if not pivot:
            continue
        rank += 1
        low = pivot & -pivot
        rows = [r ^ pivot if r & low else r for r in rows]
    return rank


def validate_encoding(enc: Encoding) -> ValidationReport:
    checks = []
    labeled = [(f"gx_{k}", g) for k, g in enumerate(enc.gamma_x, 1)] + \
              [(f"gy_{k}", g) for k, g in enumerate(enc.gamma_y, 1)]

    bad = None
    if len(enc.gamma_x) != enc.lam or len(enc.gamma_y) != enc.lam or len(enc.mu) != enc.lam:
        bad = f"expected {enc.lam} strings and bitstrings per family"
    else:
        for (na, a), (nb, b) in combinations(labeled, 2):
            if not anticommutes(a, b):
                bad = f"{na}={a} commutes with {nb}={b}"
                break
    checks.append(Check("pairwise anticommutation", bad is None, bad))

    bad = None
    for name, g in labeled:
        sq = multiply(g, g)
        if sq.phase != 0 or sq.weight:
            bad = f"{name}={g} squares to {sq}"
            break
    checks.append(Check("squares to identity", bad is None, bad))

    bad = None
    for k in range(1, min(enc.lam, len(enc.gamma_x), len(enc.gamma_y), len(enc.mu)) + 1):
        target = enc.mu[k - 1]
        if apply_to_zero(enc.gamma_x[k - 1]) != (0, target):
            bad = f"gx_{k}|0> != |{target}>"
            break
        if apply_to_zero(enc.gamma_y[k - 1].times_i(-1)) != (0, target):
            bad = f"-i gy_{k}|0> != |{target}>"
            break
    checks.append(Check("state preparation", bad is None, bad))

    bad = None
    rows = [int(m, 2) for m in enc.mu]
    zero = [k for k, r in enumerate(rows, 1) if r == 0]
    if zero:
        bad = f"mu_{zero[0]} is the all-zero string"
    elif gf2_rank(rows) < len(rows):
        bad = "mu strings are linearly dependent over GF(2)"
    checks.append(Check("mu nonzero and independent", bad is None, bad))

    if enc.flip_sets is not None and enc.update_sets is not None:
        bad = None
        for k in range(1, enc.lam + 1):
            for j in range(1, enc.lam + 1):
                odd = len(enc.update_sets[k - 1] & enc.flip_sets[j - 1]) % 2 == 1
                if odd != (j == k):
                    bad = f"U({k}) vs F({j})"
                    break
            if bad:
                break
        checks.append(Check("flip/update condition", bad is None, bad))

        bad = None
        for k in range(1, enc.lam + 1):
            expect = "".join(
                "1" if q in enc.update_sets[k - 1] else "0" for q in range(1, enc.n_qubits + 1))
            if enc.mu[k - 1] != expect:
                bad = f"mu_{k}={enc.mu[k - 1]} but U({k}) gives {expect}"
                break
        checks.append(Check("update-set parity", bad is None, bad))

    return ValidationReport(tuple(checks))
