"""Group specifications: finite descriptions of closed subgroups of Aut(T).

``Universal``  all type-preserving automorphisms whose local action at each
               vertex lies in the group prescribed for its type
``KClosure``   the k-closure of the inner group
``PlusK``      the subgroup generated by pointwise stabilizers of
               (k-1)-balls around edges

Text syntax (one line)::

    universal [base=<file>] a=Sym(3) b=<(1 2)>
    kclosure k=2 of <spec>
    plusk k=1 of <spec>
    preset valency1 | t3sym | t3alt | t3triv | t3intrans
"""
from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Union

from .eig import EdgeIndexedGraph
from .errors import DomainError
from .permgrp import PermGroup, block_product, parse_group, symmetric_group, trivial_group
from .portrait import Portrait
from .tree import star_layouts
from .universal import UniversalAction


@dataclass(frozen=True, eq=False)
class Universal:
    base: EdgeIndexedGraph
    local: tuple[PermGroup, ...]
    labels: tuple[str, ...] = ()

    @cached_property
    def action(self) -> UniversalAction:
        return UniversalAction(self.base, self.local)

    def __str__(self) -> str:
        labels = self.labels or tuple(str(G) for G in self.local)
        return "universal " + " ".join(
            f"{nm}={lab}" for nm, lab in zip(self.base.names, labels)
        )


@dataclass(frozen=True, eq=False)
class KClosure:
    inner: "GroupSpec"
    k: int

    def __post_init__(self):
        if self.k < 1:
            raise DomainError("k-closure wrapper needs k >= 1")

    @property
    def base(self) -> EdgeIndexedGraph:
        return self.inner.base

    def __str__(self) -> str:
        return f"kclosure k={self.k} of {self.inner}"


@dataclass(frozen=True, eq=False)
class PlusK:
    inner: "GroupSpec"
    k: int

    def __post_init__(self):
        if self.k < 1:
            raise DomainError("+_k wrapper needs k >= 1")

    @property
    def base(self) -> EdgeIndexedGraph:
        return self.inner.base

    def __str__(self) -> str:
        return f"plusk k={self.k} of {self.inner}"


GroupSpec = Union[Universal, KClosure, PlusK]


def block_group(base: EdgeIndexedGraph, q: int) -> PermGroup:
    """Largest local group allowed at type ``q``: symmetric on each dart block."""
    lay = star_layouts(base)[q]
    return block_product(*(symmetric_group(len(b)) for b in lay.blocks()))


def make_universal(base: EdgeIndexedGraph, assignments: dict) -> Universal:
    """Validate local groups per vertex type; unassigned types get the full block group."""
    layouts = star_layouts(base)
    groups, labels = [], []
    for key in assignments:
        base.vertex(key)
    for q, name in enumerate(base.names):
        G = assignments.get(name, assignments.get(q))
        label = None
        if isinstance(G, str):
            label = G
            G = parse_group(G, layouts[q].degree)
        if G is None:
            G = block_group(base, q)
            label = "*".join(f"Sym({len(b)})" for b in layouts[q].blocks())
        deg = layouts[q].degree
        if G.degree != deg:
            raise DomainError(
                f"type {name}: local group has degree {G.degree}, upstairs degree is {deg}"
            )
        for block in layouts[q].blocks():
            if not G.preserves(block):
                raise DomainError(f"type {name}: local group does not preserve block {block}")
        groups.append(G)
        labels.append(label or str(G))
    return Universal(base, tuple(groups), tuple(labels))


def required_margin(spec: GroupSpec) -> int:
    if isinstance(spec, Universal):
        return 0
    return required_margin(spec.inner) + spec.k


def innermost(spec: GroupSpec) -> Universal:
    while not isinstance(spec, Universal):
        spec = spec.inner
    return spec


def effective_universal(spec: GroupSpec) -> Universal | None:
    """The universal group equal to ``spec`` when every wrapper is a k-closure.

    A group defined by local actions is 1-closed, hence k-closed for every
    k >= 1, so k-closure wrappers around it change nothing.
    """
    while isinstance(spec, KClosure):
        spec = spec.inner
    return spec if isinstance(spec, Universal) else None


def spec_key(spec: GroupSpec) -> str:
    """Canonical serialization (element sets, not labels) used for hashing."""
    if isinstance(spec, Universal):
        parts = [spec.base.fingerprint()]
        for G in spec.local:
            parts.append(f"{G.degree}:" + ",".join("".join(map(chr, e)) for e in sorted(G._element_tuples)).encode("unicode_escape").decode())
        return "U(" + "|".join(parts) + ")"
    tag = "K" if isinstance(spec, KClosure) else "P"
    return f"{tag}{spec.k}(" + spec_key(spec.inner) + ")"


def spec_hash(spec: GroupSpec) -> str:
    return hashlib.sha256(spec_key(spec).encode()).hexdigest()


# ---------------------------------------------------------------------------
# presets


def preset_valency_one() -> tuple[EdgeIndexedGraph, Universal]:
    """Path a-b-c with i(a->b)=3, i(b->a)=3, i(b->c)=5, i(c->b)=1.

    Upstairs degrees are 3, 8, 1.  At b the local group is Sym(3) on the
    three edges toward a times Alt(5) on the five leaf edges; a gets Sym(3),
    the leaves c the trivial group.
    """
    base = EdgeIndexedGraph.path([(3, 3), (5, 1)])
    spec = make_universal(
        base,
        {
            "a": "Sym(3)",
            "b": "Sym(3)*Alt(5)",
            "c": "Trivial(1)",
        },
    )
    return base, spec


def t3_base() -> EdgeIndexedGraph:
    return EdgeIndexedGraph.single_edge(3, 3)


def preset(name: str) -> tuple[EdgeIndexedGraph, Universal]:
    if name == "valency1":
        return preset_valency_one()
    T3 = {
        "t3sym": {"a": "Sym(3)", "b": "Sym(3)"},
        "t3alt": {"a": "Alt(3)", "b": "Alt(3)"},
        "t3triv": {"a": "Trivial(3)", "b": "Trivial(3)"},
        "t3intrans": {"a": "<(1 2)>", "b": "Sym(3)"},
    }
    if name not in T3:
        raise DomainError(f"unknown preset {name!r}")
    base = t3_base()
    return base, make_universal(base, T3[name])


# ---------------------------------------------------------------------------
# text format

_KV = re.compile(r"(\w+)=(<[^>]*>(?:@\d+)?|\S+)")


def parse_spec(text: str, base: EdgeIndexedGraph | None = None, cwd: Path | None = None):
    """Parse one spec line; returns ``(base, spec)``."""
    text = text.strip()
    m = re.match(r"^(kclosure|plusk)\s+k=(\d+)\s+of\s+(.*)$", text)
    if m:
        inner_base, inner = parse_spec(m.group(3), base, cwd)
        cls = KClosure if m.group(1) == "kclosure" else PlusK
        return inner_base, cls(inner, int(m.group(2)))
    m = re.match(r"^preset\s+(\w+)$", text)
    if m:
        return preset(m.group(1))
    m = re.match(r"^universal\b(.*)$", text)
    if m:
        rest = m.group(1).strip()
        pairs = _KV.findall(rest)
        leftover = _KV.sub("", rest).strip()
        if leftover:
            raise DomainError(f"cannot parse {leftover!r} in spec")
        assignments = {}
        for key, val in pairs:
            if key == "base":
                path = Path(val)
                if cwd is not None and not path.is_absolute():
                    path = cwd / path
                try:
                    base = EdgeIndexedGraph.from_text(path.read_text())
                except OSError as exc:
                    raise DomainError(f"cannot read base graph {val}: {exc}") from None
            else:
                assignments[key] = val
        if base is None:
            raise DomainError("universal spec needs a base graph")
        return base, make_universal(base, assignments)
    raise DomainError(f"cannot parse spec {text!r}")


def format_spec(spec: GroupSpec) -> str:
    return str(spec)


# ---------------------------------------------------------------------------
# membership

YES, NO, INDETERMINATE = "yes", "no", "indeterminate"


def membership(spec: GroupSpec, g: Portrait) -> str:
    """Check a portrait against the constraints visible on its domain."""
    T = g.tree
    if T.base.fingerprint() != spec.base.fingerprint():
        raise DomainError("portrait tree does not cover the group's base graph")
    if isinstance(spec, Universal):
        act = spec.action
        for v in range(T.ball_size(g.r - 1)):
            if not act.local_ok(T, g.images, v):
                return NO
        return YES
    if isinstance(spec, KClosure):
        if g.r < spec.k:
            return INDETERMINATE
        from .profile import realizable

        for v in range(T.ball_size(g.r - spec.k)):
            if not realizable(spec.inner, T, g.images, v, spec.k):
                return NO
        return YES
    return INDETERMINATE
