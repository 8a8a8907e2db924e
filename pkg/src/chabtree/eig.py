"""Finite edge-indexed graphs.

A graph is a list of colored vertices and a list of darts (oriented
edges).  Each dart knows its reverse and carries a positive index: the
number of tree edges lying over it at any lift of its origin.  Loops and
parallel edges are allowed.
"""
from __future__ import annotations

import re
from collections import Counter, deque
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import CapacityError, DomainError

MAX_ISO_VERTICES = 12


@dataclass(frozen=True)
class Dart:
    origin: int
    target: int
    reverse: int
    index: int


@dataclass
class EdgeIndexedGraph:
    names: list[str] = field(default_factory=list)
    colors: list[int] = field(default_factory=list)
    darts: list[Dart] = field(default_factory=list)

    # -- construction -----------------------------------------------------

    def add_vertex(self, name: str | None = None, color: int = 0) -> int:
        if name is None:
            name = str(len(self.names))
        if name in self.names:
            raise DomainError(f"duplicate vertex {name!r}")
        self.names.append(name)
        self.colors.append(color)
        return len(self.names) - 1

    def add_edge(self, u, w, i_uw: int, i_wu: int) -> tuple[int, int]:
        """Add a geometric edge; returns the dart ids (u->w, w->u).

        For a loop the first dart is the ``+`` side and the second the ``-`` side.
        """
        u, w = self.vertex(u), self.vertex(w)
        a = len(self.darts)
        self.darts.append(Dart(u, w, a + 1, i_uw))
        self.darts.append(Dart(w, u, a, i_wu))
        return a, a + 1

    def vertex(self, key) -> int:
        if isinstance(key, int):
            if not 0 <= key < len(self.names):
                raise DomainError(f"unknown vertex {key}")
            return key
        try:
            return self.names.index(key)
        except ValueError:
            raise DomainError(f"unknown vertex {key!r}") from None

    @classmethod
    def single_edge(cls, i_ab: int, i_ba: int) -> "EdgeIndexedGraph":
        g = cls()
        g.add_vertex("a")
        g.add_vertex("b")
        g.add_edge("a", "b", i_ab, i_ba)
        return g

    @classmethod
    def single_loop(cls, i_plus: int, i_minus: int) -> "EdgeIndexedGraph":
        g = cls()
        g.add_vertex("a")
        g.add_edge("a", "a", i_plus, i_minus)
        return g

    @classmethod
    def path(cls, indices: list[tuple[int, int]], names=None) -> "EdgeIndexedGraph":
        """Path v0 - v1 - ... with ``indices[j] = (i(v_j->v_j+1), i(v_j+1->v_j))``."""
        n = len(indices) + 1
        names = names or [chr(ord("a") + j) for j in range(n)]
        g = cls()
        for nm in names:
            g.add_vertex(nm)
        for j, (x, y) in enumerate(indices):
            g.add_edge(j, j + 1, x, y)
        return g

    # -- queries ----------------------------------------------------------

    @property
    def n_vertices(self) -> int:
        return len(self.names)

    def darts_at(self, v: int) -> list[int]:
        """Darts with origin ``v``, in declaration order."""
        return [i for i, d in enumerate(self.darts) if d.origin == v]

    def degree(self, v: int) -> int:
        """Upstairs degree of a lift of ``v``."""
        return sum(self.darts[i].index for i in self.darts_at(v))

    def is_connected(self) -> bool:
        if not self.names:
            return True
        seen = {0}
        queue = deque([0])
        while queue:
            v = queue.popleft()
            for i in self.darts_at(v):
                w = self.darts[i].target
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        return len(seen) == self.n_vertices

    def is_tree(self) -> bool:
        return self.is_connected() and len(self.darts) // 2 == self.n_vertices - 1

    # -- text format --------------------------------------------------------

    def to_text(self) -> str:
        lines = [f"v {nm} color={c}" for nm, c in zip(self.names, self.colors)]
        for i in range(0, len(self.darts), 2):
            d, r = self.darts[i], self.darts[i + 1]
            u, w = self.names[d.origin], self.names[d.target]
            if d.origin == d.target:
                lines.append(f"e {u} {w} i+={d.index} i-={r.index}")
            else:
                lines.append(f"e {u} {w} i12={d.index} i21={r.index}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "EdgeIndexedGraph":
        g = cls()
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            toks = line.split()
            try:
                if toks[0] == "v" and len(toks) in (2, 3):
                    color = 0
                    if len(toks) == 3:
                        m = re.fullmatch(r"color=(-?\d+)", toks[2])
                        if not m:
                            raise ValueError(toks[2])
                        color = int(m.group(1))
                    g.add_vertex(toks[1], color)
                elif toks[0] == "e" and len(toks) == 5:
                    kv = dict(t.split("=", 1) for t in toks[3:])
                    if toks[1] == toks[2]:
                        x, y = int(kv["i+"]), int(kv["i-"])
                    else:
                        x, y = int(kv["i12"]), int(kv["i21"])
                    g.add_edge(toks[1], toks[2], x, y)
                else:
                    raise ValueError(line)
            except (ValueError, KeyError, DomainError) as exc:
                raise DomainError(f"line {lineno}: cannot parse {raw!r} ({exc})") from None
        problems = validate_eig(g)
        if problems:
            raise DomainError(problems[0])
        return g

    def fingerprint(self) -> str:
        return self.to_text()


def validate_eig(Q: EdgeIndexedGraph) -> list[str]:
    """Check the invariants; returns diagnostics, first violation first (empty = ok)."""
    out = []
    if len(Q.colors) != len(Q.names):
        out.append("every vertex needs exactly one color")
    n = Q.n_vertices
    m = len(Q.darts)
    for i, d in enumerate(Q.darts):
        if not (0 <= d.origin < n and 0 <= d.target < n):
            out.append(f"dart {i}: endpoint out of range")
            continue
        if not 0 <= d.reverse < m or d.reverse == i:
            out.append(f"dart {i}: reversal involution broken")
            continue
        r = Q.darts[d.reverse]
        if r.reverse != i:
            out.append(f"dart {i}: reversal involution broken")
        elif r.origin != d.target or r.target != d.origin:
            out.append(f"dart {i}: endpoints inconsistent under reversal")
    for i, d in enumerate(Q.darts):
        if d.index < 1:
            out.append(f"dart {i}: index must be >= 1")
    return out


def is_unimodular(Q: EdgeIndexedGraph) -> bool:
    """Cycle-product test: every closed dart path has prod i(e) == prod i(reverse e)."""
    if not Q.is_connected():
        raise DomainError("is_unimodular needs a connected graph")
    if not Q.names:
        return True
    # potential with phi(target)/phi(origin) == i(d)/i(reverse d) along a spanning tree
    phi = {0: Fraction(1)}
    queue = deque([0])
    while queue:
        v = queue.popleft()
        for i in Q.darts_at(v):
            d = Q.darts[i]
            if d.target not in phi:
                phi[d.target] = phi[v] * Fraction(d.index, Q.darts[d.reverse].index)
                queue.append(d.target)
    for d in Q.darts:
        ratio = Fraction(d.index, Q.darts[d.reverse].index)
        if phi[d.target] != phi[d.origin] * ratio:
            return False
    return True


def _pair_profile(Q: EdgeIndexedGraph, u: int, w: int) -> Counter:
    return Counter(
        (d.index, Q.darts[d.reverse].index)
        for d in Q.darts
        if d.origin == u and d.target == w
    )


def eig_isomorphic(Q1: EdgeIndexedGraph, Q2: EdgeIndexedGraph) -> bool:
    """Exhaustive backtracking over color-preserving vertex bijections."""
    n = Q1.n_vertices
    if max(n, Q2.n_vertices) > MAX_ISO_VERTICES:
        raise CapacityError(f"isomorphism test limited to {MAX_ISO_VERTICES} vertices")
    if n != Q2.n_vertices or len(Q1.darts) != len(Q2.darts):
        return False
    if Counter(Q1.colors) != Counter(Q2.colors):
        return False
    if Counter(d.index for d in Q1.darts) != Counter(d.index for d in Q2.darts):
        return False

    prof1 = {(u, w): _pair_profile(Q1, u, w) for u in range(n) for w in range(n)}
    prof2 = {(u, w): _pair_profile(Q2, u, w) for u in range(n) for w in range(n)}
    # vertex signature: color and multiset of outgoing (index, reverse index)
    def sig(Q, v):
        return (Q.colors[v], sorted(
            (d.index, Q.darts[d.reverse].index, d.target == v) for d in Q.darts if d.origin == v
        ))

    sig1 = [sig(Q1, v) for v in range(n)]
    sig2 = [sig(Q2, v) for v in range(n)]
    mapping: list[int] = []
    used = [False] * n

    def extend(u: int) -> bool:
        if u == n:
            return True
        for w in range(n):
            if used[w] or sig1[u] != sig2[w]:
                continue
            if any(
                prof1[(u, x)] != prof2[(w, mapping[x])] or prof1[(x, u)] != prof2[(mapping[x], w)]
                for x in range(u)
            ):
                continue
            if prof1[(u, u)] != prof2[(w, w)]:
                continue
            used[w] = True
            mapping.append(w)
            if extend(u + 1):
                return True
            mapping.pop()
            used[w] = False
        return False

    return extend(0)


def export_dot(Q: EdgeIndexedGraph) -> str:
    lines = ["digraph Q {", "  edge [dir=none];"]
    for v, (nm, c) in enumerate(zip(Q.names, Q.colors)):
        lines.append(f'  v{v} [label="{nm}:{c}"];')
    for i in range(0, len(Q.darts), 2):
        d, r = Q.darts[i], Q.darts[i + 1]
        lines.append(
            f"  v{d.origin} -> v{d.target} [taillabel={d.index} headlabel={r.index}];"
        )
    lines.append("}")
    return "\n".join(lines) + "\n"
