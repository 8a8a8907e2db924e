"""Rooted balls in the universal covering tree of an edge-indexed graph.

Vertex ids follow BFS order, so the ball of radius r is always the id
prefix ``range(ball_size(r))`` whatever radius the tree was built to.

Coloring.  At a vertex of type q the darts of q (declaration order) own
consecutive color blocks of length index(d).  An edge created over dart d
at offset o of the parent's block sits at offset ``o % index(reverse d)``
of the child's block for ``reverse d``; the child's remaining edges take
the free offsets in increasing order.  When i(d) == i(reverse d) every
edge therefore carries the same offset at both ends, which is the usual
symmetric edge coloring of a regular tree.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property

from .eig import EdgeIndexedGraph, validate_eig
from .errors import CapacityError, DomainError

DEFAULT_VERTEX_CAP = 10**7


@dataclass(frozen=True)
class StarLayout:
    """Color bookkeeping for one vertex type (colors are 0-based here)."""

    darts: tuple[int, ...]
    block_start: dict
    color_dart: tuple[int, ...]
    color_offset: tuple[int, ...]

    @property
    def degree(self) -> int:
        return len(self.color_dart)

    def color(self, dart: int, offset: int) -> int:
        return self.block_start[dart] + offset

    def blocks(self) -> list[tuple[int, ...]]:
        """1-based color blocks, one per dart."""
        return [
            tuple(range(self.block_start[d] + 1, self.block_start[d] + 1 + n))
            for d, n in zip(self.darts, self._sizes())
        ]

    def _sizes(self):
        c = Counter(self.color_dart)
        return [c[d] for d in self.darts]


def star_layouts(Q: EdgeIndexedGraph) -> list[StarLayout]:
    out = []
    for q in range(Q.n_vertices):
        darts = tuple(Q.darts_at(q))
        start, cd, co = {}, [], []
        for d in darts:
            start[d] = len(cd)
            for o in range(Q.darts[d].index):
                cd.append(d)
                co.append(o)
        out.append(StarLayout(darts, start, tuple(cd), tuple(co)))
    return out


def child_state(Q: EdgeIndexedGraph, layout: StarLayout, color: int) -> tuple[int, int, int]:
    """(type, parent dart, parent offset) of the neighbor across ``color`` (0-based)."""
    d = Q.darts[layout.color_dart[color]]
    rev = d.reverse
    return d.target, rev, layout.color_offset[color] % Q.darts[rev].index


def predicted_size(Q: EdgeIndexedGraph, root_type: int, R: int) -> int:
    layouts = star_layouts(Q)
    total = 1
    level = Counter({("root", root_type): 1})
    for _ in range(R):
        nxt = Counter()
        for key, cnt in level.items():
            if key[0] == "root":
                q, excl = key[1], None
            else:
                q, excl = key[1], layouts[key[1]].color(key[2], key[3])
            lay = layouts[q]
            for c in range(lay.degree):
                if c != excl:
                    nxt[("v",) + child_state(Q, lay, c)] += cnt
        level = nxt
        total += sum(level.values())
        if total > 10**12:
            break
    return total


@dataclass(eq=False)
class TreeBall:
    base: EdgeIndexedGraph
    root_type: int
    R: int
    layouts: list[StarLayout]
    vtype: list[int] = field(default_factory=list)
    depth: list[int] = field(default_factory=list)
    parent: list[int] = field(default_factory=list)
    pdart: list[int] = field(default_factory=list)
    poff: list[int] = field(default_factory=list)
    nbrs: list[list[int]] = field(default_factory=list)
    level_end: list[int] = field(default_factory=list)

    # -- structure ---------------------------------------------------------

    def __len__(self) -> int:
        return len(self.vtype)

    def ball_size(self, r: int) -> int:
        if r < 0:
            return 0
        return self.level_end[min(r, self.R)]

    def deg(self, v: int) -> int:
        return self.layouts[self.vtype[v]].degree

    def parent_color(self, v: int) -> int:
        """0-based color of the parent edge at ``v`` (-1 at the root)."""
        if self.parent[v] < 0:
            return -1
        return self.layouts[self.vtype[v]].color(self.pdart[v], self.poff[v])

    def color_of(self, v: int, w: int) -> int:
        """0-based color at ``v`` of the edge to neighbor ``w``."""
        return self.nbrs[v].index(w)

    def has_star(self, v: int) -> bool:
        return self.depth[v] < self.R

    def state(self, v: int) -> tuple[int, int, int]:
        return (self.vtype[v], self.pdart[v], self.poff[v])

    def children(self, v: int) -> list[int]:
        return [w for w in self.nbrs[v] if w >= 0 and w != self.parent[v]]

    def distance(self, u: int, v: int) -> int:
        n = len(self.vtype)
        if not (0 <= u < n and 0 <= v < n):
            raise DomainError(f"unknown vertex id {u if not 0 <= u < n else v}")
        d = 0
        while self.depth[u] > self.depth[v]:
            u, d = self.parent[u], d + 1
        while self.depth[v] > self.depth[u]:
            v, d = self.parent[v], d + 1
        while u != v:
            u, v, d = self.parent[u], self.parent[v], d + 2
        return d

    def ball_around(self, v: int, k: int) -> list[int]:
        """Vertices within distance ``k`` of ``v`` (those present in the ball)."""
        out, seen, frontier = [v], {v}, [v]
        for _ in range(k):
            nxt = []
            for x in frontier:
                for y in self.nbrs[x]:
                    if y >= 0 and y not in seen:
                        seen.add(y)
                        nxt.append(y)
            out.extend(nxt)
            frontier = nxt
        return out

    def sphere_sizes(self) -> list[int]:
        prev = 0
        out = []
        for end in self.level_end:
            out.append(end - prev)
            prev = end
        return out

    def type_name(self, v: int) -> str:
        return self.base.names[self.vtype[v]]

    def dump(self) -> str:
        lines = []
        for v in range(len(self.vtype)):
            star = " ".join(
                f"{c + 1}:{w}" for c, w in enumerate(self.nbrs[v]) if w >= 0
            )
            lines.append(
                f"{v} type={self.type_name(v)} depth={self.depth[v]} "
                f"parent={self.parent[v]} pcolor={self.parent_color(v) + 1} star={star}"
            )
        return "\n".join(lines) + "\n"

    @cached_property
    def tree_id(self) -> tuple:
        """Identifies the rooted colored tree independently of the radius."""
        return (self.base.fingerprint(), self.root_type)


def build_tree_ball(
    Q: EdgeIndexedGraph, root_type, R: int, cap: int = DEFAULT_VERTEX_CAP
) -> TreeBall:
    problems = validate_eig(Q)
    if problems:
        raise DomainError(problems[0])
    if not Q.is_connected():
        raise DomainError("base graph must be connected")
    if R < 0:
        raise DomainError("radius must be non-negative")
    q0 = Q.vertex(root_type)
    est = predicted_size(Q, q0, R)
    if est > cap:
        raise CapacityError(f"tree ball of radius {R} needs ~{est} vertices (cap {cap})")

    layouts = star_layouts(Q)
    T = TreeBall(Q, q0, R, layouts)

    def new_vertex(q, dep, par, pd, po):
        T.vtype.append(q)
        T.depth.append(dep)
        T.parent.append(par)
        T.pdart.append(pd)
        T.poff.append(po)
        T.nbrs.append([-1] * layouts[q].degree)
        return len(T.vtype) - 1

    new_vertex(q0, 0, -1, -1, -1)
    level = [0]
    for dep in range(R):
        T.level_end.append(len(T.vtype))
        nxt = []
        for v in level:
            lay = layouts[T.vtype[v]]
            pc = T.parent_color(v)
            if pc >= 0:
                T.nbrs[v][pc] = T.parent[v]
            for c in range(lay.degree):
                if c == pc:
                    continue
                q, rd, off = child_state(Q, lay, c)
                w = new_vertex(q, dep + 1, v, rd, off)
                T.nbrs[v][c] = w
                nxt.append(w)
        level = nxt
    T.level_end.append(len(T.vtype))
    for v in level:
        pc = T.parent_color(v)
        if pc >= 0:
            T.nbrs[v][pc] = T.parent[v]
    return T


def sphere_sizes(T: TreeBall) -> list[int]:
    return T.sphere_sizes()


def distance(T: TreeBall, u: int, v: int) -> int:
    return T.distance(u, v)


_BALLS: dict = {}


def get_ball(Q: EdgeIndexedGraph, root_type, R: int, cap: int = DEFAULT_VERTEX_CAP) -> TreeBall:
    """Memoized ``build_tree_ball``."""
    key = (Q.fingerprint(), Q.vertex(root_type), R)
    T = _BALLS.get(key)
    if T is None:
        T = build_tree_ball(Q, root_type, R, cap)
        _BALLS[key] = T
    return T
