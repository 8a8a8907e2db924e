"""Extension logic for groups with prescribed local action.

A universal group is cut out by one condition per vertex, so whether a
partial map extends to a group element only depends on the half-trees
hanging off its boundary.  Half-trees are described by handles:

``('d', q, dart, off)``
    the subtree below a non-root vertex of type q whose parent edge lies
    over ``dart`` at offset ``off``.  Finitely many, independent of any ball.
``('x', v, excl)``
    concrete vertex ``v`` of a tree ball with neighbor ``excl`` removed
    (``excl == -1`` keeps the whole tree).  Only used when the removed
    neighbor is not the parent, so following neighbors climbs toward the
    root and reaches 'd' handles after finitely many steps.

Viability of a pair of 'd' handles is a greatest fixed point computed once
per group; other pairs are resolved by memoized recursion on top of it.
"""
from __future__ import annotations

import threading

from .errors import DomainError
from .tree import TreeBall, child_state, star_layouts


class UniversalAction:
    def __init__(self, base, local_groups):
        self.base = base
        self.layouts = star_layouts(base)
        # 0-based image tuples, sorted so enumeration order is lexicographic
        self.elements = [
            sorted(tuple(x - 1 for x in e) for e in G._element_tuples) for G in local_groups
        ]
        self.element_sets = [frozenset(es) for es in self.elements]
        self.child = [
            [child_state(base, lay, c) for c in range(lay.degree)] for lay in self.layouts
        ]
        self._lock = threading.Lock()
        self._memo: dict = {}
        self._choices: dict = {}
        self._down = self._down_fixpoint()

    # -- 'd' handles ---------------------------------------------------------

    def _down_fixpoint(self) -> set:
        Q = self.base
        states = []
        for q, lay in enumerate(self.layouts):
            for d in lay.darts:
                for o in range(Q.darts[d].index):
                    states.append((q, d, o))
        alive = {
            (s, t) for s in states for t in states if s[0] == t[0] and s[1] == t[1]
        }
        changed = True
        while changed:
            changed = False
            for s, t in sorted(alive):
                if not self._down_witness(s, t, alive):
                    alive.discard((s, t))
                    changed = True
        return alive

    def _down_witness(self, s, t, alive) -> bool:
        q = s[0]
        lay = self.layouts[q]
        cs, ct = lay.color(s[1], s[2]), lay.color(t[1], t[2])
        kids = self.child[q]
        for sig in self.elements[q]:
            if sig[cs] != ct:
                continue
            if all(
                x == cs or (kids[x], kids[sig[x]]) in alive for x in range(lay.degree)
            ):
                return True
        return False

    # -- handles ---------------------------------------------------------------

    @staticmethod
    def handle(T: TreeBall, v: int, excl: int) -> tuple:
        if excl >= 0 and excl == T.parent[v]:
            return ("d",) + T.state(v)
        return ("x", v, excl)

    def _htype(self, T, h) -> int:
        return h[1] if h[0] == "d" else T.vtype[h[1]]

    def _excl_color(self, T, h) -> int:
        if h[0] == "d":
            return self.layouts[h[1]].color(h[2], h[3])
        v, excl = h[1], h[2]
        return -1 if excl < 0 else T.nbrs[v].index(excl)

    def _child_handle(self, T, h, color: int) -> tuple:
        if h[0] == "d":
            return ("d",) + self.child[h[1]][color]
        v = h[1]
        if not T.has_star(v):
            raise DomainError(f"vertex {v} has no full star in the tree ball")
        return self.handle(T, T.nbrs[v][color], v)

    def viable(self, T: TreeBall, h1, h2) -> bool:
        """Does the half-tree map h1 -> h2 (roots matched) extend to a group element?"""
        if h1[0] == "d" and h2[0] == "d":
            return (h1[1:], h2[1:]) in self._down
        if self._htype(T, h1) != self._htype(T, h2):
            return False
        key = (T.tree_id, h1, h2)
        got = self._memo.get(key)
        if got is None:
            got = bool(self.choices(T, h1, h2))
            self._memo[key] = got
        return got

    def choices(self, T: TreeBall, h1, h2) -> list:
        """Local actions at the matched roots of h1, h2 that keep every child pair viable."""
        if self._htype(T, h1) != self._htype(T, h2):
            return []
        key = (T.tree_id, h1, h2)
        got = self._choices.get(key)
        if got is not None:
            return got
        q = self._htype(T, h1)
        deg = self.layouts[q].degree
        c1, c2 = self._excl_color(T, h1), self._excl_color(T, h2)
        k1 = [None if x == c1 else self._child_handle(T, h1, x) for x in range(deg)]
        k2 = [None if x == c2 else self._child_handle(T, h2, x) for x in range(deg)]
        ok = {}
        out = []
        for sig in self.elements[q]:
            if c1 >= 0 and sig[c1] != c2:
                continue
            good = True
            for x in range(deg):
                if x == c1:
                    continue
                pair = (x, sig[x])
                res = ok.get(pair)
                if res is None:
                    res = ok[pair] = self.viable(T, k1[x], k2[sig[x]])
                if not res:
                    good = False
                    break
            if good:
                out.append(sig)
        self._choices[key] = out
        return out

    # -- portraits -------------------------------------------------------------

    def local_ok(self, T: TreeBall, images, v: int) -> bool:
        """Local action of the partial map at ``v`` lies in the prescribed group."""
        w = images[v]
        nb_w = T.nbrs[w]
        sig = tuple(nb_w.index(images[x]) for x in T.nbrs[v])
        return sig in self.element_sets[T.vtype[v]]

    def realizable(self, T: TreeBall, images, v: int, k: int) -> bool:
        """Is ``images`` restricted to B(v, k) the restriction of a group element?"""
        ball = T.ball_around(v, k)
        inner = set(T.ball_around(v, k - 1)) if k >= 1 else set()
        if k == 0:
            return self.viable(T, ("x", v, -1), ("x", images[v], -1))
        for x in ball:
            if x in inner:
                if not self.local_ok(T, images, x):
                    return False
                continue
            # boundary vertex: neighbor toward v is its unique neighbor in the ball
            y = next(z for z in T.nbrs[x] if z >= 0 and z in inner)
            h1 = self.handle(T, x, y)
            h2 = self.handle(T, images[x], images[y])
            if not self.viable(T, h1, h2):
                return False
        return True
