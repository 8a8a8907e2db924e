"""Finite partial automorphisms of a tree ball.

A portrait is the restriction of a tree automorphism to the ball
B(root, r).  It stores only the vertex map, as a tuple indexed by BFS id;
edge images follow because trees have unique edges between neighbors.
"""
from __future__ import annotations

import struct
from array import array
from dataclasses import dataclass

from .errors import DomainError
from .permgrp import Permutation
from .tree import TreeBall

_HEADER = struct.Struct("<I")


def same_tree(a: TreeBall, b: TreeBall) -> bool:
    return a is b or a.tree_id == b.tree_id


@dataclass(frozen=True, eq=False)
class Portrait:
    tree: TreeBall
    r: int
    images: tuple[int, ...]

    def __post_init__(self):
        if len(self.images) != self.tree.ball_size(self.r):
            raise DomainError(
                f"portrait of radius {self.r} needs {self.tree.ball_size(self.r)} images"
            )

    @classmethod
    def identity(cls, tree: TreeBall, r: int) -> "Portrait":
        return cls(tree, r, tuple(range(tree.ball_size(r))))

    @property
    def displacement(self) -> int:
        return self.tree.distance(0, self.images[0])

    def __call__(self, v: int) -> int:
        return self.images[v]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Portrait):
            return NotImplemented
        return self.r == other.r and self.images == other.images and same_tree(self.tree, other.tree)

    def __hash__(self) -> int:
        return hash((self.r, self.images))

    def __repr__(self) -> str:
        return f"Portrait(r={self.r}, disp={self.displacement}, images={self.images})"

    def is_valid(self) -> bool:
        """Injective, adjacency- and type-preserving on the domain."""
        T = self.tree
        img = self.images
        if len(set(img)) != len(img) or max(img) >= len(T):
            return False
        for v in range(1, len(img)):
            if T.vtype[img[v]] != T.vtype[v]:
                return False
            if T.distance(img[v], img[T.parent[v]]) != 1:
                return False
        return T.vtype[img[0]] == T.vtype[0]

    def restrict(self, r: int) -> "Portrait":
        if not 0 <= r <= self.r:
            raise DomainError(f"cannot restrict radius {self.r} to {r}")
        return Portrait(self.tree, r, self.images[: self.tree.ball_size(r)])

    def fixes_ball(self, r: int) -> bool:
        n = self.tree.ball_size(min(r, self.r))
        return all(self.images[v] == v for v in range(n))

    def is_self_map(self) -> bool:
        n = len(self.images)
        return all(x < n for x in self.images)

    def local_action(self, v: int) -> Permutation:
        T = self.tree
        if T.depth[v] >= self.r:
            raise DomainError(f"vertex {v} is too close to the domain boundary")
        w = self.images[v]
        if not T.has_star(w):
            raise DomainError(f"image {w} lies on the boundary of the tree ball")
        nb_w = T.nbrs[w]
        return Permutation(tuple(nb_w.index(self.images[x]) + 1 for x in T.nbrs[v]))


def compose(g: Portrait, h: Portrait) -> Portrait:
    """``g o h`` on the largest ball around the root where it is defined."""
    if not same_tree(g.tree, h.tree):
        raise DomainError("portraits live on different trees")
    r = min(h.r, g.r - h.displacement)
    if r < 0:
        raise DomainError("empty composable domain")
    T = g.tree if len(g.tree) >= len(h.tree) else h.tree
    n = T.ball_size(r)
    gi, hi = g.images, h.images
    return Portrait(T, r, tuple(gi[hi[v]] for v in range(n)))


def inverse(g: Portrait) -> Portrait:
    if g.displacement != 0 or not g.is_self_map():
        raise DomainError("only root-fixing self-maps are inverted")
    inv = [0] * len(g.images)
    for v, w in enumerate(g.images):
        inv[w] = v
    return Portrait(g.tree, g.r, tuple(inv))


def local_action(g: Portrait, v: int) -> Permutation:
    return g.local_action(v)


def portrait_order(g: Portrait) -> int:
    if g.displacement != 0 or not g.is_self_map():
        raise DomainError("portrait_order needs a portrait mapping its ball onto itself")
    ident = tuple(range(len(g.images)))
    x, m = g.images, 1
    while x != ident:
        x = tuple(g.images[i] for i in x)
        m += 1
    return m


def power(g: Portrait, m: int) -> Portrait:
    if not g.is_self_map():
        raise DomainError("power needs a self-map")
    x = tuple(range(len(g.images)))
    for _ in range(m):
        x = tuple(g.images[i] for i in x)
    return Portrait(g.tree, g.r, x)


def encode_images(r: int, images) -> bytes:
    a = array("I", images)
    if a.itemsize != 4:  # pragma: no cover - platform guard
        a = array("L", images)
    if struct.pack("=I", 1) != struct.pack("<I", 1):  # pragma: no cover
        a.byteswap()
    return _HEADER.pack(r) + a.tobytes()


def encode(g: Portrait) -> bytes:
    """Radius header followed by the BFS-ordered images as little-endian uint32."""
    return encode_images(g.r, g.images)


def decode_images(blob: bytes) -> tuple[int, tuple[int, ...]]:
    (r,) = _HEADER.unpack_from(blob)
    a = array("I")
    a.frombytes(blob[_HEADER.size:])
    if struct.pack("=I", 1) != struct.pack("<I", 1):  # pragma: no cover
        a.byteswap()
    return r, tuple(a)


def decode(blob: bytes, tree: TreeBall) -> Portrait:
    r, images = decode_images(blob)
    return Portrait(tree, r, images)
