"""Permutation groups of small degree, handled by brute force.

Points are 1-based.  A group materializes its full element set on first
use; with degree at most 12 (in practice at most 8) this is cheap and
keeps every algorithm below a few lines long.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from itertools import permutations as _iter_perms
from typing import Iterable, Sequence

from .errors import CapacityError, DomainError

MAX_DEGREE = 12
MAX_ELEMENTS = 5_000_000


@dataclass(frozen=True, order=True)
class Permutation:
    """Bijection of {1..n}; ``images[i-1]`` is the image of ``i``."""

    images: tuple[int, ...]

    def __post_init__(self):
        n = len(self.images)
        if sorted(self.images) != list(range(1, n + 1)):
            raise DomainError(f"not a permutation of 1..{n}: {self.images}")

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def from_cycles(cls, cycles: Iterable[Sequence[int]], n: int) -> "Permutation":
        img = list(range(1, n + 1))
        seen = set()
        for cyc in cycles:
            for a in cyc:
                if not 1 <= a <= n:
                    raise DomainError(f"point {a} out of range 1..{n}")
                if a in seen:
                    raise DomainError(f"point {a} repeated in cycle notation")
                seen.add(a)
            for a, b in zip(cyc, list(cyc[1:]) + [cyc[0]]):
                img[a - 1] = b
        return cls(tuple(img))

    @classmethod
    def parse(cls, text: str, n: int | None = None) -> "Permutation":
        """Parse disjoint-cycle notation such as ``"(1 2 3)(4 5)"`` or ``"()"``."""
        text = text.strip()
        if not re.fullmatch(r"(\(\s*(\d+[\s,]*)*\))+", text):
            raise DomainError(f"bad cycle notation: {text!r}")
        cycles = [
            [int(tok) for tok in re.split(r"[\s,]+", body.strip()) if tok]
            for body in re.findall(r"\(([^)]*)\)", text)
        ]
        cycles = [c for c in cycles if c]
        top = max((max(c) for c in cycles), default=0)
        if n is None:
            n = max(top, 1)
        return cls.from_cycles(cycles, n)

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, point: int) -> int:
        return self.images[point - 1]

    def __mul__(self, other: "Permutation") -> "Permutation":
        # (self * other)(i) = self(other(i)): apply other first
        if other.degree != self.degree:
            raise DomainError("degree mismatch")
        a = self.images
        return Permutation(tuple(a[j - 1] for j in other.images))

    def inverse(self) -> "Permutation":
        inv = [0] * self.degree
        for i, j in enumerate(self.images, start=1):
            inv[j - 1] = i
        return Permutation(tuple(inv))

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.images, start=1))

    def cycles(self) -> list[tuple[int, ...]]:
        seen = set()
        out = []
        for start in range(1, self.degree + 1):
            if start in seen:
                continue
            cyc = [start]
            seen.add(start)
            j = self(start)
            while j != start:
                cyc.append(j)
                seen.add(j)
                j = self(j)
            if len(cyc) > 1:
                out.append(tuple(cyc))
        return out

    def order(self) -> int:
        from math import lcm

        return lcm(1, *(len(c) for c in self.cycles()))

    def is_even(self) -> bool:
        return sum(len(c) - 1 for c in self.cycles()) % 2 == 0

    def __str__(self) -> str:
        cyc = self.cycles()
        if not cyc:
            return "()"
        return "".join("(" + " ".join(map(str, c)) + ")" for c in cyc)

    def __repr__(self) -> str:
        return f"Permutation({self}, n={self.degree})"


def _compose(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(a[j - 1] for j in b)


@dataclass(frozen=True, eq=False)
class PermGroup:
    """Subgroup of Sym(degree) given by generators."""

    degree: int
    generators: tuple[Permutation, ...] = ()
    _elements: frozenset | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.degree < 1:
            raise DomainError("degree must be positive")
        object.__setattr__(self, "generators", tuple(self.generators))
        for g in self.generators:
            if g.degree != self.degree:
                raise DomainError(
                    f"generator {g} has degree {g.degree}, expected {self.degree}"
                )

    @classmethod
    def from_elements(cls, degree: int, elements: Iterable[Permutation]) -> "PermGroup":
        """Wrap an explicit element set (assumed closed) without re-closing it."""
        elems = frozenset(e.images for e in elements)
        ident = tuple(range(1, degree + 1))
        gens = tuple(Permutation(e) for e in sorted(elems) if e != ident)
        return cls(degree, gens, frozenset(elems | {ident}))

    @cached_property
    def _element_tuples(self) -> frozenset:
        if self._elements is not None:
            return self._elements
        if self.degree > MAX_DEGREE:
            raise CapacityError(f"degree {self.degree} exceeds {MAX_DEGREE}")
        ident = tuple(range(1, self.degree + 1))
        gens = [g.images for g in self.generators]
        seen = {ident}
        frontier = [ident]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = _compose(g, x)
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            if len(seen) > MAX_ELEMENTS:
                raise CapacityError(f"group exceeds {MAX_ELEMENTS} elements")
            frontier = nxt
        return frozenset(seen)

    @cached_property
    def elements(self) -> tuple[Permutation, ...]:
        """All elements, sorted by image tuple (identity first)."""
        return tuple(Permutation(t) for t in sorted(self._element_tuples))

    def order(self) -> int:
        return len(self._element_tuples)

    def __len__(self) -> int:
        return self.order()

    def __contains__(self, g: Permutation) -> bool:
        return g.degree == self.degree and g.images in self._element_tuples

    def __eq__(self, other) -> bool:
        if not isinstance(other, PermGroup):
            return NotImplemented
        return self.degree == other.degree and self._element_tuples == other._element_tuples

    def __hash__(self) -> int:
        return hash((self.degree, self._element_tuples))

    def is_subgroup_of(self, other: "PermGroup") -> bool:
        return self.degree == other.degree and self._element_tuples <= other._element_tuples

    def orbit(self, point: int) -> frozenset[int]:
        self._check_point(point)
        seen = {point}
        stack = [point]
        while stack:
            p = stack.pop()
            for g in self.generators:
                q = g(p)
                if q not in seen:
                    seen.add(q)
                    stack.append(q)
        return frozenset(seen)

    def orbits(self) -> list[frozenset[int]]:
        out, seen = [], set()
        for p in range(1, self.degree + 1):
            if p not in seen:
                o = self.orbit(p)
                seen |= o
                out.append(o)
        return out

    def stabilizer_tuples(self, point: int) -> list[tuple[int, ...]]:
        self._check_point(point)
        return sorted(e for e in self._element_tuples if e[point - 1] == point)

    def point_stabilizer(self, point: int) -> "PermGroup":
        return PermGroup.from_elements(
            self.degree, (Permutation(t) for t in self.stabilizer_tuples(point))
        )

    def transporters(self, a: int, b: int) -> list[Permutation]:
        """Elements mapping ``a`` to ``b`` (a coset of the stabilizer of ``a``)."""
        self._check_point(a)
        self._check_point(b)
        return [Permutation(e) for e in sorted(self._element_tuples) if e[a - 1] == b]

    def preserves(self, block: Iterable[int]) -> bool:
        block = frozenset(block)
        return all(frozenset(g(p) for p in block) == block for g in self.generators)

    def restrict_to(self, points: Sequence[int]) -> "PermGroup":
        """Action on an invariant subset, relabelled to 1..len(points) in the given order."""
        points = list(points)
        if not self.preserves(points):
            raise DomainError(f"{points} is not invariant")
        pos = {p: i + 1 for i, p in enumerate(points)}
        elems = {
            Permutation(tuple(pos[e[p - 1]] for p in points)) for e in self._element_tuples
        }
        return PermGroup.from_elements(len(points), elems)

    def _check_point(self, point: int) -> None:
        if not 1 <= point <= self.degree:
            raise DomainError(f"point {point} out of range 1..{self.degree}")

    def __str__(self) -> str:
        if not self.generators:
            return f"<>@{self.degree}"
        return "<" + ", ".join(map(str, self.generators)) + f">@{self.degree}"


# ---------------------------------------------------------------------------
# standard groups


def symmetric_group(n: int) -> PermGroup:
    if n == 1:
        return PermGroup(1)
    gens = [Permutation.from_cycles([(1, 2)], n)]
    if n > 2:
        gens.append(Permutation.from_cycles([tuple(range(1, n + 1))], n))
    return PermGroup(n, gens)


def alternating_group(n: int) -> PermGroup:
    gens = [Permutation.from_cycles([(1, 2, i)], n) for i in range(3, n + 1)]
    return PermGroup(n, gens)


def trivial_group(n: int) -> PermGroup:
    return PermGroup(n)


def cyclic_group(n: int) -> PermGroup:
    if n == 1:
        return PermGroup(1)
    return PermGroup(n, [Permutation.from_cycles([tuple(range(1, n + 1))], n)])


def block_product(*factors: PermGroup) -> PermGroup:
    """Direct product acting on consecutive blocks of points."""
    n = sum(f.degree for f in factors)
    gens = []
    offset = 0
    for f in factors:
        for g in f.generators:
            img = list(range(1, n + 1))
            for i in range(1, f.degree + 1):
                img[offset + i - 1] = offset + g(i)
            gens.append(Permutation(tuple(img)))
        offset += f.degree
    return PermGroup(n, gens)


def full_symmetric_elements(n: int) -> list[tuple[int, ...]]:
    return [tuple(p) for p in _iter_perms(range(1, n + 1))]


_GROUP_RE = re.compile(r"^(Sym|Alt|Cyc|Trivial)\((\d+)\)$")


def parse_group(text: str, degree: int | None = None) -> PermGroup:
    """Parse ``Sym(n)``, ``Alt(n)``, ``Cyc(n)``, ``Trivial(n)``, ``<(1 2); (1 2 3)>``
    or a block product ``Sym(3)*Alt(5)``.

    Generator lists need ``degree`` unless written ``<...>@n``.
    """
    text = text.strip()
    if "*" in text and not text.startswith("<"):
        return block_product(*(parse_group(part) for part in text.split("*")))
    m = _GROUP_RE.match(text)
    if m:
        kind, n = m.group(1), int(m.group(2))
        return {
            "Sym": symmetric_group,
            "Alt": alternating_group,
            "Cyc": cyclic_group,
            "Trivial": trivial_group,
        }[kind](n)
    m = re.match(r"^<(.*)>(?:@(\d+))?$", text)
    if m:
        n = int(m.group(2)) if m.group(2) else degree
        if n is None:
            raise DomainError(f"degree needed for {text!r}")
        body = m.group(1).strip()
        gens = [Permutation.parse(t, n) for t in re.split(r"[;]", body) if t.strip()]
        return PermGroup(n, gens)
    raise DomainError(f"cannot parse group {text!r}")


# ---------------------------------------------------------------------------
# operations named in the module contract


def group_order(G: PermGroup) -> int:
    if G.degree > MAX_DEGREE:
        raise CapacityError(f"degree {G.degree} exceeds {MAX_DEGREE}")
    return G.order()


def point_stabilizer(G: PermGroup, p: int) -> PermGroup:
    return G.point_stabilizer(p)


def transitivity_degree(G: PermGroup) -> int:
    """2 if 2-transitive, 1 if only transitive, 0 if intransitive."""
    n = G.degree
    if len(G.orbit(1)) != n:
        return 0
    if n == 1:
        return 2
    stab = G.point_stabilizer(1)
    rest = frozenset(range(2, n + 1))
    return 2 if stab.orbit(2) == rest else 1


def contains_alternating(G: PermGroup) -> bool:
    n = G.degree
    if n < 3:
        raise DomainError("contains_alternating needs degree >= 3")
    # the 3-cycles (1 2 i) generate Alt(n)
    return all(Permutation.from_cycles([(1, 2, i)], n) in G for i in range(3, n + 1))


def prime_factors(m: int) -> frozenset[int]:
    out = set()
    d = 2
    while d * d <= m:
        while m % d == 0:
            out.add(d)
            m //= d
        d += 1
    if m > 1:
        out.add(m)
    return frozenset(out)


def group_primes(G: PermGroup) -> frozenset[int]:
    return prime_factors(G.order())
