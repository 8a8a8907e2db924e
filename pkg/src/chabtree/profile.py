"""Profiles: the sets of ball portraits realized by a group specification.

Every enumeration is a depth-first search over vertices of the ball in
BFS order.  Choosing the local action at vertex v fixes the images of its
children, so after step s the images of all vertices whose parent sits at
position <= s are known.

* Universal specs draw local actions from ``UniversalAction.choices``,
  which only offers actions that still extend to a group element; the
  resulting profiles are exact.
* k-closures draw local actions from the full type-preserving group and
  test every k-ball (and, for early pruning, every smaller ball) against
  the inner spec as soon as it is assigned.  Portraits on B(r) are kept
  when some completion to B(r + k) passes every test around depth <= r.
"""
from __future__ import annotations

import hashlib
import logging
import os
import struct
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .errors import CapacityError, DomainError, UnsupportedError
from .permgrp import symmetric_group
from .portrait import Portrait, decode_images, encode_images
from .spec import (
    GroupSpec,
    KClosure,
    PlusK,
    Universal,
    block_group,
    innermost,
    required_margin,
    spec_hash,
    spec_key,
)
from .tree import TreeBall, get_ball
from .universal import UniversalAction

log = logging.getLogger(__name__)

DEFAULT_CAP = 2_000_000


@dataclass(frozen=True)
class Profile:
    spec_hash: str
    root_type: int
    r: int
    D: int
    portraits: tuple[bytes, ...]
    fix: int = -1
    exact: bool = True
    tree: TreeBall | None = field(default=None, compare=False, repr=False)

    def __len__(self) -> int:
        return len(self.portraits)

    def __contains__(self, item) -> bool:
        if isinstance(item, Portrait):
            item = encode_images(item.r, item.images)
        elif not isinstance(item, bytes):
            item = encode_images(self.r, item)
        return item in self._set

    @property
    def _set(self) -> frozenset:
        s = self.__dict__.get("_cached_set")
        if s is None:
            s = frozenset(self.portraits)
            object.__setattr__(self, "_cached_set", s)
        return s

    def images(self) -> list[tuple[int, ...]]:
        return [decode_images(b)[1] for b in self.portraits]

    def elements(self) -> list[Portrait]:
        if self.tree is None:
            raise DomainError("profile was loaded without its tree ball")
        return [Portrait(self.tree, self.r, im) for im in self.images()]

    def __iter__(self):
        return iter(self.elements())


def _make_profile(key_spec, root, r, D, fix, blobs, exact, tree) -> Profile:
    return Profile(spec_hash(key_spec), root, r, D, tuple(sorted(set(blobs))), fix, exact, tree)


# ---------------------------------------------------------------------------
# k-ball tests


_AMBIENT: dict = {}
_PLUS_RESTRICTED: dict = {}


def ambient_action(base) -> UniversalAction:
    """All type-preserving automorphisms of the covering tree."""
    key = base.fingerprint()
    act = _AMBIENT.get(key)
    if act is None:
        act = UniversalAction(base, [block_group(base, q) for q in range(base.n_vertices)])
        _AMBIENT[key] = act
    return act


def realizable(spec: GroupSpec, T: TreeBall, images, v: int, k: int) -> bool:
    """Does some element of ``spec`` agree with ``images`` on B(v, k)?"""
    if isinstance(spec, Universal):
        return spec.action.realizable(T, images, v, k)
    if isinstance(spec, KClosure):
        if k <= spec.k:
            return realizable(spec.inner, T, images, v, k)
        return all(
            realizable(spec.inner, T, images, x, spec.k)
            for x in T.ball_around(v, k - spec.k)
        )
    # PlusK: exact only at the root of the search tree, where the generated
    # profile is available; elsewhere the inner group is an outer bound.
    if v == 0 and images[0] == 0:
        rr = max(k, spec.k)
        key = (spec_hash(spec), T.root_type, k)
        allowed = _PLUS_RESTRICTED.get(key)
        if allowed is None:
            P = plus_k_profile(spec.inner, spec.k, T.root_type, rr)
            n = T.ball_size(k)
            allowed = frozenset(im[:n] for im in P.images())
            _PLUS_RESTRICTED[key] = allowed
        return tuple(images[: T.ball_size(k)]) in allowed
    return realizable(spec.inner, T, images, v, k)


# ---------------------------------------------------------------------------
# search engine


class _Search:
    def __init__(self, act: UniversalAction, tests: GroupSpec | None, k: int,
                 T: TreeBall, rr: int, fix: int):
        self.act, self.tests, self.k, self.T, self.rr = act, tests, k, T, rr
        self.fix = fix
        depth_end = rr + k
        self.steps = T.ball_size(depth_end - 1)
        self.prefix_steps = T.ball_size(rr - 1)
        n = T.ball_size(depth_end)
        self.n = n
        assign = [-1] * n
        kids = []
        for s in range(self.steps):
            pc = T.parent[s]
            row = [(x, c) for x, c in enumerate(T.nbrs[s]) if c != pc]
            kids.append(row)
            for _, c in row:
                assign[c] = s
        self.kids = kids
        self.assign = assign
        self.triggers: dict[int, list] = {}
        if tests is not None:
            for x in range(T.ball_size(rr)):
                for j in range(1, k + 1):
                    ball = T.ball_around(x, j)
                    s = max(assign[y] for y in ball)
                    self.triggers.setdefault(s, []).append((x, j))

    def options(self, v: int, img) -> list:
        T, act = self.T, self.act
        w = img[v]
        if v == 0:
            opts = act.choices(T, ("x", 0, -1), ("x", w, -1))
        else:
            p = T.parent[v]
            opts = act.choices(T, act.handle(T, v, p), act.handle(T, w, img[p]))
        if T.depth[v] < self.fix:
            ident = tuple(range(len(T.nbrs[v])))
            opts = [ident] if ident in opts else []
        return opts

    def apply(self, s: int, sig, img) -> bool:
        nb_w = self.T.nbrs[img[s]]
        for x, c in self.kids[s]:
            img[c] = nb_w[sig[x]]
        for x, j in self.triggers.get(s, ()):
            if not realizable(self.tests, self.T, img, x, j):
                return False
        return True

    def descend(self, s: int, img, end: int, on_leaf):
        """Returns (stop, back); ``back`` < s - 1 asks callers to jump back."""
        if s == end:
            return on_leaf(img), s - 1
        opts = self.options(s, img)
        if not opts:
            # the options only depend on images fixed at or before assign[s]
            return False, self.assign[s]
        for sig in opts:
            if not self.apply(s, sig, img):
                continue
            stop, back = self.descend(s + 1, img, end, on_leaf)
            if stop:
                return True, back
            if back < s:
                return False, back
        return False, s - 1

    def completes(self, img) -> bool:
        if not any(s >= self.prefix_steps for s in self.triggers):
            return True
        work = list(img)
        return self.descend(self.prefix_steps, work, self.steps, lambda _: True)[0]

    def run_task(self, w: int, sig) -> list[bytes]:
        img = [-1] * self.n
        img[0] = w
        out: list[bytes] = []
        m = self.T.ball_size(self.rr)

        def leaf(im):
            if self.completes(im):
                out.append(encode_images(self.rr, im[:m]))
            return False

        if sig is None:
            leaf(img)
        elif self.apply(0, sig, img):
            self.descend(1, img, self.prefix_steps, leaf)
        return out

    def tasks(self, roots) -> list:
        out = []
        for w in roots:
            if self.prefix_steps == 0:
                img = [-1] * self.n
                img[0] = w
                if self.act.viable(self.T, ("x", 0, -1), ("x", w, -1)):
                    out.append((w, None))
                continue
            img = [-1] * self.n
            img[0] = w
            out.extend((w, sig) for sig in self.options(0, img))
        return out


def _predict(act: UniversalAction, T: TreeBall, rr: int, n_roots: int, fix: int) -> int:
    total = n_roots
    for v in range(T.ball_size(rr - 1)):
        if T.depth[v] < fix:
            continue
        es = act.elements[T.vtype[v]]
        if v == 0:
            total *= len(es)
        else:
            pc = T.parent_color(v)
            total *= sum(1 for e in es if e[pc] == pc)
        if total > 10**15:
            break
    return total


def _threads(threads):
    if threads is None:
        return os.cpu_count() or 1
    if threads < 1:
        raise DomainError("thread count must be >= 1")
    return threads


def _search_profile(spec, root_type, r, D, fix, threads, cap) -> Profile:
    if r < 0 or D < 0:
        raise DomainError("radius and displacement bound must be non-negative")
    if isinstance(spec, PlusK):
        raise UnsupportedError("profiles of +_k groups come from plus_k_profile")
    base = spec.base
    q0 = base.vertex(root_type)
    if fix >= 0 and D > 0:
        raise DomainError("layer profiles fix the root, so D must be 0")
    margin = required_margin(spec)
    T = get_ball(base, q0, r + D + margin + 1)
    U = innermost(spec)
    roots = [w for w in T.ball_around(0, D) if T.vtype[w] == q0]
    roots.sort()
    predicted = _predict(U.action, T, r, len(roots), fix)
    if predicted > cap:
        raise CapacityError(
            f"profile at r={r}, D={D} predicted at {predicted} portraits (cap {cap})"
        )
    if isinstance(spec, Universal):
        search = _Search(spec.action, None, 0, T, r, fix)
    else:
        search = _Search(ambient_action(base), spec.inner, spec.k, T, r, fix)
    tasks = search.tasks(roots)
    nthreads = _threads(threads)
    blobs: list[bytes] = []
    if nthreads == 1 or len(tasks) < 2:
        for w, sig in tasks:
            blobs.extend(search.run_task(w, sig))
    else:
        with ThreadPoolExecutor(max_workers=nthreads) as pool:
            for part in pool.map(lambda t: search.run_task(*t), tasks):
                blobs.extend(part)
    if len(blobs) > cap:
        raise CapacityError(f"profile exceeded {cap} portraits")
    return _make_profile(spec, q0, r, D, fix, blobs, isinstance(spec, Universal), T)


# ---------------------------------------------------------------------------
# caching


_MAGIC = b"CHPROF"
FORMAT_VERSION = 1
_U32 = struct.Struct("<I")


def cache_key(spec: GroupSpec, root_type: int, r: int, D: int, fix: int = -1) -> str:
    h = hashlib.sha256()
    for part in (spec_key(spec), spec.base.fingerprint(), str(root_type), str(r), str(D), str(fix)):
        h.update(part.encode())
        h.update(b"\0")
    return h.hexdigest()


class ProfileCache:
    """Content-addressed on-disk store of profile encodings."""

    def __init__(self, directory: str | os.PathLike | None = None):
        if directory is None:
            directory = os.environ.get("CHABAUTY_CACHE_DIR", ".cache")
        self.dir = Path(directory)

    def _path(self, key: str) -> Path:
        return self.dir / f"{key}.prof"

    def lookup(self, key: str) -> tuple[bytes, ...] | None:
        path = self._path(key)
        try:
            data = path.read_bytes()
        except FileNotFoundError:
            return None
        except OSError as exc:
            log.warning("cache entry %s unreadable: %s", path, exc)
            return None
        try:
            return self._decode(data)
        except ValueError as exc:
            log.warning("cache entry %s ignored: %s", path, exc)
            return None

    @staticmethod
    def _decode(data: bytes) -> tuple[bytes, ...]:
        head = len(_MAGIC) + 2 * _U32.size
        if len(data) < head or not data.startswith(_MAGIC):
            raise ValueError("bad magic")
        (version,) = _U32.unpack_from(data, len(_MAGIC))
        if version != FORMAT_VERSION:
            raise ValueError(f"format version {version} != {FORMAT_VERSION}")
        (count,) = _U32.unpack_from(data, len(_MAGIC) + _U32.size)
        pos, out = head, []
        for _ in range(count):
            if pos + _U32.size > len(data):
                raise ValueError("truncated")
            (n,) = _U32.unpack_from(data, pos)
            pos += _U32.size
            if pos + n > len(data):
                raise ValueError("truncated")
            out.append(data[pos:pos + n])
            pos += n
        if pos != len(data):
            raise ValueError("trailing bytes")
        return tuple(out)

    @staticmethod
    def encode(portraits) -> bytes:
        parts = [_MAGIC, _U32.pack(FORMAT_VERSION), _U32.pack(len(portraits))]
        for b in portraits:
            parts.append(_U32.pack(len(b)))
            parts.append(b)
        return b"".join(parts)

    def store(self, key: str, profile: Profile | tuple) -> None:
        portraits = profile.portraits if isinstance(profile, Profile) else tuple(profile)
        self.dir.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=self.dir, suffix=".tmp")
        try:
            with os.fdopen(fd, "wb") as fh:
                fh.write(self.encode(portraits))
            os.replace(tmp, self._path(key))
        except BaseException:
            try:
                os.unlink(tmp)
            except OSError:
                pass
            raise


_MEMO: dict = {}
_disk: ProfileCache | None = None


def set_disk_cache(cache: ProfileCache | None) -> None:
    """Enable (or disable with None) persistent caching for this process."""
    global _disk
    _disk = cache


def clear_memory_cache() -> None:
    _MEMO.clear()
    _PLUS_RESTRICTED.clear()


def _cached(key_spec, root, r, D, fix, exact, compute) -> Profile:
    key = cache_key(key_spec, root, r, D, fix)
    got = _MEMO.get(key)
    if got is not None:
        return got
    if _disk is not None:
        blobs = _disk.lookup(key)
        if blobs is not None:
            T = get_ball(key_spec.base, root, r + D + required_margin(key_spec) + 1)
            prof = Profile(spec_hash(key_spec), root, r, D, blobs, fix, exact, T)
            _MEMO[key] = prof
            return prof
    prof = compute()
    _MEMO[key] = prof
    if _disk is not None:
        _disk.store(key, prof)
    return prof


# ---------------------------------------------------------------------------
# public operations


def stabilizer_profile(spec: GroupSpec, root_type, r: int, *, threads=None,
                       cap: int = DEFAULT_CAP, fix: int = -1) -> Profile:
    """Portraits on B(root, r) of group elements fixing the root.

    With ``fix = n`` only elements fixing B(root, n) pointwise are kept.
    """
    q0 = spec.base.vertex(root_type)
    return _cached(spec, q0, r, 0, fix, isinstance(spec, Universal),
                   lambda: _search_profile(spec, q0, r, 0, fix, threads, cap))


def moving_profile(spec: GroupSpec, root_type, r: int, D: int, *, threads=None,
                   cap: int = DEFAULT_CAP) -> Profile:
    """Portraits on B(root, r) of elements moving the root by at most D."""
    q0 = spec.base.vertex(root_type)
    return _cached(spec, q0, r, D, -1, isinstance(spec, Universal),
                   lambda: _search_profile(spec, q0, r, D, -1, threads, cap))


def kclosure_profile(spec: GroupSpec, k: int, root_type, r: int, **kw) -> Profile:
    if r < 1:
        raise DomainError("kclosure_profile needs r >= 1")
    return stabilizer_profile(KClosure(spec, k), root_type, r, **kw)


def own_profile(spec: GroupSpec, root_type, r: int, **kw) -> Profile:
    """Stabilizer profile of any spec, routing +_k groups through generation."""
    if isinstance(spec, PlusK):
        return plus_k_profile(spec.inner, spec.k, root_type, r, **kw)
    return stabilizer_profile(spec, root_type, r, **kw)


def _close(gens: list[tuple], group: set, ident: tuple) -> set:
    """Closure of ``group`` under right multiplication by ``gens``."""
    frontier = list(group) or [ident]
    group.add(ident)
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                c = tuple(a[i] for i in g)
                if c not in group:
                    group.add(c)
                    nxt.append(c)
        frontier = nxt
    return group


def plus_k_profile(spec: GroupSpec, k: int, root_type, r: int, *, threads=None,
                   cap: int = DEFAULT_CAP, fix: int = -1) -> Profile:
    """Subgroup of the stabilizer profile generated by (k-1)-ball edge fixators.

    Only edges e whose ball B(e, k-1) lies inside B(root, r) contribute.
    """
    if k < 1:
        raise DomainError("+_k needs k >= 1")
    if k > r:
        raise DomainError(f"+_{k} needs radius r >= k (got r={r})")
    q0 = spec.base.vertex(root_type)
    key_spec = PlusK(spec, k)

    def compute():
        if fix >= 0:
            whole = plus_k_profile(spec, k, q0, r, threads=threads, cap=cap)
            n = whole.tree.ball_size(fix)
            keep = [b for b, im in zip(whole.portraits, whole.images()) if im[:n] == tuple(range(n))]
            return Profile(whole.spec_hash, q0, r, 0, tuple(keep), fix, False, whole.tree)
        P = own_profile(spec, q0, r, threads=threads, cap=cap)
        T = P.tree
        fixed_sets = []
        for w in range(1, T.ball_size(r)):
            if T.depth[w] + k - 1 <= r:
                p = T.parent[w]
                fixed_sets.append(frozenset(T.ball_around(p, k - 1)) | frozenset(T.ball_around(w, k - 1)))
        gens = [
            im for im in P.images()
            if any(all(im[y] == y for y in S) for S in fixed_sets)
        ]
        ident = tuple(range(T.ball_size(r)))
        group: set = {ident}
        used: list[tuple] = []
        for g in gens:
            if g in group:
                continue
            used.append(g)
            group = _close(used, group, ident)
        blobs = [encode_images(r, im) for im in group]
        return Profile(spec_hash(key_spec), q0, r, 0, tuple(sorted(blobs)), -1, False, T)

    return _cached(key_spec, q0, r, 0, fix, False, compute)


def profile_contains(A: Profile, B: Profile) -> bool:
    """True when every portrait of B lies in A."""
    if (A.root_type, A.r, A.D) != (B.root_type, B.r, B.D):
        raise DomainError(
            f"profiles disagree on (root, r, D): {(A.root_type, A.r, A.D)} vs {(B.root_type, B.r, B.D)}"
        )
    return B._set <= A._set


@dataclass
class ExtensionResult:
    ok: bool
    checked: int
    witnesses: list[bytes]

    def __bool__(self) -> bool:
        return self.ok


def extension_check_profiles(P: Profile, P_next: Profile) -> ExtensionResult:
    """Does every portrait of P occur as a restriction of a portrait of P_next?"""
    if P_next.r != P.r + 1 or P.root_type != P_next.root_type:
        raise DomainError("extension check compares radii r and r + 1 at one root")
    n = None
    restricted = set()
    for im in P_next.images():
        if n is None:
            n = len(P.images()[0]) if len(P) else 0
        restricted.add(encode_images(P.r, im[:n]))
    missing = [b for b in P.portraits if b not in restricted]
    return ExtensionResult(not missing, len(P), missing)


def extension_check(spec: GroupSpec, root_type, r: int, *, threads=None,
                    cap: int = DEFAULT_CAP) -> ExtensionResult:
    """Check that each radius-r portrait extends into the radius-(r+1) profile.

    Extensions are searched one portrait at a time with the same engine
    that defines the radius-(r+1) profile, so the larger profile itself is
    never materialized.
    """
    if r < 1:
        raise DomainError("extension_check needs r >= 1")
    if isinstance(spec, PlusK):
        return extension_check_profiles(
            own_profile(spec, root_type, r, threads=threads, cap=cap),
            own_profile(spec, root_type, r + 1, threads=threads, cap=cap),
        )
    q0 = spec.base.vertex(root_type)
    P = stabilizer_profile(spec, q0, r, threads=threads, cap=cap)
    margin = required_margin(spec)
    T = get_ball(spec.base, q0, r + 1 + margin + 1)
    if isinstance(spec, Universal):
        search = _Search(spec.action, None, 0, T, r + 1, -1)
    else:
        search = _Search(ambient_action(spec.base), spec.inner, spec.k, T, r + 1, -1)
    start = T.ball_size(r - 1)
    end = search.steps
    missing = []
    for blob, im in zip(P.portraits, P.images()):
        img = list(im) + [-1] * (search.n - len(im))
        # tests that only see B(r) were passed when P was built; rerun them
        ok = all(
            realizable(search.tests, T, img, x, j)
            for s, lst in search.triggers.items() if s < start
            for x, j in lst
        )
        if ok:
            ok = search.descend(start, img, end, lambda _: True)[0]
        if not ok:
            missing.append(blob)
    return ExtensionResult(not missing, len(P), missing)
