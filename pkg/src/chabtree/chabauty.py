"""Analysis suites built on profiles.

Each suite returns a small dataclass with a ``to_dict`` method; ``render``
turns any of them into indented ``key: value`` text and ``to_json`` into
JSON with sorted keys.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations

from .eig import EdgeIndexedGraph, eig_isomorphic
from .errors import DomainError, NotLocallyDetectableError, UnsupportedError
from .permgrp import (
    Permutation,
    contains_alternating,
    prime_factors,
    transitivity_degree,
)
from .portrait import Portrait, portrait_order, power
from .profile import (
    kclosure_profile,
    moving_profile,
    own_profile,
    profile_contains,
    stabilizer_profile,
)
from .spec import (
    GroupSpec,
    KClosure,
    PlusK,
    Universal,
    preset,
    preset_valency_one,
    required_margin,
)
from .tree import get_ball


# ---------------------------------------------------------------------------
# serialization


def _plain(x):
    if hasattr(x, "to_dict"):
        return x.to_dict()
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, (set, frozenset)):
        return sorted(_plain(v) for v in x)
    if isinstance(x, EdgeIndexedGraph):
        return x.to_text()
    if isinstance(x, Portrait):
        return list(x.images)
    return x


def to_json(report) -> str:
    return json.dumps(_plain(report), sort_keys=True, indent=2)


def render(report, indent: int = 0) -> str:
    """Stable structured text: ``key: value`` lines, nesting by two spaces."""
    data = _plain(report)
    pad = "  " * indent
    lines = []
    if isinstance(data, dict):
        for key in sorted(data):
            val = data[key]
            if isinstance(val, dict) and val:
                lines.append(f"{pad}{key}:")
                lines.append(render(val, indent + 1))
            elif isinstance(val, list) and val and isinstance(val[0], dict):
                lines.append(f"{pad}{key}:")
                for i, item in enumerate(val):
                    lines.append(f"{pad}  - [{i}]")
                    lines.append(render(item, indent + 2))
            elif isinstance(val, str) and "\n" in val:
                lines.append(f"{pad}{key}: |")
                lines.extend(f"{pad}  {ln}" for ln in val.rstrip("\n").split("\n"))
            else:
                lines.append(f"{pad}{key}: {_scalar(val)}")
    else:
        lines.append(pad + _scalar(data))
    return "\n".join(lines)


def _scalar(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return "none"
    if isinstance(v, list):
        return "[" + ", ".join(_scalar(x) for x in v) + "]"
    return str(v)


def _same_base(A: GroupSpec, B: GroupSpec) -> None:
    if A.base.fingerprint() != B.base.fingerprint():
        raise DomainError("specs live on different base graphs")


# ---------------------------------------------------------------------------
# agreement radius


@dataclass
class AgreementReport:
    A: str
    B: str
    Rmax: int
    D: int
    flags: list[bool]
    r_star: int

    @property
    def pseudo_distance(self) -> float:
        return 2.0 ** (-self.r_star)

    def to_dict(self):
        return {
            "A": self.A,
            "B": self.B,
            "Rmax": self.Rmax,
            "D": self.D,
            "flags": self.flags,
            "r_star": self.r_star,
            "pseudo_distance": self.pseudo_distance,
        }


def _profile_at(spec, root, r, D, **kw):
    if D == 0:
        return own_profile(spec, root, r, **kw)
    if isinstance(spec, PlusK):
        raise UnsupportedError("moving profiles of +_k groups are not generated")
    return moving_profile(spec, root, r, D, **kw)


def agreement_radius(A: GroupSpec, B: GroupSpec, root_type=0, Rmax: int = 3, D: int = 0,
                     **kw) -> AgreementReport:
    """Compare stabilizer (D = 0) or moving profiles radius by radius."""
    _same_base(A, B)
    if Rmax < 1:
        raise DomainError("Rmax must be >= 1")
    flags = []
    for r in range(1, Rmax + 1):
        pa = _profile_at(A, root_type, r, D, **kw)
        pb = _profile_at(B, root_type, r, D, **kw)
        ok = pa.portraits == pb.portraits
        if D > 0:
            ok = ok and own_profile(A, root_type, r, **kw).portraits == own_profile(B, root_type, r, **kw).portraits
        flags.append(ok)
    r_star = 0
    for ok in flags:
        if not ok:
            break
        r_star += 1
    return AgreementReport(str(A), str(B), Rmax, D, flags, r_star)


# ---------------------------------------------------------------------------
# orbits, quotient graph, certificate


def _orbit_group(spec: GroupSpec) -> Universal:
    """The universal group with the same orbits as ``spec``."""
    while isinstance(spec, KClosure):
        # a k-closure agrees with its inner group on every k-ball, so it
        # moves vertices and edges exactly as the inner group does
        spec = spec.inner
    if isinstance(spec, PlusK):
        raise UnsupportedError("orbit detection for +_k groups is not implemented")
    return spec


def _vertex_transporter(U: Universal, T, x: int, y: int) -> bool:
    if T.vtype[x] != T.vtype[y]:
        return False
    return U.action.viable(T, ("x", x, -1), ("x", y, -1))


def _edge_transporter(U: Universal, T, e, f) -> bool:
    """Is there an element mapping oriented edge e = (x, y) onto f = (x', y')?"""
    (x, y), (x2, y2) = e, f
    if T.vtype[x] != T.vtype[x2] or T.vtype[y] != T.vtype[y2]:
        return False
    act = U.action
    return act.viable(T, act.handle(T, x, y), act.handle(T, x2, y2)) and act.viable(
        T, act.handle(T, y, x), act.handle(T, y2, x2)
    )


@dataclass
class _Orbits:
    T: object
    U: Universal
    reps: list[int]
    vclass: dict
    darts: list  # (rep vertex, representative neighbor, class of target, index)
    dart_rev: list[int]


def _orbits(spec: GroupSpec, Rmax: int, root_type=0) -> _Orbits:
    U = _orbit_group(spec)
    if Rmax < 2:
        raise DomainError("orbit detection needs Rmax >= 2")
    T = get_ball(U.base, root_type, Rmax)
    reps: list[int] = []
    vclass: dict[int, int] = {}
    for v in range(T.ball_size(Rmax - 1)):
        for i, x in enumerate(reps):
            if _vertex_transporter(U, T, x, v):
                vclass[v] = i
                break
        else:
            vclass[v] = len(reps)
            reps.append(v)
    for x in reps:
        if T.depth[x] >= Rmax - 1:
            raise NotLocallyDetectableError(
                f"orbits not locally detectable within radius {Rmax}: "
                f"vertex {x} at depth {T.depth[x]} joins no class nearer the root"
            )
    darts = []
    at_rep: dict[int, list[int]] = {}
    for i, x in enumerate(reps):
        seen: list[int] = []
        for y in T.nbrs[x]:
            for j in seen:
                if _edge_transporter(U, T, (x, darts[j][1]), (x, y)):
                    darts[j] = darts[j][:3] + (darts[j][3] + 1,)
                    break
            else:
                seen.append(len(darts))
                darts.append((x, y, vclass[y], 1))
        at_rep[i] = seen
    rev = []
    for x, y, cy, _ in darts:
        # rev dart sits at the representative of y's class
        for j in at_rep[cy]:
            if _edge_transporter(U, T, (y, x), (darts[j][0], darts[j][1])):
                rev.append(j)
                break
        else:  # pragma: no cover - every oriented edge lies in some class
            raise NotLocallyDetectableError("reverse edge class not found")
    return _Orbits(T, U, reps, vclass, darts, rev)


def quotient_graph(spec: GroupSpec, Rmax: int = 4, root_type=0) -> EdgeIndexedGraph:
    """Edge-indexed quotient of the tree by the group's action."""
    orb = _orbits(spec, Rmax, root_type)
    T, base = orb.T, orb.U.base
    Q = EdgeIndexedGraph()
    counts: dict[str, int] = {}
    for x in orb.reps:
        nm = base.names[T.vtype[x]]
        counts[nm] = counts.get(nm, 0) + 1
        label = nm if counts[nm] == 1 else f"{nm}{counts[nm]}"
        Q.add_vertex(label, base.colors[T.vtype[x]])
    done = set()
    for j, (x, y, cy, idx) in enumerate(orb.darts):
        if j in done:
            continue
        jr = orb.dart_rev[j]
        if jr == j:
            raise UnsupportedError("the group inverts an edge; no edge-indexed quotient")
        done.update((j, jr))
        Q.add_edge(orb.vclass[x], cy, idx, orb.darts[jr][3])
    return Q


@dataclass
class ShCertificate:
    F: list[tuple]
    pairs: list[tuple]
    radius: int

    def to_dict(self):
        return {
            "F": [list(e) for e in self.F],
            "pairs": [[list(a), list(b)] for a, b in self.pairs],
            "radius": self.radius,
        }

    def diameter(self, T) -> int:
        pts = sorted({p for e in self.F for p in e[1:]})
        return max((T.distance(a, b) for a in pts for b in pts), default=0)


def _edge_key(u: int, w: int) -> tuple:
    return ("e", min(u, w), max(u, w))


def sh_certificate(spec: GroupSpec, Rmax: int = 4, root_type=0) -> ShCertificate:
    """Representatives F and all transporter pairs from F to elements near F."""
    orb = _orbits(spec, Rmax, root_type)
    T, U = orb.T, orb.U
    F: list[tuple] = [("v", x) for x in orb.reps]
    done = set()
    for j, (x, y, _, _) in enumerate(orb.darts):
        if j in done:
            continue
        done.update((j, orb.dart_rev[j]))
        F.append(_edge_key(x, y))
    fverts = sorted({p for e in F for p in e[1:]})
    near = set()
    for a in fverts:
        near.update(T.ball_around(a, 1))
    if any(T.depth[v] >= Rmax for v in near):
        raise NotLocallyDetectableError("certificate neighborhood leaves the explored ball")
    targets: list[tuple] = [("v", v) for v in sorted(near)]
    edges = set()
    for v in near:
        for w in T.nbrs[v]:
            if w >= 0:
                edges.add(_edge_key(v, w))
    targets.extend(sorted(edges))
    pairs = []
    for a in F:
        for b in targets:
            if a[0] != b[0]:
                continue
            if a[0] == "v":
                ok = _vertex_transporter(U, T, a[1], b[1])
            else:
                e = (a[1], a[2])
                ok = _edge_transporter(U, T, e, (b[1], b[2])) or _edge_transporter(
                    U, T, e, (b[2], b[1])
                )
            if ok:
                pairs.append((a, b))
    return ShCertificate(F, pairs, Rmax)


@dataclass
class CertificateComparison:
    pairs_checked: int
    equal_profile_pairs: int
    violations: list[str]

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self):
        return {
            "pairs_checked": self.pairs_checked,
            "equal_profile_pairs": self.equal_profile_pairs,
            "violations": self.violations,
            "ok": self.ok,
        }


def _exact_subgroup(spec: GroupSpec) -> Universal | None:
    """A universal group contained in ``spec`` (k-closures only grow groups)."""
    while isinstance(spec, KClosure):
        spec = spec.inner
    return spec if isinstance(spec, Universal) else None


def _separated(A: GroupSpec, B: GroupSpec, root_type, radii=(1, 2)) -> bool:
    """Certify unequal moving profiles at every larger radius from small ones.

    Restricting any profile to a smaller radius lands inside the smaller
    profile.  A portrait of a universal subgroup of A extends to a group
    element of A, so if it is missing from B's small profile, no larger
    profile of B can match A's.
    """
    for r in radii:
        pa, pb = own_profile(A, root_type, r), own_profile(B, root_type, r)
        for X, other in ((A, pb), (B, pa)):
            sub = _exact_subgroup(X)
            if sub is not None and not set(stabilizer_profile(sub, root_type, r).portraits) <= set(other.portraits):
                return True
    return False


def certificate_determined_by_profiles(specs: dict, Rmax: int = 4, root_type=0) -> CertificateComparison:
    """Equal moving profiles near F must give equal certificates and quotients.

    ``specs`` maps names to specs on one base graph.  The profile radius is
    diam(F) + margin + 1 with displacement bound diam(F) + 1.
    """
    names = sorted(specs)
    certs = {nm: sh_certificate(specs[nm], Rmax, root_type) for nm in names}
    quots = {nm: quotient_graph(specs[nm], Rmax, root_type) for nm in names}
    checked = equal = 0
    bad = []
    for a, b in combinations(names, 2):
        A, B = specs[a], specs[b]
        if A.base.fingerprint() != B.base.fingerprint():
            continue
        checked += 1
        if _separated(A, B, root_type):
            continue
        T = get_ball(A.base, root_type, Rmax)
        diam = max(certs[a].diameter(T), certs[b].diameter(T))
        r = diam + max(required_margin(A), required_margin(B)) + 1
        pa = moving_profile(A, root_type, r, diam + 1)
        pb = moving_profile(B, root_type, r, diam + 1)
        if pa.portraits != pb.portraits:
            continue
        equal += 1
        if certs[a].to_dict() != certs[b].to_dict():
            bad.append(f"{a} vs {b}: equal profiles, different certificates")
        if not eig_isomorphic(quots[a], quots[b]):
            bad.append(f"{a} vs {b}: equal profiles, non-isomorphic quotients")
    return CertificateComparison(checked, equal, bad)


# ---------------------------------------------------------------------------
# layers and primes


def layer_order(spec: GroupSpec, root_type, n: int, **kw) -> int:
    """|{g in profile(n + 1) : g fixes B(root, n)}|."""
    if n < 0:
        raise DomainError("layer index must be >= 0")
    return len(own_profile(spec, root_type, n + 1, fix=n, **kw))


def prime_content(spec: GroupSpec, root_type, n: int, **kw) -> frozenset[int]:
    return prime_factors(layer_order(spec, root_type, n, **kw))


@dataclass
class ProPiReport:
    pi: frozenset
    r: int
    k: int
    depth: int
    spec_levels: dict
    closure_levels: dict | None
    hypothesis: bool
    conclusion: bool | None

    @property
    def status(self) -> str:
        if not self.hypothesis:
            return "hypothesis not met"
        return "conclusion holds" if self.conclusion else "conclusion violated"

    @property
    def ok(self) -> bool:
        return not self.hypothesis or bool(self.conclusion)

    def to_dict(self):
        return {
            "pi": sorted(self.pi),
            "levels": f"{self.r}..{self.depth}",
            "k": self.k,
            "spec_primes": {str(n): sorted(p) for n, p in self.spec_levels.items()},
            "closure_primes": None if self.closure_levels is None else {
                str(n): sorted(p) for n, p in self.closure_levels.items()
            },
            "hypothesis": self.hypothesis,
            "conclusion": self.conclusion,
            "status": self.status,
        }


def verify_pro_pi_transfer(spec: GroupSpec, pi, r: int, k: int, depth: int, root_type=0,
                           **kw) -> ProPiReport:
    """Layers r..depth of spec are pi-groups, hence so are those of its k-closure."""
    pi = frozenset(pi)
    if any(len(prime_factors(p)) != 1 or prime_factors(p) != {p} for p in pi):
        raise DomainError("pi must be a set of primes")
    if k < r + 1:
        raise DomainError("the transfer needs k >= r + 1")
    if depth < r:
        raise DomainError("depth must be >= r")
    levels = {n: prime_content(spec, root_type, n, **kw) for n in range(r, depth + 1)}
    hyp = all(p <= pi for p in levels.values())
    if not hyp:
        return ProPiReport(pi, r, k, depth, levels, None, False, None)
    cl = KClosure(spec, k)
    clevels = {n: prime_content(cl, root_type, n, **kw) for n in range(r, depth + 1)}
    concl = all(p <= pi for p in clevels.values())
    return ProPiReport(pi, r, k, depth, levels, clevels, True, concl)


@dataclass
class TorsionResult:
    holds: bool
    checked: int
    counterexample: Portrait | None

    def to_dict(self):
        return {
            "holds": self.holds,
            "checked": self.checked,
            "counterexample": None if self.counterexample is None else list(self.counterexample.images),
        }


def torsion_claim_check(spec: GroupSpec, root_type, p: int, n: int, M: int, **kw) -> TorsionResult:
    """For g fixing B(n) with g^p fixing B(M): must g fix B(n + 1)?

    Portraits are taken at radius M: the element g^p fixes B(M) exactly
    when its restriction to B(M) is the identity.
    """
    if M <= n:
        raise DomainError("torsion claim needs M > n")
    if p < 2:
        raise DomainError("p must be a prime")
    P = own_profile(spec, root_type, M, fix=n, **kw)
    checked = 0
    for g in P.elements():
        if not power(g, p).fixes_ball(M):
            continue
        checked += 1
        if not g.fixes_ball(n + 1):
            return TorsionResult(False, checked, g)
    return TorsionResult(True, checked, None)


# ---------------------------------------------------------------------------
# local actions, discreteness


@dataclass
class TransitivityReport:
    per_type: dict
    two_transitive: bool

    def to_dict(self):
        return {"per_type": self.per_type, "two_transitive": self.two_transitive}


def local_two_transitivity(spec: GroupSpec) -> TransitivityReport:
    if not isinstance(spec, Universal):
        raise UnsupportedError("local 2-transitivity is read off Universal specs only")
    per = {
        nm: transitivity_degree(G) for nm, G in zip(spec.base.names, spec.local)
    }
    return TransitivityReport(per, all(v == 2 for v in per.values()))


@dataclass
class DiscretenessReport:
    sizes: list[int]
    discrete: bool
    closure_equal: dict
    least_k: int | None

    def to_dict(self):
        return {
            "sizes": self.sizes,
            "discrete": self.discrete,
            "closure_equal": {str(k): v for k, v in self.closure_equal.items()},
            "least_k": self.least_k,
        }


def discreteness_check(spec: GroupSpec, root_type=0, Rmax: int = 3, **kw) -> DiscretenessReport:
    """Stabilizer sizes at r = 1..Rmax; discrete when the last two agree."""
    if Rmax < 2:
        raise DomainError("discreteness needs Rmax >= 2")
    sizes = [len(own_profile(spec, root_type, r, **kw)) for r in range(1, Rmax + 1)]
    discrete = sizes[-1] == sizes[-2]
    eq: dict[int, bool] = {}
    least = None
    if discrete:
        top = own_profile(spec, root_type, Rmax, **kw)
        for k in range(1, Rmax):
            eq[k] = kclosure_profile(spec, k, root_type, Rmax, **kw).portraits == top.portraits
            if eq[k] and least is None:
                least = k
    return DiscretenessReport(sizes, discrete, eq, least)


@dataclass
class DescentReport:
    r: int
    sizes: dict
    own_size: int
    chain_ok: bool
    contains_own: bool
    closed_at: int | None

    @property
    def ok(self) -> bool:
        return self.chain_ok and self.contains_own

    def to_dict(self):
        return {
            "r": self.r,
            "closure_sizes": {str(k): v for k, v in self.sizes.items()},
            "own_size": self.own_size,
            "chain_ok": self.chain_ok,
            "contains_own": self.contains_own,
            "closed_at": self.closed_at,
        }


def closure_descent_suite(spec: GroupSpec, root_type=0, r: int = 2, kmax: int = 2, **kw) -> DescentReport:
    own = own_profile(spec, root_type, r, **kw)
    profs = {k: kclosure_profile(spec, k, root_type, r, **kw) for k in range(1, kmax + 1)}
    chain = all(profile_contains(profs[k], profs[k + 1]) for k in range(1, kmax))
    contains = all(set(own.portraits) <= set(p.portraits) for p in profs.values())
    closed = next((k for k in range(1, kmax + 1) if profs[k].portraits == own.portraits), None)
    return DescentReport(r, {k: len(p) for k, p in profs.items()}, len(own), chain, contains, closed)


# ---------------------------------------------------------------------------
# valency-one experiment


def valency_one_fixture() -> EdgeIndexedGraph:
    Q = EdgeIndexedGraph()
    for nm in "abc":
        Q.add_vertex(nm)
    Q.add_edge("a", "b", 3, 3)
    Q.add_edge("b", "c", 5, 1)
    return Q


@dataclass
class ValencyOneReport:
    degrees: list[int]
    quotient_ok: bool
    stabilizer_size: int
    five_cycle: list[int] | None
    core_primes: dict
    core_ok: bool
    layer0_order: int
    obstruction: bool
    closure_layer0: int

    @property
    def ok(self) -> bool:
        return (
            self.quotient_ok
            and self.stabilizer_size == 360
            and self.five_cycle is not None
            and self.core_ok
            and self.obstruction
        )

    def to_dict(self):
        return {
            "degrees": self.degrees,
            "quotient_ok": self.quotient_ok,
            "stabilizer_size": self.stabilizer_size,
            "five_cycle_portrait": self.five_cycle,
            "core_primes": {str(n): sorted(p) for n, p in self.core_primes.items()},
            "core_ok": self.core_ok,
            "layer0_order": self.layer0_order,
            "closure_layer0_order": self.closure_layer0,
            "obstruction": self.obstruction,
            "ok": self.ok,
        }


def _find_leaf_cycle(P, T) -> Portrait | None:
    """Order-5 portrait fixing the type-a neighbors and cycling the leaves."""
    a = T.base.vertex("a")
    for g in P.elements():
        star = T.nbrs[0]
        if any(g(x) != x for x in star if T.vtype[x] == a):
            continue
        if portrait_order(g) != 5:
            continue
        perm = g.local_action(0)
        leaves = [c + 1 for c, x in enumerate(star) if T.vtype[x] != a]
        cyc = perm.cycles()
        if len(cyc) == 1 and sorted(cyc[0]) == leaves:
            return g
    return None


def valency_one_report(**kw) -> ValencyOneReport:
    base, spec = preset_valency_one()
    degrees = [base.degree(q) for q in range(base.n_vertices)]
    quotient_ok = eig_isomorphic(quotient_graph(spec, 4, "a"), valency_one_fixture())
    P = stabilizer_profile(spec, "b", 1, **kw)
    g = _find_leaf_cycle(P, P.tree)
    _, core = preset("t3sym")
    core_primes = {n: prime_content(core, "a", n, **kw) for n in range(4)}
    core_union = frozenset().union(*core_primes.values())
    core_ok = core_union <= {2, 3}
    layer0 = layer_order(spec, "b", 0, **kw)
    # a second spec with the same type-b profile at r = 1
    closure0 = layer_order(KClosure(spec, 1), "b", 0, **kw)
    obstruction = layer0 % 5 == 0 and closure0 % 5 == 0 and 5 not in core_union
    return ValencyOneReport(
        degrees,
        quotient_ok,
        len(P),
        None if g is None else list(g.images),
        core_primes,
        core_ok,
        layer0,
        obstruction,
        closure0,
    )
