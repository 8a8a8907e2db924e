import random

import pytest

from chabtree.eig import Dart, EdgeIndexedGraph, eig_isomorphic, export_dot, is_unimodular, validate_eig
from chabtree.errors import CapacityError, DomainError

VALENCY_PATH = [(3, 3), (5, 1)]


def relabeled(Q, perm, names=None):
    """Copy of Q with vertex v renamed to position perm[v] and edges shuffled."""
    R = EdgeIndexedGraph()
    order = sorted(range(Q.n_vertices), key=lambda v: perm[v])
    for v in order:
        R.add_vertex(names[v] if names else f"x{perm[v]}", Q.colors[v])
    edges = list(range(0, len(Q.darts), 2))
    random.Random(1).shuffle(edges)
    lookup = {v: i for i, v in enumerate(order)}
    for i in edges:
        d, e = Q.darts[i], Q.darts[i + 1]
        R.add_edge(lookup[d.origin], lookup[d.target], d.index, e.index)
    return R


def test_validate_examples():
    assert validate_eig(EdgeIndexedGraph.single_edge(3, 3)) == []
    Q = EdgeIndexedGraph.single_edge(3, 3)
    Q.darts[0] = Dart(0, 1, 1, 0)
    assert any("index must be >= 1" in m for m in validate_eig(Q))
    Q = EdgeIndexedGraph.single_edge(3, 3)
    Q.darts.append(Dart(0, 1, 7, 1))
    assert validate_eig(Q)[0].endswith("reversal involution broken")


def test_unimodular_examples():
    assert is_unimodular(EdgeIndexedGraph.single_edge(3, 3))
    assert not is_unimodular(EdgeIndexedGraph.single_loop(1, 2))
    assert is_unimodular(EdgeIndexedGraph.path(VALENCY_PATH))
    assert is_unimodular(EdgeIndexedGraph.single_loop(2, 2))


def test_unimodular_cycle():
    Q = EdgeIndexedGraph()
    for nm in "abc":
        Q.add_vertex(nm)
    Q.add_edge("a", "b", 2, 1)
    Q.add_edge("b", "c", 3, 1)
    Q.add_edge("c", "a", 1, 6)
    assert is_unimodular(Q)
    Q.darts[-1] = Dart(0, 2, Q.darts[-1].reverse, 5)
    assert not is_unimodular(Q)


def test_unimodular_disconnected():
    Q = EdgeIndexedGraph()
    Q.add_vertex("a")
    Q.add_vertex("b")
    with pytest.raises(DomainError):
        is_unimodular(Q)


def test_isomorphism_examples():
    Q = EdgeIndexedGraph.path(VALENCY_PATH)
    assert eig_isomorphic(Q, Q)
    assert not eig_isomorphic(EdgeIndexedGraph.single_edge(3, 3), EdgeIndexedGraph.single_edge(3, 4))
    assert eig_isomorphic(Q, relabeled(Q, [2, 0, 1]))


def test_isomorphism_sees_orientation():
    assert eig_isomorphic(EdgeIndexedGraph.single_edge(2, 5), EdgeIndexedGraph.single_edge(5, 2))
    A = EdgeIndexedGraph.path([(2, 5), (2, 5)])
    B = EdgeIndexedGraph.path([(2, 5), (5, 2)])
    assert not eig_isomorphic(A, B)


def test_isomorphism_equivalence_and_unimodular_invariance():
    rng = random.Random(7)
    for _ in range(30):
        Q = EdgeIndexedGraph()
        n = rng.randint(1, 5)
        for v in range(n):
            Q.add_vertex(f"v{v}", rng.randint(0, 1))
        for v in range(1, n):
            Q.add_edge(rng.randrange(v), v, rng.randint(1, 3), rng.randint(1, 3))
        for _ in range(rng.randint(0, 2)):
            Q.add_edge(rng.randrange(n), rng.randrange(n), rng.randint(1, 3), rng.randint(1, 3))
        p1 = list(range(n))
        rng.shuffle(p1)
        p2 = list(range(n))
        rng.shuffle(p2)
        A, B = relabeled(Q, p1), relabeled(relabeled(Q, p1), p2)
        assert eig_isomorphic(Q, A) and eig_isomorphic(A, B) and eig_isomorphic(Q, B)
        assert eig_isomorphic(A, Q)
        assert is_unimodular(Q) == is_unimodular(A)
        if Q.is_tree():
            assert is_unimodular(Q)


def test_isomorphism_cap():
    Q = EdgeIndexedGraph.path([(1, 1)] * 12)
    with pytest.raises(CapacityError):
        eig_isomorphic(Q, Q)


def test_text_round_trip_and_errors():
    Q = EdgeIndexedGraph.path(VALENCY_PATH)
    Q.add_edge("a", "a", 2, 3)
    R = EdgeIndexedGraph.from_text(Q.to_text())
    assert R.to_text() == Q.to_text()
    assert "e a a i+=2 i-=3" in Q.to_text()
    with pytest.raises(DomainError, match="line 2"):
        EdgeIndexedGraph.from_text("v a\nbogus\n")
    with pytest.raises(DomainError):
        EdgeIndexedGraph.from_text("v a\nv b\ne a b i12=0 i21=1\n")


def test_export_dot():
    assert export_dot(EdgeIndexedGraph()) == "digraph Q {\n  edge [dir=none];\n}\n"
    dot = export_dot(EdgeIndexedGraph.single_edge(3, 3))
    assert "v0 -> v1 [taillabel=3 headlabel=3];" in dot
    loop = export_dot(EdgeIndexedGraph.single_loop(1, 2))
    assert "v0 -> v0 [taillabel=1 headlabel=2];" in loop
    assert export_dot(EdgeIndexedGraph.single_edge(3, 3)) == dot
