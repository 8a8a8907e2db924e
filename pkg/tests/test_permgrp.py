import pytest
from hypothesis import given, settings, strategies as st

from chabtree.errors import CapacityError, DomainError
from chabtree.permgrp import (
    Permutation,
    PermGroup,
    alternating_group,
    block_product,
    contains_alternating,
    cyclic_group,
    group_order,
    group_primes,
    parse_group,
    point_stabilizer,
    symmetric_group,
    transitivity_degree,
    trivial_group,
)


def P(text, n):
    return Permutation.parse(text, n)


def G(n, *gens):
    return PermGroup(n, tuple(P(g, n) for g in gens))


def test_parse_and_print_round_trip():
    p = P("(1 2 3)(4 5)", 5)
    assert str(p) == "(1 2 3)(4 5)"
    assert str(Permutation.identity(4)) == "()"
    assert Permutation.parse("()", 3).is_identity()


def test_composition_applies_right_factor_first():
    assert P("(1 2 3)", 3) * P("(1 2)", 3) == P("(1 3)", 3)


def test_bad_input_rejected():
    with pytest.raises(DomainError):
        Permutation((1, 1, 2))
    with pytest.raises(DomainError):
        Permutation.parse("(1 2", 3)
    with pytest.raises(DomainError):
        Permutation.from_cycles([(1, 4)], 3)


@pytest.mark.parametrize(
    "group, order",
    [(G(3, "(1 2 3)"), 3), (G(3, "(1 2)", "(1 2 3)"), 6), (PermGroup(5, ()), 1)],
)
def test_group_order_examples(group, order):
    assert group_order(group) == order


def test_degree_cap():
    with pytest.raises(CapacityError):
        group_order(PermGroup(13, ()))


def test_point_stabilizer_examples():
    assert group_order(point_stabilizer(symmetric_group(3), 1)) == 2
    assert set(point_stabilizer(symmetric_group(3), 1).elements) == {
        Permutation.identity(3), P("(2 3)", 3)
    }
    assert group_order(point_stabilizer(alternating_group(3), 1)) == 1
    assert group_order(point_stabilizer(trivial_group(4), 1)) == 1
    with pytest.raises(DomainError):
        point_stabilizer(symmetric_group(3), 4)


def test_group_primes():
    assert group_primes(symmetric_group(3)) == {2, 3}
    assert group_primes(alternating_group(5)) == {2, 3, 5}
    assert group_primes(trivial_group(3)) == frozenset()


def test_transitivity_degree_examples():
    assert transitivity_degree(symmetric_group(3)) == 2
    assert transitivity_degree(alternating_group(3)) == 1
    assert transitivity_degree(G(3, "(1 2)")) == 0


def test_contains_alternating_examples():
    assert contains_alternating(symmetric_group(5))
    assert contains_alternating(alternating_group(3))
    assert not contains_alternating(G(4, "(1 2 3 4)"))
    with pytest.raises(DomainError):
        contains_alternating(symmetric_group(2))


def test_parse_group_forms():
    assert group_order(parse_group("Sym(4)")) == 24
    assert group_order(parse_group("Alt(5)")) == 60
    assert group_order(parse_group("Cyc(5)")) == 5
    assert group_order(parse_group("<(1 2); (1 2 3)>", 3)) == 6
    assert group_order(parse_group("<(1 2)>@4")) == 2
    prod = parse_group("Sym(3)*Alt(5)")
    assert prod.degree == 8 and group_order(prod) == 360
    assert prod.preserves((1, 2, 3)) and prod.preserves((4, 5, 6, 7, 8))
    with pytest.raises(DomainError):
        parse_group("Foo(3)")


def test_block_product_restricts_to_factors():
    prod = block_product(symmetric_group(2), cyclic_group(3))
    assert prod.restrict_to((3, 4, 5)) == cyclic_group(3)


@st.composite
def small_groups(draw):
    n = draw(st.integers(1, 6))
    gens = draw(st.lists(st.permutations(range(1, n + 1)), min_size=0, max_size=3))
    return PermGroup(n, tuple(Permutation(tuple(g)) for g in gens))


@settings(max_examples=150, deadline=None)
@given(small_groups(), st.data())
def test_orbit_stabilizer(group, data):
    p = data.draw(st.integers(1, group.degree))
    assert len(group.orbit(p)) * group_order(point_stabilizer(group, p)) == group_order(group)


@settings(max_examples=100, deadline=None)
@given(small_groups())
def test_two_transitive_order_divisible(group):
    n = group.degree
    if transitivity_degree(group) == 2 and n > 1:
        assert group_order(group) % (n * (n - 1)) == 0
    if n >= 3 and contains_alternating(group):
        assert transitivity_degree(group) >= 1
        if n >= 4:
            assert transitivity_degree(group) == 2
