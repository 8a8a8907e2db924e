import pytest
from hypothesis import given, settings, strategies as st

from chabtree.errors import DomainError
from chabtree.permgrp import Permutation
from chabtree.portrait import (
    Portrait,
    compose,
    decode,
    encode,
    inverse,
    local_action,
    portrait_order,
)
from chabtree.profile import moving_profile, stabilizer_profile
from chabtree.spec import preset

SYM = preset("t3sym")[1]
R2 = stabilizer_profile(SYM, "a", 2).elements()
POOL = R2 + stabilizer_profile(SYM, "a", 3).elements() + moving_profile(SYM, "a", 2, 2).elements()


def with_root_action(perm: str) -> Portrait:
    want = Permutation.parse(perm, 3)
    return next(g for g in R2 if local_action(g, 0) == want)


def test_identity_and_inverse_laws():
    ident = Portrait.identity(R2[0].tree, 2)
    for p in R2:
        assert compose(ident, p) == p
        assert compose(p, inverse(p)) == ident
    assert local_action(ident, 0).is_identity()


def test_root_product():
    g, h = with_root_action("(1 2 3)"), with_root_action("(1 2)")
    assert local_action(compose(g, h), 0) == Permutation.parse("(1 3)", 3)


def test_subtree_swap():
    T = R2[0].tree
    third = T.nbrs[0][2]
    swap = [g for g in R2 if local_action(g, 0) == Permutation.parse("(1 2)", 3)
            and all(g(x) == x for x in T.ball_around(third, 1))]
    assert swap
    assert {portrait_order(g) for g in swap} == {2, 4}
    assert portrait_order(Portrait.identity(T, 2)) == 1


def test_boundary_and_domain_errors():
    g = R2[1]
    with pytest.raises(DomainError):
        local_action(g, g.tree.ball_size(2) - 1)
    moving = next(p for p in moving_profile(SYM, "a", 2, 2).elements() if p.displacement == 2)
    with pytest.raises(DomainError):
        portrait_order(moving)
    far = next(p for p in moving_profile(SYM, "a", 1, 2).elements() if p.displacement == 2)
    with pytest.raises(DomainError):
        compose(far, far)
    with pytest.raises(DomainError):
        Portrait(g.tree, 2, (0, 1))


def test_encoding():
    g = R2[5]
    assert encode(g) == encode(g)
    assert decode(encode(g), g.tree) == g
    T = g.tree
    assert encode(Portrait.identity(T, 1)) != encode(Portrait.identity(T, 2))


def test_restrict_commutes_with_compose():
    for g in R2[:10]:
        for h in R2[-10:]:
            assert compose(g, h).restrict(1) == compose(g.restrict(1), h.restrict(1))


def test_type_preservation():
    for g in POOL:
        T = g.tree
        assert g.is_valid()
        assert all(T.vtype[g(v)] == T.vtype[v] for v in range(len(g.images)))


@settings(max_examples=1200, deadline=None)
@given(st.sampled_from(POOL), st.sampled_from(POOL))
def test_cocycle_identity(g, h):
    try:
        gh = compose(g, h)
    except DomainError:
        return
    for v in range(gh.tree.ball_size(gh.r - 1)):
        assert local_action(gh, v) == local_action(g, h(v)) * local_action(h, v)
