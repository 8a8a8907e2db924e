"""Finite certificates for closed groups acting on trees.

Typical use::

    from chabtree import preset, stabilizer_profile
    base, spec = preset("t3sym")
    len(stabilizer_profile(spec, "a", 2))   # 48
"""
from .eig import EdgeIndexedGraph, eig_isomorphic, export_dot, is_unimodular, validate_eig
from .errors import (
    CapacityError,
    ChabtreeError,
    DomainError,
    NotLocallyDetectableError,
    UnsupportedError,
)
from .permgrp import (
    Permutation,
    PermGroup,
    alternating_group,
    contains_alternating,
    group_order,
    parse_group,
    symmetric_group,
    transitivity_degree,
)
from .portrait import Portrait, compose, decode, encode, inverse, local_action, portrait_order
from .profile import (
    Profile,
    ProfileCache,
    extension_check,
    kclosure_profile,
    moving_profile,
    plus_k_profile,
    profile_contains,
    stabilizer_profile,
)
from .spec import KClosure, PlusK, Universal, make_universal, membership, parse_spec, preset, preset_valency_one
from .tree import TreeBall, build_tree_ball

__version__ = "0.1.0"
