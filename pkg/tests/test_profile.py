import logging
import threading

import pytest

from chabtree.acceptance import brute_force_portraits
from chabtree.errors import CapacityError, DomainError
from chabtree.portrait import encode_images
from chabtree.profile import (
    FORMAT_VERSION,
    Profile,
    ProfileCache,
    cache_key,
    clear_memory_cache,
    extension_check,
    extension_check_profiles,
    kclosure_profile,
    moving_profile,
    own_profile,
    plus_k_profile,
    profile_contains,
    set_disk_cache,
    stabilizer_profile,
)
from chabtree.spec import KClosure, PlusK


@pytest.mark.parametrize("name,sizes", [
    ("t3sym", [1, 6, 48, 3072]),
    ("t3alt", [1, 3, 3, 3]),
    ("t3triv", [1, 1, 1, 1]),
    ("t3intrans", [1, 2, 4, 16]),
])
def test_stabilizer_counts(request, name, sizes):
    spec = request.getfixturevalue(name)
    assert [len(stabilizer_profile(spec, "a", r)) for r in range(4)] == sizes


@pytest.mark.parametrize("name", ["t3sym", "t3alt", "t3triv"])
@pytest.mark.parametrize("r", [1, 2])
def test_matches_brute_force_for_transitive_local_groups(request, name, r):
    spec = request.getfixturevalue(name)
    P = stabilizer_profile(spec, "a", r)
    oracle = brute_force_portraits(spec.local, spec.base, "a", r)
    assert sorted(P.images()) == sorted(oracle)


def test_intransitive_profile_keeps_only_extendable_portraits(t3intrans):
    # interior checks alone admit 16 radius-2 portraits; 12 of them force an
    # illegal local action one level further out
    spec = t3intrans
    P = stabilizer_profile(spec, "a", 2)
    loose = set(brute_force_portraits(spec.local, spec.base, "a", 2))
    assert len(loose) == 16 and set(P.images()) < loose
    n = P.tree.ball_size(2)
    restricted = {im[:n] for im in brute_force_portraits(spec.local, spec.base, "a", 3)}
    assert restricted == set(P.images())


def test_moving_profile_counts(t3sym, t3alt, t3triv):
    # type-preserving maps cannot send the root to a neighbour
    assert [len(moving_profile(t3sym, "a", 1, D)) for D in (0, 1, 2)] == [6, 6, 42]
    assert [len(moving_profile(t3alt, "a", 1, D)) for D in (1, 2)] == [3, 21]
    assert [len(moving_profile(t3triv, "a", 1, D)) for D in (1, 2)] == [1, 7]


def test_moving_profile_orbit_count(t3sym):
    # each same-type vertex within distance D carries one coset of the stabilizer
    r, D = 2, 2
    P = moving_profile(t3sym, "a", r, D)
    stab = stabilizer_profile(t3sym, "a", r)
    targets = {g(0) for g in P}
    T = P.tree
    reachable = [v for v in range(T.ball_size(D)) if T.depth[v] % 2 == 0]
    assert targets == set(reachable)
    assert len(P) == len(reachable) * len(stab)
    assert {g.images for g in P if g(0) == 0} == set(stab.images())


def test_kclosure_of_universal_is_itself(t3sym, t3alt):
    for spec in (t3sym, t3alt):
        for r in (1, 2):
            assert kclosure_profile(spec, 1, "a", r).portraits == stabilizer_profile(spec, "a", r).portraits


def test_kclosure_monotone_in_k(t3sym):
    for r in (1, 2):
        own = stabilizer_profile(t3sym, "a", r)
        c1, c2, c3 = (kclosure_profile(t3sym, k, "a", r) for k in (1, 2, 3))
        assert profile_contains(c1, c2) and profile_contains(c2, c3) and profile_contains(c3, own)


def test_kclosure_domain(t3sym):
    with pytest.raises(DomainError):
        kclosure_profile(t3sym, 1, "a", 0)
    with pytest.raises(DomainError):
        KClosure(t3sym, 0)


def test_trivial_closure_is_identity(t3triv):
    P = kclosure_profile(t3triv, 1, "a", 2)
    assert P.images() == [tuple(range(P.tree.ball_size(2)))]


def test_plus_k(t3sym, t3alt):
    assert len(plus_k_profile(t3sym, 1, "a", 2)) == 48
    pa = plus_k_profile(t3alt, 1, "a", 2)
    assert pa.images() == [tuple(range(pa.tree.ball_size(2)))]
    assert profile_contains(stabilizer_profile(t3sym, "a", 2), plus_k_profile(t3sym, 2, "a", 2))
    assert own_profile(PlusK(t3sym, 1), "a", 2).portraits == plus_k_profile(t3sym, 1, "a", 2).portraits


def test_plus_k_domain(t3sym):
    with pytest.raises(DomainError):
        plus_k_profile(t3sym, 3, "a", 2)
    with pytest.raises(DomainError):
        PlusK(t3sym, 0)


def test_profile_contains_rejects_mismatched_parameters(t3sym):
    with pytest.raises(DomainError):
        profile_contains(stabilizer_profile(t3sym, "a", 1), stabilizer_profile(t3sym, "a", 2))
    with pytest.raises(DomainError):
        profile_contains(stabilizer_profile(t3sym, "a", 1), moving_profile(t3sym, "a", 1, 2))


def test_extension_check_passes_for_exact_profiles(t3sym, t3alt, t3intrans):
    for spec in (t3sym, t3alt, t3intrans):
        res = extension_check(spec, "a", 2)
        assert res.ok and not res.witnesses and res.checked == len(stabilizer_profile(spec, "a", 2))


def test_extension_check_reports_corrupted_portrait(t3sym):
    P2 = stabilizer_profile(t3sym, "a", 2)
    P3 = stabilizer_profile(t3sym, "a", 3)
    assert extension_check_profiles(P2, P3)
    # drop every radius-3 extension of one radius-2 portrait
    n = P2.tree.ball_size(2)
    victim = P2.images()[5]
    kept = tuple(b for b, im in zip(P3.portraits, P3.images()) if im[:n] != victim)
    broken = Profile(P3.spec_hash, P3.root_type, 3, 0, kept, tree=P3.tree)
    res = extension_check_profiles(P2, broken)
    assert not res.ok
    assert res.witnesses == [encode_images(2, victim)]
    with pytest.raises(DomainError):
        extension_check_profiles(P2, P2)


def test_restriction_compatibility(t3sym, t3intrans):
    for spec in (t3sym, t3intrans):
        P2, P3 = stabilizer_profile(spec, "a", 2), stabilizer_profile(spec, "a", 3)
        n = P2.tree.ball_size(2)
        assert {im[:n] for im in P3.images()} == set(P2.images())


def test_divisibility(t3sym):
    sizes = [len(stabilizer_profile(t3sym, "a", r)) for r in range(4)]
    assert all(b % a == 0 for a, b in zip(sizes, sizes[1:]))


def test_fix_parameter(t3sym):
    P = stabilizer_profile(t3sym, "a", 2, fix=1)
    n = P.tree.ball_size(1)
    assert all(im[:n] == tuple(range(n)) for im in P.images())
    assert len(P) == 48 // 6


def test_threads_are_deterministic(t3sym):
    clear_memory_cache()
    one = stabilizer_profile(t3sym, "a", 3, threads=1)
    clear_memory_cache()
    four = stabilizer_profile(t3sym, "a", 3, threads=4)
    assert one.portraits == four.portraits


def test_capacity(t3sym):
    with pytest.raises(CapacityError):
        stabilizer_profile(t3sym, "a", 9)


class TestDiskCache:
    def test_roundtrip(self, tmp_path, t3sym):
        cache = ProfileCache(tmp_path)
        key = cache_key(t3sym, 0, 2, 0)
        assert cache.lookup(key) is None
        P = stabilizer_profile(t3sym, "a", 2)
        cache.store(key, P)
        assert cache.lookup(key) == P.portraits

    def test_env_default(self, tmp_path, monkeypatch):
        monkeypatch.setenv("CHABAUTY_CACHE_DIR", str(tmp_path / "x"))
        assert ProfileCache().dir == tmp_path / "x"

    def test_profiles_reload_from_disk(self, tmp_path, t3alt):
        cache = ProfileCache(tmp_path)
        set_disk_cache(cache)
        try:
            clear_memory_cache()
            first = stabilizer_profile(t3alt, "a", 2)
            assert list(tmp_path.glob("*.prof"))
            clear_memory_cache()
            again = stabilizer_profile(t3alt, "a", 2)
            assert again.portraits == first.portraits
            assert len(again.elements()) == 3
        finally:
            set_disk_cache(None)

    def test_version_mismatch_is_a_miss(self, tmp_path, caplog):
        cache = ProfileCache(tmp_path)
        cache.store("k", (b"abc",))
        path = tmp_path / "k.prof"
        data = bytearray(path.read_bytes())
        data[6:10] = (FORMAT_VERSION + 1).to_bytes(4, "little")
        path.write_bytes(bytes(data))
        with caplog.at_level(logging.WARNING):
            assert cache.lookup("k") is None
        assert "version" in caplog.text

    def test_corrupt_entry_is_a_miss(self, tmp_path, caplog):
        cache = ProfileCache(tmp_path)
        cache.store("k", (b"abc", b"defg"))
        path = tmp_path / "k.prof"
        path.write_bytes(path.read_bytes()[:-2])
        with caplog.at_level(logging.WARNING):
            assert cache.lookup("k") is None
        assert "truncated" in caplog.text
        path.write_bytes(b"junk")
        assert cache.lookup("k") is None

    def test_concurrent_stores(self, tmp_path):
        cache = ProfileCache(tmp_path)
        blobs = tuple(bytes([i]) * 10 for i in range(50))
        threads = [threading.Thread(target=cache.store, args=("k", blobs)) for _ in range(8)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert cache.lookup("k") == blobs
        assert not list(tmp_path.glob("*.tmp"))
