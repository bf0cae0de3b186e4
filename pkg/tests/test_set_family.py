import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fairnn import BuildError, GroundSet, SubFamilyQuery, build_family


def random_family_sets(rng, n, g):
    return [sorted(rng.choice(n, size=rng.integers(1, n + 1), replace=False))
            for _ in range(g)]


def test_permutation_arrays_are_mutually_inverse():
    g = GroundSet.shuffled(50, np.random.default_rng(0))
    assert np.array_equal(g.rank_of[g.element_at_rank], np.arange(50))
    assert np.array_equal(g.element_at_rank[g.rank_of], np.arange(50))


def test_empty_ground_set():
    fam = build_family([], seed=0)
    assert fam.n == 0
    assert fam.num_sets == 0


def test_shuffle_is_uniform():
    # element 0 should land on each rank of a 4-element ground set equally
    counts = np.zeros(4)
    for seed in range(4000):
        g = GroundSet.shuffled(4, np.random.default_rng(seed))
        counts[g.rank_of[0]] += 1
    from scipy.stats import chisquare
    assert chisquare(counts).pvalue > 0.001


def test_build_rejects_bad_ids():
    with pytest.raises(BuildError):
        build_family([[0, -1]], seed=0)
    with pytest.raises(BuildError):
        build_family([[0, 0]], seed=0)
    with pytest.raises(BuildError):
        build_family([[5]], seed=0, n=3)


def test_sets_are_rank_sorted_and_sizes_tracked():
    fam = build_family([[0, 1, 2], [2, 3], [], [4]], seed=1)
    assert fam.total_size == 6
    assert fam.max_multiplicity == 2
    for s in fam.sets:
        assert s.ranks == sorted(s.ranks)
        assert sorted(int(fam.ground.element_at_rank[r]) for r in s.ranks) \
            == sorted(s.ids)


def test_check_query_validation():
    fam = build_family([[0], [1]], seed=0)
    with pytest.raises(BuildError):
        fam.check_query(SubFamilyQuery(set_ids=[0, 0]))
    with pytest.raises(BuildError):
        fam.check_query(SubFamilyQuery(set_ids=[2]))
    assert len(fam.check_query(SubFamilyQuery(set_ids=[0, 1]))) == 2


@given(st.integers(0, 2 ** 31), st.integers(1, 30), st.integers(1, 6),
       st.integers(0, 31), st.integers(0, 31))
@settings(max_examples=60, deadline=None)
def test_rank_range_matches_brute_force(seed, n, g, lo, hi):
    rng = np.random.default_rng(seed)
    fam = build_family(random_family_sets(rng, n, g), rng=rng, n=n)
    for sid in range(g):
        got = fam.rank_range(sid, lo, hi)
        want = [int(fam.ground.element_at_rank[r])
                for r in range(max(lo, 0), min(hi, n))
                if int(fam.ground.element_at_rank[r]) in fam.sets[sid].members]
        assert got == want
        assert fam.rank_count(sid, lo, hi) == len(want)


@given(st.integers(0, 2 ** 31), st.integers(2, 25), st.integers(1, 6),
       st.lists(st.tuples(st.integers(0, 24), st.integers(0, 24)),
                max_size=8))
@settings(max_examples=60, deadline=None)
def test_swap_ranks_preserves_invariants(seed, n, g, swaps):
    rng = np.random.default_rng(seed)
    fam = build_family(random_family_sets(rng, n, g), rng=rng, n=n)
    for x, y in swaps:
        fam.swap_ranks(x % n, y % n)
    assert np.array_equal(fam.ground.rank_of[fam.ground.element_at_rank],
                          np.arange(n))
    for s in fam.sets:
        assert s.ranks == sorted(s.ranks)
        assert sorted(int(fam.ground.rank_of[x]) for x in s.ids) == s.ranks


def test_swap_ranks_swaps_two_elements():
    fam = build_family([[0, 1], [1, 2]], seed=5)
    r0, r2 = int(fam.ground.rank_of[0]), int(fam.ground.rank_of[2])
    fam.swap_ranks(0, 2)
    assert int(fam.ground.rank_of[0]) == r2
    assert int(fam.ground.rank_of[2]) == r0


def test_min_rank():
    fam = build_family([[0, 1, 2], []], seed=3)
    assert fam.min_rank(0) == min(int(fam.ground.rank_of[x]) for x in (0, 1, 2))
    assert fam.min_rank(1) is None
