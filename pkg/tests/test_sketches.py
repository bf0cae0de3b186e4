import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fairnn import (DistinctSketch, EstimationError, MergeError, SamplingError,
                    WeightedTree, estimate_subset_fraction, merge_estimate)


# -- distinct sketch --------------------------------------------------------


def test_exact_mode_below_capacity():
    sk = DistinctSketch(eps=0.5, fail=0.01, seed=0)
    sk.insert_many(np.arange(3))
    assert sk.estimate() == 3.0
    sk.insert(1)  # duplicate support does not change the rows
    assert sk.estimate() == 3.0


def test_rows_hold_smallest_distinct_hashes():
    sk = DistinctSketch(eps=0.5, fail=0.2, seed=1, t=8)
    xs = np.arange(100)
    sk.insert_many(xs)
    with np.errstate(over="ignore"):
        all_hashes = xs.astype(np.uint64)[None, :] * sk._a[:, None] + sk._b[:, None]
    for w in range(sk.num_rows):
        want = np.unique(all_hashes[w])[:8]
        assert np.array_equal(sk.rows[w], want)


def test_accuracy_over_seeds():
    bad = 0
    for seed in range(80):
        sk = DistinctSketch(eps=0.5, fail=0.01, seed=seed)
        sk.insert_many(np.arange(2000))
        if not (1000 <= sk.estimate() <= 3000):
            bad += 1
    assert bad <= 2


@given(st.integers(0, 2 ** 31), st.integers(0, 400), st.integers(0, 400))
@settings(max_examples=30, deadline=None)
def test_merge_equals_single_stream(seed, a_hi, b_lo):
    base = DistinctSketch(eps=0.5, fail=0.05, seed=seed)
    a, b, single = base.spawn(), base.spawn(), base.spawn()
    xs_a = np.arange(0, a_hi)
    xs_b = np.arange(b_lo, 400)
    a.insert_many(xs_a)
    b.insert_many(xs_b)
    single.insert_many(np.concatenate([xs_a, xs_b]))
    assert a.merge(b) == single


def test_merge_rejects_different_hashers():
    a = DistinctSketch(seed=0)
    b = DistinctSketch(seed=1)
    with pytest.raises(MergeError):
        a.merge(b)
    with pytest.raises(MergeError):
        merge_estimate([a, b])


def test_merge_estimate_matches_pairwise_merge():
    base = DistinctSketch(eps=0.5, fail=0.05, seed=3)
    parts = []
    for lo in range(0, 900, 300):
        sk = base.spawn()
        sk.insert_many(np.arange(lo, lo + 500))
        parts.append(sk)
    folded = parts[0].merge(parts[1]).merge(parts[2])
    assert merge_estimate(parts) == folded.estimate()


# -- weighted tree ----------------------------------------------------------


@given(st.lists(st.floats(0, 100, allow_nan=False), min_size=1, max_size=40),
       st.lists(st.tuples(st.integers(0, 39), st.floats(0, 50)), max_size=10))
@settings(max_examples=60, deadline=None)
def test_tree_total_tracks_updates(weights, updates):
    tree = WeightedTree(weights)
    ref = list(weights)
    for i, w in updates:
        i %= len(ref)
        tree.update(i, w)
        ref[i] = w
    assert tree.total == pytest.approx(sum(ref))
    for i, w in enumerate(ref):
        assert tree.weight(i) == pytest.approx(w)


def test_tree_samples_proportionally():
    tree = WeightedTree([1.0, 2.0, 0.0, 5.0])
    rng = np.random.default_rng(0)
    counts = np.zeros(4)
    T = 40000
    for _ in range(T):
        counts[tree.sample(rng)] += 1
    freq = counts / T
    want = np.array([1, 2, 0, 5]) / 8.0
    assert counts[2] == 0
    assert np.all(np.abs(freq - want) < 0.01)


def test_tree_errors():
    tree = WeightedTree([0.0, 0.0])
    with pytest.raises(SamplingError):
        tree.sample(np.random.default_rng(0))
    with pytest.raises(ValueError):
        tree.update(0, -1.0)
    with pytest.raises(IndexError):
        tree.update(5, 1.0)
    with pytest.raises(ValueError):
        WeightedTree([-1.0])


# -- sequential subset estimation -------------------------------------------


def test_subset_estimate_within_bounds():
    rng = np.random.default_rng(1)
    bad = 0
    for _ in range(60):
        est = estimate_subset_fraction(100, lambda i: i < 25, 0.2, 0.05, rng)
        if not (0.8 * 25 <= est <= 1.2 * 25):
            bad += 1
    assert bad <= 6  # fail prob 0.05 per trial


def test_subset_estimate_full_universe():
    rng = np.random.default_rng(2)
    est = estimate_subset_fraction(10, lambda i: True, 0.3, 0.1, rng)
    assert est == pytest.approx(10.0)


def test_subset_estimate_cap_on_empty_target():
    rng = np.random.default_rng(3)
    with pytest.raises(EstimationError):
        estimate_subset_fraction(10, lambda i: False, 0.5, 0.1, rng,
                                 probe_cap=2000)


def test_subset_estimate_rejects_bad_args():
    rng = np.random.default_rng(0)
    with pytest.raises(ValueError):
        estimate_subset_fraction(0, lambda i: True, 0.5, 0.1, rng)
    with pytest.raises(ValueError):
        estimate_subset_fraction(5, lambda i: True, -1, 0.1, rng)
