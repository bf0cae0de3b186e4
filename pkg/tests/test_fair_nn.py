import math

import numpy as np
import pytest
from scipy.stats import chisquare

from fairnn import (FairAnswer, MinHash1Bit, ReplicaExhaustionError,
                    SampleStatus, build_lsh, default_outlier_budget,
                    fair_ann_approx, fair_nn_approx, fair_nn_dependent,
                    fair_nn_independent, fair_nn_independent_whp)

NUM_NEAR = 8


def planted_index(seed=0, t_rep=3, L=12):
    """8 near sets (J ~ 0.61 to the query), 40 far noise sets."""
    rng = np.random.default_rng(seed)
    q = frozenset(range(40))
    pts = []
    for i in range(NUM_NEAR):
        pts.append(frozenset(range(28)) | frozenset(range(50 + i * 6,
                                                          56 + i * 6)))
    for _ in range(40):
        pts.append(frozenset(int(x) for x in
                             rng.choice(np.arange(100, 200), 12, replace=False)))
    idx = build_lsh(pts, MinHash1Bit(4), L=L, t_rep=t_rep,
                    sim_near=0.5, sim_far=0.3, seed=seed + 1)
    return q, idx


def assert_uniform_over_near(draw, q, idx, T=2500, tol_p=0.001):
    counts = np.zeros(NUM_NEAR)
    for _ in range(T):
        ans = draw()
        assert ans.ok
        assert ans.point < NUM_NEAR
        assert ans.distance <= idx.radius
        counts[ans.point] += 1
    assert chisquare(counts).pvalue > tol_p


def test_default_outlier_budget_formula():
    q, idx = planted_index()
    assert default_outlier_budget(idx) == 3 * idx.L * math.ceil(
        math.log2(idx.n))


def test_dependent_is_marginally_uniform():
    q, idx = planted_index(seed=1)
    rng = np.random.default_rng(0)
    assert_uniform_over_near(lambda: fair_nn_dependent(idx, q, rng), q, idx)


def test_ann_approx_is_eps_uniform_over_near():
    # every point within the approx radius here is also within the radius,
    # so the approximate neighborhood is exactly the 8 planted points
    q, idx = planted_index(seed=2)
    rng = np.random.default_rng(1)
    eps = 0.2
    T = 4000
    counts = np.zeros(NUM_NEAR)
    for _ in range(T):
        ans = fair_ann_approx(idx, q, eps, rng)
        assert ans.ok and ans.distance <= idx.approx_radius
        counts[ans.point] += 1
    freq = counts / T
    sigma = math.sqrt((1 / NUM_NEAR) * (1 - 1 / NUM_NEAR) / T)
    lo = (1 - 4 * sigma * NUM_NEAR) / ((1 + eps) * NUM_NEAR)
    hi = (1 + eps) * (1 + 4 * sigma * NUM_NEAR) / NUM_NEAR
    assert np.all(freq >= lo) and np.all(freq <= hi)


def test_nn_approx_resampling_path():
    q, idx = planted_index(seed=3)
    rng = np.random.default_rng(2)
    assert_uniform_over_near(lambda: fair_nn_approx(idx, q, 0.2, rng),
                             q, idx, T=1500)


def test_nn_approx_far_as_outliers_path():
    q, idx = planted_index(seed=4)
    rng = np.random.default_rng(3)
    assert_uniform_over_near(
        lambda: fair_nn_approx(idx, q, 0.2, rng, far_as_outliers=True),
        q, idx, T=1500)


def test_independent_is_uniform():
    q, idx = planted_index(seed=5)
    rng = np.random.default_rng(4)
    assert_uniform_over_near(lambda: fair_nn_independent(idx, q, rng),
                             q, idx, T=1500)


def test_independent_whp_is_uniform():
    q, idx = planted_index(seed=6)
    rng = np.random.default_rng(99)

    def draw():
        while True:
            ans = fair_nn_independent_whp(idx, q, rng)
            if ans.status is not SampleStatus.EMPTY:
                return ans

    assert_uniform_over_near(draw, q, idx, T=1500)


def test_independent_whp_steers_work_to_cheapest_replica():
    q, idx = planted_index(seed=7)
    rng = np.random.default_rng(6)
    for _ in range(50):
        ans = fair_nn_independent_whp(idx, q, rng)
        if not ans.ok:
            continue
        for chosen, works in ans.outcome.work_log:
            assert works[chosen] == min(works)


def test_empty_neighborhood():
    q, idx = planted_index(seed=8)
    rng = np.random.default_rng(7)
    lonely = frozenset(range(5000, 5030))
    for fn in (fair_nn_dependent,
               lambda i, p, r: fair_nn_approx(i, p, 0.2, r),
               fair_nn_independent):
        ans = fn(idx, lonely, rng)
        assert not ans.ok
        assert ans.status is SampleStatus.EMPTY
        assert ans.point is None


def test_replica_exhaustion_with_zero_budget():
    # tight similarity thresholds make every colliding point an outlier
    rng = np.random.default_rng(8)
    q = frozenset(range(40))
    pts = [frozenset(range(i, i + 38)) for i in range(1, 30)]
    idx = build_lsh(pts, MinHash1Bit(2), L=10, t_rep=2,
                    sim_near=0.999, sim_far=0.998, seed=9)
    with pytest.raises(ReplicaExhaustionError):
        for _ in range(200):
            fair_ann_approx(idx, q, 0.2, rng, budget=0)


def test_answer_dataclass_flags():
    ok = FairAnswer(3, 0.1)
    assert ok.ok and ok.status is SampleStatus.OK
    empty = FairAnswer(None, status=SampleStatus.EMPTY)
    assert not empty.ok
