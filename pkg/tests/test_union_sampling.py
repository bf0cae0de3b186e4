import numpy as np
import pytest
from collections import Counter
from scipy.stats import chisquare

from fairnn import (DistinctSketch, RoundCapError, SampleStatus,
                    SegmentOverflowError, SubFamilyQuery, accept_bit_scale,
                    build_family, sample_approx_degree, sample_approx_outliers,
                    sample_dependent, sample_dependent_outliers,
                    sample_dependent_perturb, sample_exact_degree,
                    sample_perturb_outliers, sample_rank_segment,
                    sample_segment_outliers, sample_segment_outliers_multi,
                    sample_simulation, urn_accept_bit, urn_accept_bits,
                    urn_probe_expectation, urn_probe_values)

FAMILY_SETS = [[0, 1, 2, 3], [2, 3, 4], [4, 5], [6]]
UNION = list(range(7))


def make_family(seed=3):
    fam = build_family(FAMILY_SETS, seed=seed)
    return fam, SubFamilyQuery(set_ids=[0, 1, 2, 3])


def set_sketches(fam, seed=5):
    base = DistinctSketch(seed=seed)
    out = []
    for s in fam.sets:
        sk = base.spawn()
        sk.insert_many(np.asarray(s.ids, dtype=np.int64))
        out.append(sk)
    return out


def assert_uniform(draws, support, p_floor=0.001):
    counts = Counter(draws)
    assert set(counts) <= set(support)
    assert chisquare([counts[x] for x in support]).pvalue > p_floor


# -- min-rank samplers ------------------------------------------------------


def test_dependent_returns_min_rank_constant():
    fam, q = make_family()
    want = min((int(fam.ground.rank_of[x]) for x in UNION))
    x0 = int(fam.ground.element_at_rank[want])
    for _ in range(10):
        assert sample_dependent(fam, q).element == x0


def test_dependent_uniform_over_permutation_draws():
    draws = []
    for seed in range(4000):
        fam, q = make_family(seed=seed)
        draws.append(sample_dependent(fam, q).element)
    assert_uniform(draws, UNION)


def test_dependent_empty():
    fam = build_family([[], []], seed=0, n=0)
    out = sample_dependent(fam, SubFamilyQuery(set_ids=[0, 1]))
    assert out.status is SampleStatus.EMPTY and out.element is None


def test_perturb_marginally_uniform_on_repeats():
    fam, q = make_family()
    rng = np.random.default_rng(0)
    draws = [sample_dependent_perturb(fam, q, rng).element for _ in range(7000)]
    assert_uniform(draws, UNION)


# -- degree-rejection samplers ----------------------------------------------


def test_exact_degree_uniform():
    fam, q = make_family()
    rng = np.random.default_rng(1)
    draws = [sample_exact_degree(fam, q, rng).element for _ in range(7000)]
    assert_uniform(draws, UNION)


def test_exact_degree_subfamily():
    fam, _ = make_family()
    q = SubFamilyQuery(set_ids=[1, 2])
    rng = np.random.default_rng(2)
    draws = [sample_exact_degree(fam, q, rng).element for _ in range(4000)]
    assert_uniform(draws, [2, 3, 4, 5])


def test_exact_degree_round_cap():
    fam, q = make_family()
    with pytest.raises(RoundCapError):
        sample_exact_degree(fam, q, np.random.default_rng(0), round_cap=0)


def test_approx_degree_eps_uniform():
    fam, q = make_family()
    rng = np.random.default_rng(3)
    T = 20000
    counts = Counter(sample_approx_degree(fam, q, 0.2, rng).element
                     for _ in range(T))
    for x in UNION:
        assert counts[x] / T == pytest.approx(1 / 7, rel=0.3)


def test_simulation_eps_uniform():
    fam, q = make_family()
    rng = np.random.default_rng(4)
    T = 20000
    counts = Counter(sample_simulation(fam, q, 0.2, rng).element
                     for _ in range(T))
    for x in UNION:
        assert counts[x] / T == pytest.approx(1 / 7, rel=0.3)


def test_degree_samplers_empty():
    fam = build_family([[]], seed=0, n=0)
    q = SubFamilyQuery(set_ids=[0])
    rng = np.random.default_rng(0)
    assert sample_exact_degree(fam, q, rng).status is SampleStatus.EMPTY
    assert sample_approx_degree(fam, q, 0.2, rng).status is SampleStatus.EMPTY
    assert sample_simulation(fam, q, 0.2, rng).status is SampleStatus.EMPTY


# -- urn primitives ----------------------------------------------------------


def test_accept_bit_scale_formula():
    assert accept_bit_scale(np.exp(-1.0)) == 5
    assert accept_bit_scale(0.01) == int(np.ceil(np.log(100))) + 4


def test_urn_probe_expectation_mean():
    rng = np.random.default_rng(5)
    vals = [urn_probe_expectation(6, lambda j: j < 2, rng) for _ in range(30000)]
    mean = float(np.mean(vals))
    se = float(np.std(vals)) / np.sqrt(len(vals))
    assert abs(mean - 0.5) <= 4 * se


def test_urn_probe_values_match_honest_law():
    rng = np.random.default_rng(6)
    batch = urn_probe_values(6, 2, 30000, rng)
    assert abs(float(batch.mean()) - 0.5) < 0.01


def test_urn_accept_bit_probability_window():
    rng = np.random.default_rng(7)
    fail = 0.05
    scale = accept_bit_scale(fail)
    T = 100000
    honest = np.mean([urn_accept_bit(4, lambda j: j < 2, fail, rng)
                      for _ in range(T)])
    target = 1.0 / (2 * scale)
    sigma = np.sqrt(target * (1 - target) / T)
    assert target - fail - 4 * sigma <= honest <= target + 4 * sigma
    batch = urn_accept_bits(4, 2, fail, T, rng).mean()
    assert target - fail - 4 * sigma <= batch <= target + 4 * sigma


def test_urn_bad_args():
    rng = np.random.default_rng(0)
    with pytest.raises(ValueError):
        urn_probe_expectation(0, lambda j: True, rng)
    with pytest.raises(ValueError):
        urn_probe_values(4, 0, 10, rng)
    with pytest.raises(ValueError):
        urn_accept_bit(4, lambda j: True, 1.5, rng)


# -- rank-segment sampler ----------------------------------------------------


def test_rank_segment_uniform():
    fam, q = make_family()
    sks = set_sketches(fam)
    rng = np.random.default_rng(8)
    draws = [sample_rank_segment(fam, q, sks, rng).element for _ in range(7000)]
    assert_uniform(draws, UNION)


def test_rank_segment_forced_geometry():
    # two elements in one forced segment: acceptance probability occ/bound = 1
    fam = build_family([[0, 1]], seed=0)
    q = SubFamilyQuery(set_ids=[0])
    rng = np.random.default_rng(9)
    out = sample_rank_segment(fam, q, None, rng, num_segments=1, seg_bound=2,
                              s_hat=2.0)
    assert out.rounds == 1 and out.element in (0, 1)


def test_rank_segment_overflow():
    fam = build_family([[0, 1]], seed=0)
    q = SubFamilyQuery(set_ids=[0])
    with pytest.raises(SegmentOverflowError):
        sample_rank_segment(fam, q, None, np.random.default_rng(0),
                            num_segments=1, seg_bound=1, s_hat=2.0)


def test_rank_segment_empty():
    fam = build_family([[]], seed=0, n=0)
    q = SubFamilyQuery(set_ids=[0])
    out = sample_rank_segment(fam, q, set_sketches(fam),
                              np.random.default_rng(0))
    assert out.status is SampleStatus.EMPTY


# -- outlier-aware variants --------------------------------------------------

ODD = [1, 3, 5]


def outlier_query(budget=1000):
    return SubFamilyQuery(set_ids=[0, 1, 2, 3],
                          outlier_oracle=lambda x: x % 2 == 0,
                          outlier_budget=budget)


def test_dependent_outliers_returns_min_rank_inlier():
    fam, _ = make_family()
    out = sample_dependent_outliers(fam, outlier_query())
    want = min(ODD, key=lambda x: int(fam.ground.rank_of[x]))
    assert out.element == want


def test_dependent_outliers_all_outliers_empty():
    fam, _ = make_family()
    q = SubFamilyQuery(set_ids=[0, 1, 2, 3], outlier_oracle=lambda x: True)
    out = sample_dependent_outliers(fam, q)
    assert out.status is SampleStatus.EMPTY
    assert out.outliers_seen > 0


def test_perturb_outliers_uniform():
    fam, _ = make_family()
    rng = np.random.default_rng(10)
    draws = [sample_perturb_outliers(fam, outlier_query(), rng).element
             for _ in range(6000)]
    assert_uniform(draws, ODD)


def test_approx_outliers_eps_uniform_and_rollback():
    fam, _ = make_family()
    rng = np.random.default_rng(11)
    before = ([list(s.ids) for s in fam.sets],
              [list(s.ranks) for s in fam.sets],
              fam.ground.rank_of.copy())
    T = 9000
    counts = Counter(sample_approx_outliers(fam, outlier_query(), 0.2,
                                            rng).element for _ in range(T))
    assert set(counts) == set(ODD)
    for x in ODD:
        assert counts[x] / T == pytest.approx(1 / 3, rel=0.2)
    after = ([list(s.ids) for s in fam.sets],
             [list(s.ranks) for s in fam.sets],
             fam.ground.rank_of.copy())
    assert before[0] == after[0]
    assert before[1] == after[1]
    assert np.array_equal(before[2], after[2])


def test_approx_outliers_budget_exceeded():
    fam, _ = make_family()
    rng = np.random.default_rng(12)
    before = [list(s.ids) for s in fam.sets]
    out = sample_approx_outliers(fam, outlier_query(budget=0), 0.2, rng)
    assert out.status in (SampleStatus.BUDGET_EXCEEDED, SampleStatus.OK)
    # drive until an outlier is actually drawn
    while out.status is SampleStatus.OK:
        out = sample_approx_outliers(fam, outlier_query(budget=0), 0.2, rng)
    assert out.status is SampleStatus.BUDGET_EXCEEDED
    assert [list(s.ids) for s in fam.sets] == before


def test_approx_outliers_all_outliers_empty():
    fam, _ = make_family()
    q = SubFamilyQuery(set_ids=[0, 1, 2, 3], outlier_oracle=lambda x: True)
    out = sample_approx_outliers(fam, q, 0.2, np.random.default_rng(13))
    assert out.status is SampleStatus.EMPTY


def test_segment_outliers_uniform():
    fam, _ = make_family()
    sks = set_sketches(fam)
    rng = np.random.default_rng(14)
    draws = []
    while len(draws) < 5000:
        out = sample_segment_outliers(fam, outlier_query(), sks, rng)
        if out.ok:
            draws.append(out.element)
    assert_uniform(draws, ODD)


def test_segment_outliers_all_outliers_empty():
    fam, _ = make_family()
    sks = set_sketches(fam)
    q = SubFamilyQuery(set_ids=[0, 1, 2, 3], outlier_oracle=lambda x: True)
    out = sample_segment_outliers(fam, q, sks, np.random.default_rng(15))
    assert out.status is SampleStatus.EMPTY


def test_segment_outliers_budget_exceeded():
    fam, _ = make_family()
    sks = set_sketches(fam)
    q = SubFamilyQuery(set_ids=[0, 1, 2, 3], outlier_oracle=lambda x: True,
                       outlier_budget=0)
    out = sample_segment_outliers(fam, q, sks, np.random.default_rng(16),
                                  num_segments=2)
    assert out.status is SampleStatus.BUDGET_EXCEEDED


def test_segment_outliers_multi_chooses_min_work_and_stays_uniform():
    # two replicas covering the same population with different set layouts
    fam = build_family([[0, 1, 2, 3, 4, 5], [0, 1], [2, 3], [4, 5]], seed=17)
    queries = [SubFamilyQuery(set_ids=[0]),
               SubFamilyQuery(set_ids=[1, 2, 3])]
    rng = np.random.default_rng(18)
    draws = []
    while len(draws) < 5000:
        out = sample_segment_outliers_multi(fam, queries, rng)
        for chosen, works in out.work_log:
            assert works[chosen] == min(works)
        if out.ok:
            draws.append(out.element)
    assert_uniform(draws, range(6))


def test_lag1_independence_and_dependent_negative_control():
    fam = build_family([[0, 1], [1, 2, 3]], seed=19)
    q = SubFamilyQuery(set_ids=[0, 1])
    rng = np.random.default_rng(20)
    T = 20000
    draws = [sample_exact_degree(fam, q, rng).element for _ in range(2 * T)]
    pairs = Counter(zip(draws[::2], draws[1::2]))
    marg = Counter(draws)
    max_dev = max(abs(pairs[(a, b)] / T - (marg[a] / (2 * T)) * (marg[b] / (2 * T)))
                  for a in range(4) for b in range(4))
    assert max_dev < 6 * np.sqrt((1 / 16) * (15 / 16) / T)
    # the dependent sampler repeats its draw: the diagonal carries all mass
    dep = [sample_dependent(fam, q).element for _ in range(10)]
    assert len(set(dep)) == 1
