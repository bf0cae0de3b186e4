import math

import numpy as np
import pytest
from scipy.stats import chisquare

from fairnn import (BuildError, LsfParams, SampleStatus, build_lsf,
                    filter_slack, lsf_ann_query, lsf_fair_query,
                    query_exponent, tensor_parts)


def unit_rows(X):
    return X / np.linalg.norm(X, axis=1, keepdims=True)


def planted_unit_instance(seed, n_far=200, n_near=6, alpha=0.6, dim=64):
    """n_near points at similarity > alpha to q, plus random far points."""
    rng = np.random.default_rng(seed)
    q = unit_rows(rng.standard_normal((1, dim)))[0]
    far = unit_rows(rng.standard_normal((n_far, dim)))
    near = []
    target = min(0.999, alpha + 0.15)
    for _ in range(n_near):
        r = rng.standard_normal(dim)
        r -= (r @ q) * q
        r /= np.linalg.norm(r)
        near.append(target * q + math.sqrt(1 - target ** 2) * r)
    pts = np.vstack([np.array(near), far])
    return q, pts


def test_formula_helpers():
    assert tensor_parts(0.6) == math.ceil(1 / (1 - 0.36))
    assert filter_slack(0.6, 0.2) == pytest.approx(
        math.sqrt(2 * (1 - 0.36) * math.log(5)))
    assert query_exponent(0.6, 0.3) == pytest.approx(
        (1 - 0.36) * (1 - 0.09) / (1 - 0.18) ** 2)
    assert filter_slack(1.0, 0.2) == 0.0


def test_params_validation_and_defaults():
    p = LsfParams(alpha=0.6, beta=0.3)
    assert p.t == tensor_parts(0.6)
    # the per-part splits compound back to the total miss target
    assert (1 - p.eps_part) ** p.t == pytest.approx(1 - p.eps)
    assert p.delta == pytest.approx(math.exp(-3.0))
    assert p.resolve_filters(1000) >= 2
    with pytest.raises(BuildError):
        LsfParams(alpha=0.3, beta=0.6)
    with pytest.raises(BuildError):
        LsfParams(alpha=0.6, beta=0.3, eps=1.5)


def test_resolve_filters_matches_exponent():
    p = LsfParams(alpha=0.6, beta=0.3, t=2)
    n = 10 ** 4
    m = n ** ((1 - 0.3 ** 2) / (1 - 0.6 * 0.3) ** 2)
    assert p.resolve_filters(n) == math.ceil(m ** 0.5)
    assert LsfParams(alpha=0.6, beta=0.3,
                     filters_per_part=7).resolve_filters(n) == 7


def test_build_requires_unit_vectors():
    rng = np.random.default_rng(0)
    with pytest.raises(BuildError):
        build_lsf(rng.standard_normal((10, 8)), alpha=0.6, beta=0.3)
    with pytest.raises(BuildError):
        build_lsf(np.ones(8), alpha=0.6, beta=0.3)


def test_each_point_lands_in_one_bucket_per_rep():
    rng = np.random.default_rng(1)
    pts = unit_rows(rng.standard_normal((50, 16)))
    idx = build_lsf(pts, alpha=0.6, beta=0.3, filters_per_part=8, reps=3,
                    seed=2)
    for rep in range(3):
        total = sum(len(b) for b in idx.buckets[rep].values())
        assert total == 50
    for pid in range(50):
        assert len(idx.point_buckets[pid]) == 3
        for rep, key in idx.point_buckets[pid]:
            assert pid in idx.buckets[rep][key]


def test_stored_key_is_argmax_of_projections():
    rng = np.random.default_rng(2)
    pts = unit_rows(rng.standard_normal((20, 12)))
    idx = build_lsf(pts, alpha=0.6, beta=0.3, filters_per_part=6, reps=2,
                    seed=3)
    for pid in range(20):
        for rep, key in idx.point_buckets[pid]:
            proj = idx.filters[rep] @ pts[pid]
            assert key == tuple(int(np.argmax(proj[i]))
                                for i in range(idx.params.t))


def test_part_index_lists_respect_threshold():
    rng = np.random.default_rng(3)
    pts = unit_rows(rng.standard_normal((30, 16)))
    idx = build_lsf(pts, alpha=0.6, beta=0.3, filters_per_part=10, reps=1,
                    seed=4)
    q = unit_rows(rng.standard_normal((1, 16)))[0]
    lists = idx.part_index_lists(q, 0)
    slack = filter_slack(0.6, idx.params.eps_part)
    for i, lst in enumerate(lists):
        proj = idx.filters[0][i] @ q
        thr = 0.6 * proj.max() - slack
        assert sorted(lst) == sorted(int(j)
                                     for j in np.nonzero(proj >= thr)[0])


def test_ann_query_recovers_planted_near_point():
    misses = 0
    for seed in range(40):
        q, pts = planted_unit_instance(seed)
        idx = build_lsf(pts, alpha=0.6, beta=0.3, filters_per_part=16,
                        seed=seed + 1)
        pid = lsf_ann_query(idx, q)
        if pid is None:
            misses += 1
        else:
            assert idx.similarity(q, pid) >= 0.3
    assert misses <= 4


def test_ann_query_none_when_far_from_everything():
    rng = np.random.default_rng(5)
    pts = unit_rows(rng.standard_normal((40, 64)))
    idx = build_lsf(pts, alpha=0.6, beta=0.3, filters_per_part=16, seed=6)
    q = unit_rows(rng.standard_normal((1, 64)))[0]
    # random 64-d unit vectors have similarity ~ N(0, 1/64): nothing near
    assert lsf_ann_query(idx, q, beta=0.9) is None


def test_fair_query_uniform_over_planted_points():
    q, pts = planted_unit_instance(seed=7)
    idx = build_lsf(pts, alpha=0.6, beta=0.3, filters_per_part=16, seed=8)
    rng = np.random.default_rng(9)
    T = 3000
    counts = np.zeros(6)
    for _ in range(T):
        out = lsf_fair_query(idx, q, rng)
        assert out.ok
        assert idx.similarity(q, out.element) >= 0.6
        counts[out.element] += 1
    assert chisquare(counts).pvalue > 0.001


def test_fair_query_empty_when_no_near_point():
    rng = np.random.default_rng(10)
    pts = unit_rows(rng.standard_normal((40, 64)))
    idx = build_lsf(pts, alpha=0.95, beta=0.9, filters_per_part=8, seed=11)
    q = unit_rows(rng.standard_normal((1, 64)))[0]
    out = lsf_fair_query(idx, q, rng)
    assert out.status is SampleStatus.EMPTY


def test_fair_query_restores_buckets_exactly():
    q, pts = planted_unit_instance(seed=12)
    idx = build_lsf(pts, alpha=0.6, beta=0.3, filters_per_part=16, seed=13)
    before = [{k: list(v) for k, v in table.items()} for table in idx.buckets]
    rng = np.random.default_rng(14)
    for _ in range(60):
        lsf_fair_query(idx, q, rng)
    after = [{k: list(v) for k, v in table.items()} for table in idx.buckets]
    assert after == before
