"""Fair near-neighbor queries on top of an LshIndex.

Every routine returns points uniformly (or eps-uniformly) at random from
a neighborhood of the query rather than an arbitrary near point:

  * ``fair_nn_dependent``        uniform over the in-radius points of one
                                 replica's buckets; repeats are
                                 marginally uniform but correlated.
  * ``fair_ann_approx``          eps-uniform over a set S' squeezed
                                 between the radius-r and radius-cr
                                 neighborhoods (approximate neighborhood).
  * ``fair_nn_approx``           eps-uniform over the radius-r
                                 neighborhood, by filtering the above.
  * ``fair_nn_independent``      exactly uniform over the radius-r
                                 neighborhood and independent across
                                 repeats (segment sampler over buckets).
  * ``fair_nn_independent_whp``  same guarantee with per-round work
                                 steered to the cheapest replica.

Exact-neighborhood routines never return a point farther than the index
radius; this is asserted, not assumed.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ReplicaExhaustionError, RoundCapError
from .lsh import LshIndex, _scan_for_near
from .union_sampling import (SampleOutcome, SampleStatus,
                             sample_approx_outliers, sample_perturb_outliers,
                             sample_segment_outliers,
                             sample_segment_outliers_multi)


@dataclass
class FairAnswer:
    """A sampled near neighbor (or a terminal status) plus its distance."""

    point: Optional[int]
    distance: Optional[float] = None
    status: SampleStatus = SampleStatus.OK
    outcome: Optional[SampleOutcome] = None

    @property
    def ok(self) -> bool:
        return self.status is SampleStatus.OK


def default_outlier_budget(index: LshIndex) -> int:
    """3 L ceil(log2 n): the number of far-point touches beyond which a
    replica is considered too polluted for budgeted sampling."""
    return 3 * index.L * max(1, math.ceil(math.log2(max(index.n, 2))))


def _answer(index: LshIndex, q, out: SampleOutcome,
            max_distance: Optional[float] = None) -> FairAnswer:
    if not out.ok:
        return FairAnswer(None, status=out.status, outcome=out)
    d = index.distance(q, out.element)
    if max_distance is not None:
        assert d <= max_distance, (
            f"sampler returned a point at distance {d} > {max_distance}")
    return FairAnswer(out.element, d, outcome=out)


def fair_nn_dependent(index: LshIndex, q, rng: np.random.Generator,
                      replica: int = 0) -> FairAnswer:
    """Marginally uniform draw from the in-radius points of one replica's
    colliding buckets, via the outlier-skipping min-rank perturb sampler."""
    query = index.query_buckets(q, replica, mode="exact")
    out = sample_perturb_outliers(index.family, query, rng)
    return _answer(index, q, out, max_distance=index.radius)


def fair_ann_approx(index: LshIndex, q, eps: float, rng: np.random.Generator,
                    budget: Optional[int] = None) -> FairAnswer:
    """eps-uniform draw from an approximate neighborhood S' with
    B(q, radius) subset of S' subset of B(q, approx_radius).

    Replicas are tried round-robin from a random start; a replica whose
    buckets hold more than ``budget`` far points (beyond approx_radius)
    is abandoned for the next one.  Raises ReplicaExhaustionError when
    every replica exceeds the budget.
    """
    if budget is None:
        budget = default_outlier_budget(index)
    start = int(rng.integers(index.t_rep))
    for step in range(index.t_rep):
        replica = (start + step) % index.t_rep
        query = index.query_buckets(q, replica, mode="approx",
                                    outlier_budget=budget)
        out = sample_approx_outliers(index.family, query, eps, rng)
        if out.status is not SampleStatus.BUDGET_EXCEEDED:
            return _answer(index, q, out, max_distance=index.approx_radius)
    raise ReplicaExhaustionError(
        f"all {index.t_rep} replicas exceeded the outlier budget {budget}")


def fair_nn_approx(index: LshIndex, q, eps: float, rng: np.random.Generator,
                   budget: Optional[int] = None,
                   far_as_outliers: bool = False,
                   round_cap: int = 10000) -> FairAnswer:
    """eps-uniform draw from the radius-r neighborhood.

    Default strategy: certify non-emptiness by a bucket scan (with the
    usual 3L far-point cutoff), then resample fair_ann_approx until the
    draw lands within the radius.  With ``far_as_outliers`` every point
    beyond the radius is treated as an outlier directly, trading a larger
    outlier load for a single sampling pass.
    """
    if far_as_outliers:
        if budget is None:
            budget = default_outlier_budget(index)
        start = int(rng.integers(index.t_rep))
        for step in range(index.t_rep):
            replica = (start + step) % index.t_rep
            query = index.query_buckets(q, replica, mode="exact",
                                        outlier_budget=budget)
            out = sample_approx_outliers(index.family, query, eps, rng)
            if out.status is not SampleStatus.BUDGET_EXCEEDED:
                return _answer(index, q, out, max_distance=index.radius)
        raise ReplicaExhaustionError(
            f"all {index.t_rep} replicas exceeded the outlier budget {budget}")

    probe = _scan_for_near(index, q, int(rng.integers(index.t_rep)), index.radius)
    if probe is None:
        return FairAnswer(None, status=SampleStatus.EMPTY)
    for _ in range(round_cap):
        ans = fair_ann_approx(index, q, eps, rng, budget)
        if not ans.ok:
            return ans
        if ans.distance <= index.radius:
            return ans
    raise RoundCapError(f"no in-radius draw within {round_cap} resamples")


def fair_nn_independent(index: LshIndex, q, rng: np.random.Generator,
                        budget: Optional[int] = None,
                        c_lambda: float = 8.0, c_sigma: float = 4.0,
                        seg_bound: Optional[int] = None) -> FairAnswer:
    """Exactly uniform, independent draws from the in-radius points of the
    colliding buckets across all replicas (segment sampler with per-bucket
    sketches)."""
    if index.set_sketches is None:
        index.attach_sketches()
    if budget is None:
        budget = default_outlier_budget(index) * index.t_rep
    set_ids = []
    for replica in range(index.t_rep):
        set_ids.extend(index.collided_set_ids(q, replica))
    dist = index.distance_memo(q)
    from .set_family import SubFamilyQuery
    query = SubFamilyQuery(set_ids=set_ids,
                           outlier_oracle=lambda pid: dist(pid) > index.radius,
                           outlier_budget=budget)
    out = sample_segment_outliers(index.family, query, index.set_sketches, rng,
                                  c_lambda=c_lambda, c_sigma=c_sigma,
                                  seg_bound=seg_bound,
                                  s_hat=index.merged_estimate(set_ids))
    return _answer(index, q, out, max_distance=index.radius)


def fair_nn_independent_whp(index: LshIndex, q, rng: np.random.Generator,
                            budget: Optional[int] = None,
                            c_lambda: float = 8.0, c_sigma: float = 4.0,
                            seg_bound: Optional[int] = None) -> FairAnswer:
    """Exactly uniform, independent draws with replica-steered work: each
    segment round scans only the replica holding the fewest ranks in the
    segment.  The segment count starts at the next power of two >= n, so
    no size estimate is needed."""
    if budget is None:
        budget = default_outlier_budget(index)
    dist = index.distance_memo(q)
    from .set_family import SubFamilyQuery
    queries = []
    for replica in range(index.t_rep):
        queries.append(SubFamilyQuery(
            set_ids=index.collided_set_ids(q, replica),
            outlier_oracle=lambda pid: dist(pid) > index.radius,
            outlier_budget=budget))
    out = sample_segment_outliers_multi(index.family, queries, rng,
                                        c_lambda=c_lambda, c_sigma=c_sigma,
                                        seg_bound=seg_bound)
    return _answer(index, q, out, max_distance=index.radius)
