"""Experiment harness: fairness comparisons between bucket-sampling
strategies, neighborhood-ratio studies, the adversarial clustered-set
case study, and timing runs.
"""

import itertools
import math
import time
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from ..errors import BuildError
from ..fair_nn import fair_nn_independent
from ..lsh import EuclideanGrid, LshIndex, MinHash1Bit, build_lsh
from ..lsf import LsfIndex, LsfParams, lsf_fair_query
from ..set_family import SubFamilyQuery
from ..union_sampling import sample_perturb_outliers
from .data import Dataset, select_queries


class Algorithm(str, Enum):
    """Bucket-sampling strategies compared by the fairness experiment."""

    UNIFORM_UNIFORM = "uniform-uniform"    # uniform bucket, uniform member
    WEIGHTED_UNIFORM = "weighted-uniform"  # size-weighted bucket, uniform member
    OPTIMAL = "optimal"                    # exact degree rejection
    DEGREE_APPROX = "degree-approx"        # degree estimated by bucket probes
    RANK_PERTURB = "rank-perturb"          # min-rank + rank re-randomisation
    FAIR_INDEPENDENT = "fair-independent"  # segment sampler (uniform, independent)
    LSF_FAIR = "lsf-fair"                  # filter-index degree rejection


DEFAULT_ALGORITHMS = (Algorithm.UNIFORM_UNIFORM, Algorithm.WEIGHTED_UNIFORM,
                      Algorithm.OPTIMAL, Algorithm.DEGREE_APPROX,
                      Algorithm.RANK_PERTURB)


@dataclass
class ExperimentConfig:
    """Index and experiment parameters.

    ``radius``/``approx_radius`` are distances (for set data, 1 minus the
    similarity threshold).  ``alpha``/``beta`` are the inner-product
    thresholds of the filter index, used only by LSF_FAIR on unit data.
    """

    radius: float
    approx_radius: float
    k: int = 8
    L: int = 100
    t_rep: int = 1
    w: Optional[float] = None
    alpha: Optional[float] = None
    beta: Optional[float] = None
    num_queries: int = 50
    knn_rank: int = 40
    query_threshold: float = 0.0
    repeats_per_near: int = 100
    eps: float = 0.2
    seed: int = 0
    algorithms: Sequence[Algorithm] = DEFAULT_ALGORITHMS


# Index parameter presets at the scales of common public benchmark
# datasets.  Set-valued profiles carry a Jaccard distance radius
# (1 - similarity threshold); vector profiles carry the grid width w.
# The caller picks approx_radius for the desired approximation factor.
DATASET_PROFILES = {
    "movielens": {"k": 8, "L": 100, "radius": 1.0 - 0.25},
    "lastfm": {"k": 8, "L": 100, "radius": 1.0 - 0.2},
    "mnist": {"k": 15, "L": 100, "radius": 1275.0, "w": 3750.0},
    "sift": {"k": 15, "L": 100, "radius": 270.0, "w": 870.0},
    "glove": {"k": 15, "L": 100, "radius": 4.7, "w": 15.7},
}


def profile_config(name: str, approx_radius: float, **overrides) -> ExperimentConfig:
    """ExperimentConfig seeded from a named dataset profile."""
    if name not in DATASET_PROFILES:
        raise BuildError(f"unknown profile {name!r}; "
                         f"expected one of {sorted(DATASET_PROFILES)}")
    kwargs = dict(DATASET_PROFILES[name], approx_radius=approx_radius)
    kwargs.update(overrides)
    return ExperimentConfig(**kwargs)


@dataclass
class FairnessReport:
    """Per-query total-variation distances plus the frequency-difference
    table against the exact-degree baseline."""

    tvd_rows: list = field(default_factory=list)
    freq_delta_rows: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def mean_tvd(self) -> dict:
        acc = {}
        for row in self.tvd_rows:
            acc.setdefault(row["algorithm"], []).append(row["tvd"])
        return {alg: float(np.mean(v)) for alg, v in acc.items()}


def total_variation(counts: Counter, support, total: int) -> float:
    """TVD between the empirical draw distribution and uniform on support."""
    if total == 0 or not support:
        return float("nan")
    u = 1.0 / len(support)
    tvd = sum(abs(counts.get(p, 0) / total - u) for p in support)
    tvd += sum(c / total for p, c in counts.items() if p not in support)
    return 0.5 * tvd


def _build_index(ds: Dataset, points, cfg: ExperimentConfig) -> LshIndex:
    if ds.kind == "set":
        kind = MinHash1Bit(cfg.k)
    elif ds.kind in ("vector", "unit"):
        if cfg.w is None:
            raise BuildError("Euclidean indexing needs a grid width w")
        kind = EuclideanGrid(cfg.k, cfg.w)
    else:
        raise BuildError(f"unknown dataset kind {ds.kind!r}")
    return build_lsh(points, kind, L=cfg.L, t_rep=cfg.t_rep,
                     radius=cfg.radius, approx_radius=cfg.approx_radius,
                     seed=cfg.seed)


# ---------------------------------------------------------------------------
# per-draw strategies over one query's colliding buckets


def _draw_uniform_uniform(index, set_ids, near, rng, cap):
    sets = index.family.sets
    for _ in range(cap):
        s = sets[set_ids[int(rng.integers(len(set_ids)))]]
        x = s.ids[int(rng.integers(len(s.ids)))]
        if x in near:
            return x
    return None


def _draw_weighted_uniform(index, set_ids, cum, total, near, rng, cap):
    sets = index.family.sets
    for _ in range(cap):
        s = sets[set_ids[int(np.searchsorted(cum, rng.random() * total,
                                             side="right"))]]
        x = s.ids[int(rng.integers(len(s.ids)))]
        if x in near:
            return x
    return None


def _draw_optimal(index, set_ids, cum, total, near, rng, cap):
    sets = index.family.sets
    for _ in range(cap):
        s = sets[set_ids[int(np.searchsorted(cum, rng.random() * total,
                                             side="right"))]]
        x = s.ids[int(rng.integers(len(s.ids)))]
        if x not in near:
            continue
        d = sum(1 for sid in set_ids if x in sets[sid].members)
        if rng.random() * d < 1.0:
            return x
    return None


def _draw_degree_approx(index, set_ids, cum, total, near, rng, cap):
    """Degree estimated as L/i from the first random bucket probe that
    contains the pick, capped below at 1."""
    sets = index.family.sets
    g = len(set_ids)
    probe_cap = 64 * g
    for _ in range(cap):
        s = sets[set_ids[int(np.searchsorted(cum, rng.random() * total,
                                             side="right"))]]
        x = s.ids[int(rng.integers(len(s.ids)))]
        if x not in near:
            continue
        i = probe_cap
        for trial in range(1, probe_cap + 1):
            if x in sets[set_ids[int(rng.integers(g))]].members:
                i = trial
                break
        d_hat = max(1.0, g / i)
        if rng.random() * d_hat < 1.0:
            return x
    return None


def _draw_rank_perturb(index, query, rng):
    out = sample_perturb_outliers(index.family, query, rng)
    return out.element if out.ok else None


def run_fairness_experiment(ds: Dataset, cfg: ExperimentConfig) -> FairnessReport:
    """Compare the configured strategies on a shared index.

    For each selected query the support is the set of in-radius points in
    the query's colliding buckets (size M); every strategy draws
    repeats_per_near * M samples and is scored by TVD against uniform on
    the support.  The frequency-delta table records, per point, the
    reported frequency minus the exact-degree baseline's, keyed by the
    point's distance rounded to two decimals.
    """
    rng = np.random.default_rng(cfg.seed)
    query_ids, index_ids = select_queries(ds, cfg.num_queries, cfg.knn_rank,
                                          cfg.query_threshold, cfg.seed)
    if ds.kind == "set":
        points = [ds.items[i] for i in index_ids]
    else:
        points = np.asarray(ds.items)[index_ids]
    index = _build_index(ds, points, cfg)
    algorithms = [Algorithm(a) for a in cfg.algorithms]
    if Algorithm.FAIR_INDEPENDENT in algorithms:
        index.attach_sketches()
    lsf_index = None
    if Algorithm.LSF_FAIR in algorithms:
        if ds.kind != "unit" or cfg.alpha is None or cfg.beta is None:
            raise BuildError("lsf-fair needs unit data plus alpha/beta")
        lsf_index = LsfIndex(points, LsfParams(
            alpha=cfg.alpha, beta=cfg.beta, seed=cfg.seed))

    report = FairnessReport(meta={"config": cfg, "query_ids": query_ids})
    delta_acc = {}
    for q in query_ids:
        qpoint = ds.items[q]
        set_ids = index.collided_set_ids(qpoint, 0)
        if not set_ids:
            continue
        sets = index.family.sets
        union = set()
        for sid in set_ids:
            union.update(sets[sid].ids)
        near = {p for p in union if index.distance(qpoint, p) <= cfg.radius}
        if not near:
            continue
        M = len(near)
        T = cfg.repeats_per_near * M
        sizes = np.array([len(sets[sid]) for sid in set_ids])
        cum = np.cumsum(sizes)
        total = int(cum[-1])
        cap = max(1000, 100 * len(set_ids))
        dist = index.distance_memo(qpoint)
        per_alg_freq = {}
        for alg in algorithms:
            counts = Counter()
            failures = 0
            support = near
            if alg is Algorithm.LSF_FAIR:
                qv = np.asarray(qpoint)
                visited_union = set()
                for rep in range(lsf_index.reps):
                    for _key, bucket in lsf_index.visited_buckets(qv, rep):
                        visited_union.update(bucket)
                support = {p for p in visited_union
                           if lsf_index.similarity(qv, p) >= cfg.alpha}
            for _ in range(T):
                if alg is Algorithm.UNIFORM_UNIFORM:
                    x = _draw_uniform_uniform(index, set_ids, near, rng, cap)
                elif alg is Algorithm.WEIGHTED_UNIFORM:
                    x = _draw_weighted_uniform(index, set_ids, cum, total,
                                               near, rng, cap)
                elif alg is Algorithm.OPTIMAL:
                    x = _draw_optimal(index, set_ids, cum, total, near, rng, cap)
                elif alg is Algorithm.DEGREE_APPROX:
                    x = _draw_degree_approx(index, set_ids, cum, total,
                                            near, rng, cap)
                elif alg is Algorithm.RANK_PERTURB:
                    query = SubFamilyQuery(
                        set_ids=set_ids,
                        outlier_oracle=lambda p: dist(p) > cfg.radius)
                    x = _draw_rank_perturb(index, query, rng)
                elif alg is Algorithm.FAIR_INDEPENDENT:
                    ans = fair_nn_independent(index, qpoint, rng)
                    x = ans.point if ans.ok else None
                else:  # LSF_FAIR
                    out = lsf_fair_query(lsf_index, np.asarray(qpoint), rng)
                    x = out.element if out.ok else None
                if x is None:
                    failures += 1
                else:
                    counts[x] += 1
            tvd = total_variation(counts, support, T - failures)
            report.tvd_rows.append({
                "query_id": q, "algorithm": alg.value, "support": len(support),
                "draws": T, "failures": failures, "tvd": tvd})
            per_alg_freq[alg] = (counts, T - failures)
        base = per_alg_freq.get(Algorithm.OPTIMAL)
        if base is not None:
            bc, bt = base
            for alg, (counts, t_eff) in per_alg_freq.items():
                if alg is Algorithm.OPTIMAL or t_eff == 0 or bt == 0:
                    continue
                for p in near:
                    key = (alg.value, round(dist(p), 2))
                    delta_acc.setdefault(key, []).append(
                        counts.get(p, 0) / t_eff - bc.get(p, 0) / bt)
    for (alg, bucket), vals in sorted(delta_acc.items()):
        report.freq_delta_rows.append({
            "algorithm": alg, "distance_bin": bucket,
            "mean_delta": float(np.mean(vals)), "points": len(vals)})
    return report


def run_ratio_study(ds: Dataset, radii: Sequence[float],
                    factors: Sequence[float], num_queries: int = 50,
                    knn_rank: int = 40, threshold: float = 0.0,
                    seed: int = 0) -> list:
    """Exact-scan study of n(q, c*r) / n(q, r) over selected queries."""
    query_ids, index_ids = select_queries(ds, num_queries, knn_rank,
                                          threshold, seed)
    rows = []
    for q in query_ids:
        dists = np.array([ds.distance(q, j) for j in index_ids])
        for r in radii:
            n_r = int(np.count_nonzero(dists <= r))
            for c in factors:
                n_cr = int(np.count_nonzero(dists <= c * r))
                rows.append({"query_id": q, "radius": r, "factor": c,
                             "near": n_r, "approx_near": n_cr,
                             "ratio": (n_cr / n_r) if n_r else float("inf")})
    return rows


# ---------------------------------------------------------------------------
# adversarial clustered-set case study


def case_study_instance():
    """The hand-built clustered instance over universe {1..30}.

    Points (as 0-based id sets): X = {16..30}, Y = {1..18}, Z = {1..27},
    plus every proper subset of Y with at least 15 elements.  The query
    is the full universe; J(Q, Z) = 0.9, J(Q, Y) = 0.6, J(Q, X) = 0.5.
    """
    X = frozenset(range(15, 30))
    Y = frozenset(range(0, 18))
    Z = frozenset(range(0, 27))
    M = []
    y_list = sorted(Y)
    for size in (15, 16, 17):
        for comb in itertools.combinations(y_list, size):
            M.append(frozenset(comb))
    Q = frozenset(range(30))
    return [X, Y, Z] + M, Q


def run_case_study(repeats: int = 100000, fair_repeats: int = 300,
                   seed: int = 0, k: int = 8, L: int = 100) -> dict:
    """Uniform-bucket/uniform-member sampling on the clustered instance
    versus the uniform independent sampler.

    The naive strategy (accepting any collected point with similarity at
    least 0.5) returns the isolated point X far more often than the
    cluster member Y; the segment sampler at similarity threshold 0.9
    can only ever return Z.
    """
    points, Q = case_study_instance()
    ds = Dataset("case-study", "set", points)
    jx = 1.0 - ds.distance(Q, 0)
    jy = 1.0 - ds.distance(Q, 1)
    jz = 1.0 - ds.distance(Q, 2)
    index = build_lsh(points, MinHash1Bit(k), L=L, t_rep=1,
                      sim_near=0.9, sim_far=0.5, seed=seed)
    rng = np.random.default_rng(seed)
    set_ids = index.collided_set_ids(Q, 0)
    union = set()
    for sid in set_ids:
        union.update(index.family.sets[sid].ids)
    eligible = {p for p in union if index.distance(Q, p) <= 0.5}
    counts = Counter()
    failures = 0
    cap = max(1000, 100 * len(set_ids))
    for _ in range(repeats):
        x = _draw_uniform_uniform(index, set_ids, eligible, rng, cap)
        if x is None:
            failures += 1
        else:
            counts[x] += 1
    eff = repeats - failures
    index.attach_sketches()
    fair_counts = Counter()
    for _ in range(fair_repeats):
        ans = fair_nn_independent(index, Q, rng)
        if ans.ok:
            fair_counts[ans.point] += 1
    return {
        "jaccard": {"X": jx, "Y": jy, "Z": jz},
        "naive_freq": {
            "X": counts.get(0, 0) / eff if eff else float("nan"),
            "Y": counts.get(1, 0) / eff if eff else float("nan"),
            "Z": counts.get(2, 0) / eff if eff else float("nan"),
        },
        "naive_draws": eff,
        "fair_counts": dict(fair_counts),
        "fair_draws": sum(fair_counts.values()),
    }


def run_timing(ds: Dataset, cfg: ExperimentConfig, draws: int = 100) -> list:
    """Wall-clock seconds per draw for each configured strategy on the
    selected queries (timing rows are excluded from determinism checks)."""
    rng = np.random.default_rng(cfg.seed)
    query_ids, index_ids = select_queries(ds, cfg.num_queries, cfg.knn_rank,
                                          cfg.query_threshold, cfg.seed)
    if ds.kind == "set":
        points = [ds.items[i] for i in index_ids]
    else:
        points = np.asarray(ds.items)[index_ids]
    t0 = time.perf_counter()
    index = _build_index(ds, points, cfg)
    build_seconds = time.perf_counter() - t0
    algorithms = [Algorithm(a) for a in cfg.algorithms]
    if Algorithm.FAIR_INDEPENDENT in algorithms:
        index.attach_sketches()
    rows = [{"algorithm": "build", "seconds_per_draw": build_seconds}]
    for alg in algorithms:
        t0 = time.perf_counter()
        done = 0
        for q in query_ids:
            qpoint = ds.items[q]
            set_ids = index.collided_set_ids(qpoint, 0)
            if not set_ids:
                continue
            sets = index.family.sets
            union = set()
            for sid in set_ids:
                union.update(sets[sid].ids)
            near = {p for p in union
                    if index.distance(qpoint, p) <= cfg.radius}
            if not near:
                continue
            sizes = np.array([len(sets[sid]) for sid in set_ids])
            cum = np.cumsum(sizes)
            total = int(cum[-1])
            cap = max(1000, 100 * len(set_ids))
            dist = index.distance_memo(qpoint)
            for _ in range(draws):
                if alg is Algorithm.UNIFORM_UNIFORM:
                    _draw_uniform_uniform(index, set_ids, near, rng, cap)
                elif alg is Algorithm.WEIGHTED_UNIFORM:
                    _draw_weighted_uniform(index, set_ids, cum, total, near,
                                           rng, cap)
                elif alg is Algorithm.OPTIMAL:
                    _draw_optimal(index, set_ids, cum, total, near, rng, cap)
                elif alg is Algorithm.DEGREE_APPROX:
                    _draw_degree_approx(index, set_ids, cum, total, near,
                                        rng, cap)
                elif alg is Algorithm.RANK_PERTURB:
                    query = SubFamilyQuery(
                        set_ids=set_ids,
                        outlier_oracle=lambda p: dist(p) > cfg.radius)
                    _draw_rank_perturb(index, query, rng)
                elif alg is Algorithm.FAIR_INDEPENDENT:
                    fair_nn_independent(index, qpoint, rng)
                done += 1
        elapsed = time.perf_counter() - t0
        rows.append({"algorithm": alg.value,
                     "seconds_per_draw": elapsed / max(done, 1)})
    return rows
