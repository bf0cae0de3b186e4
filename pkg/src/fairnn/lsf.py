"""Gaussian filter index for unit vectors under inner-product similarity.

Each repetition draws t parts of F filter vectors (F = filters_per_part);
a point is stored in the single bucket addressed by the tuple of per-part
argmax inner products (ties to the lowest index).  A query enumerates,
per part, every filter whose inner product is within an additive slack
f(alpha, eps) = sqrt(2 (1 - alpha^2) ln(1/eps)) of alpha times the
part's maximum, and visits the cartesian product of those index lists.

``lsf_ann_query`` returns the first visited point with <p, q> >= beta.
``lsf_fair_query`` returns a uniformly random visited point with
<p, q> >= alpha, via degree rejection over the visited buckets.
"""

import itertools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import BuildError, RoundCapError
from .sketches import WeightedTree
from .union_sampling import SampleOutcome, SampleStatus


def filter_slack(alpha: float, eps: float) -> float:
    """Additive query slack f(alpha, eps) below alpha times the max."""
    return math.sqrt(2.0 * (1.0 - alpha * alpha) * math.log(1.0 / eps))


def query_exponent(alpha: float, beta: float) -> float:
    """Exponent rho: query time scales as n^rho for the (alpha, beta) gap."""
    return ((1.0 - alpha * alpha) * (1.0 - beta * beta)
            / (1.0 - alpha * beta) ** 2)


def tensor_parts(alpha: float) -> int:
    """Number of tensor parts t = ceil(1/(1 - alpha^2))."""
    return math.ceil(1.0 / (1.0 - alpha * alpha))


@dataclass
class LsfParams:
    """Configuration of the filter index.

    ``eps`` is the total per-repetition miss probability target; it is
    split across the t tensor parts so the per-part slack uses
    eps_part = 1 - (1 - eps)^(1/t).  ``kappa`` only enters the failure
    probability accounting (delta = exp(-sqrt(kappa))), not the data
    structure itself.
    """

    alpha: float
    beta: float
    eps: float = 0.2
    t: Optional[int] = None
    filters_per_part: Optional[int] = None
    reps: Optional[int] = None
    kappa: float = 9.0
    seed: int = 0

    def __post_init__(self):
        if not (0 < self.beta <= self.alpha < 1):
            raise BuildError("need 0 < beta <= alpha < 1")
        if not (0 < self.eps < 1):
            raise BuildError("need 0 < eps < 1")
        if self.t is None:
            self.t = tensor_parts(self.alpha)

    @property
    def eps_part(self) -> float:
        return 1.0 - (1.0 - self.eps) ** (1.0 / self.t)

    @property
    def delta(self) -> float:
        return math.exp(-math.sqrt(self.kappa))

    def resolve_filters(self, n: int) -> int:
        if self.filters_per_part is not None:
            return self.filters_per_part
        # total filter count m = n^((1-beta^2)/(1-alpha*beta)^2)
        m = float(n) ** ((1.0 - self.beta ** 2)
                         / (1.0 - self.alpha * self.beta) ** 2)
        return max(2, math.ceil(m ** (1.0 / self.t)))


class LsfIndex:
    """Gaussian filter index over unit vectors."""

    def __init__(self, points: np.ndarray, params: LsfParams):
        points = np.asarray(points, dtype=np.float64)
        if points.ndim != 2:
            raise BuildError("points must be a 2-d array")
        norms = np.linalg.norm(points, axis=1)
        if not np.allclose(norms, 1.0, atol=1e-6):
            raise BuildError("points must be unit vectors")
        self.points = points
        self.params = params
        n, dim = points.shape
        self.filters_per_part = params.resolve_filters(n)
        self.reps = params.reps if params.reps is not None else max(
            1, math.ceil(math.log2(max(n, 2))))
        rng = np.random.default_rng(params.seed)
        self.filters = []   # per rep: (t, F, dim)
        self.buckets = []   # per rep: dict key-tuple -> list of pids
        self.point_buckets = [[] for _ in range(n)]
        t, F = params.t, self.filters_per_part
        for rep in range(self.reps):
            A = rng.standard_normal((t, F, dim))
            self.filters.append(A)
            proj = np.einsum("tfd,nd->ntf", A, points)
            keys = np.argmax(proj, axis=2)  # ties -> lowest index
            table = {}
            for pid in range(n):
                key = tuple(int(v) for v in keys[pid])
                table.setdefault(key, []).append(pid)
                self.point_buckets[pid].append((rep, key))
            for bucket in table.values():
                rng.shuffle(bucket)
            self.buckets.append(table)

    @property
    def n(self) -> int:
        return len(self.points)

    def similarity(self, q: np.ndarray, pid: int) -> float:
        return float(np.dot(q, self.points[pid]))

    def part_index_lists(self, q: np.ndarray, rep: int) -> list:
        """Per part, the filter indices whose inner product with q is at
        least alpha * (part max) - f(alpha, eps_part)."""
        p = self.params
        proj = np.einsum("tfd,d->tf", self.filters[rep], q)
        slack = filter_slack(p.alpha, p.eps_part)
        lists = []
        for i in range(p.t):
            thr = p.alpha * float(proj[i].max()) - slack
            lists.append([int(j) for j in np.nonzero(proj[i] >= thr)[0]])
        return lists

    def visited_buckets(self, q: np.ndarray, rep: int):
        """Non-empty buckets addressed by the product of the index lists,
        in enumeration order."""
        table = self.buckets[rep]
        out = []
        for key in itertools.product(*self.part_index_lists(q, rep)):
            bucket = table.get(key)
            if bucket:
                out.append((key, bucket))
        return out


def build_lsf(points, alpha: float, beta: float, **kwargs) -> LsfIndex:
    return LsfIndex(points, LsfParams(alpha=alpha, beta=beta, **kwargs))


def lsf_ann_query(index: LsfIndex, q: np.ndarray,
                  beta: Optional[float] = None,
                  max_reps: Optional[int] = None) -> Optional[int]:
    """First visited point with similarity >= beta, scanning repetitions
    in order; None if every repetition comes up empty."""
    if beta is None:
        beta = index.params.beta
    reps = index.reps if max_reps is None else min(max_reps, index.reps)
    for rep in range(reps):
        for _key, bucket in index.visited_buckets(q, rep):
            for pid in bucket:
                if index.similarity(q, pid) >= beta:
                    return pid
    return None


def lsf_fair_query(index: LsfIndex, q: np.ndarray,
                   rng: np.random.Generator,
                   round_cap: Optional[int] = None) -> SampleOutcome:
    """Uniformly random point with similarity >= alpha among those stored
    in the query's visited buckets (all repetitions pooled).

    After an existence scan, rounds pick a bucket proportionally to its
    (active) size and a member uniformly; points below alpha are removed
    from that bucket for the rest of the draw, points at or above alpha
    are accepted with probability 1/degree, the degree being the number
    of visited buckets holding the point (counted via back-pointers).
    All removals are rolled back before returning.
    """
    alpha = index.params.alpha
    visited = []   # (rep, key, bucket-list)
    epoch = set()
    for rep in range(index.reps):
        for key, bucket in index.visited_buckets(q, rep):
            visited.append((rep, key, bucket))
            epoch.add((rep, key))
    sims = {}

    def sim(pid: int) -> float:
        v = sims.get(pid)
        if v is None:
            v = index.similarity(q, pid)
            sims[pid] = v
        return v

    exists = any(sim(pid) >= alpha for _r, _k, b in visited for pid in b)
    if not exists:
        return SampleOutcome(None, SampleStatus.EMPTY)

    active = [len(b) for _r, _k, b in visited]
    tree = WeightedTree(active)
    if round_cap is None:
        round_cap = max(1000, 64 * int(tree.total) * max(
            1, math.ceil(math.log2(max(index.n, 2)))))
    undo = []

    def rollback():
        for bi, i, j in reversed(undo):
            b = visited[bi][2]
            b[i], b[j] = b[j], b[i]

    rounds = 0
    outliers = 0
    while rounds < round_cap:
        rounds += 1
        bi = tree.sample(rng)
        bucket = visited[bi][2]
        pos = int(rng.integers(active[bi]))
        pid = bucket[pos]
        if sim(pid) < alpha:
            last = active[bi] - 1
            if pos != last:
                bucket[pos], bucket[last] = bucket[last], bucket[pos]
            undo.append((bi, pos, last))
            active[bi] = last
            tree.update(bi, last)
            outliers += 1
            continue
        degree = sum(1 for ref in index.point_buckets[pid] if ref in epoch)
        if rng.random() * degree < 1.0:
            rollback()
            return SampleOutcome(pid, rounds=rounds, outliers_seen=outliers)
    rollback()
    raise RoundCapError(f"no acceptance within {round_cap} rounds")
