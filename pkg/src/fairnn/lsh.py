"""Locality-sensitive hashing indexes over set-valued (Jaccard) or
vector-valued (Euclidean) points.

An index holds ``t_rep`` independent replicas, each with L hash tables.
Every (replica, table) bucket is registered as one set of a shared
RankedFamily, so the union samplers can draw from the union of a query's
colliding buckets directly.  Two hash families are supported:

  * ``MinHash1Bit``: concatenation of k one-bit minwise hashes; a single
    unit collides with probability (1 + J)/2 at Jaccard similarity J.
  * ``EuclideanGrid``: concatenation of k random-projection grid cells
    floor((<a, x> + b)/w) with gaussian a and uniform offset b.
"""

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np
from scipy.stats import norm

from .errors import BuildError
from .set_family import RankedFamily, SubFamilyQuery, build_family
from .sketches import DistinctSketch

_U64 = np.uint64


@dataclass(frozen=True)
class MinHash1Bit:
    """k concatenated 1-bit minwise hashes for Jaccard similarity."""
    k: int


@dataclass(frozen=True)
class EuclideanGrid:
    """k concatenated projection-grid hashes of width w for Euclidean
    distance."""
    k: int
    w: float


LshFamilyKind = Union[MinHash1Bit, EuclideanGrid]


def collision_probability(kind: LshFamilyKind, x: float) -> float:
    """Single-unit collision probability at Jaccard similarity x
    (MinHash1Bit) or Euclidean distance x (EuclideanGrid).  Concatenated
    keys collide with this value raised to the k-th power."""
    if isinstance(kind, MinHash1Bit):
        if not (0 <= x <= 1):
            raise ValueError("similarity must lie in [0, 1]")
        return (1.0 + x) / 2.0
    if isinstance(kind, EuclideanGrid):
        if x < 0:
            raise ValueError("distance must be non-negative")
        if x == 0:
            return 1.0
        ratio = kind.w / x
        return (1.0 - 2.0 * norm.sf(ratio)
                - (2.0 / (math.sqrt(2.0 * math.pi) * ratio))
                * (1.0 - math.exp(-(ratio * ratio) / 2.0)))
    raise TypeError(f"unknown hash family {kind!r}")


def _odd_u64(rng, size):
    return (rng.integers(0, 2 ** 62, size, dtype=np.uint64) << _U64(1)) | _U64(1)


class _MinHashReplica:
    """Hash parameters for one replica: L*k minwise units, each a random
    64-bit multiplier for the minimum plus an independent sign hash whose
    top bit of the minimiser becomes the unit's output bit."""

    def __init__(self, rng, L, k):
        self.L, self.k = L, k
        self.mult = _odd_u64(rng, L * k)
        self.sign = _odd_u64(rng, L * k)

    def keys(self, members: np.ndarray) -> list:
        # minimiser per unit over the member ids, then one bit of a second
        # hash of the minimiser
        ids = members.astype(np.uint64) * _U64(2) + _U64(1)
        with np.errstate(over="ignore"):
            vals = ids[:, None] * self.mult[None, :]
        winners = ids[np.argmin(vals, axis=0)]
        with np.errstate(over="ignore"):
            bits = (winners * self.sign) >> _U64(63)
        bits = bits.reshape(self.L, self.k).astype(np.int64)
        weights = 1 << np.arange(self.k, dtype=np.int64)
        return [int(v) for v in bits @ weights]


class _GridReplica:
    """Hash parameters for one replica: per table a (k x d) gaussian
    projection and uniform offsets."""

    def __init__(self, rng, L, k, w, dim):
        self.L, self.k, self.w = L, k, w
        self.A = rng.standard_normal((L * k, dim))
        self.b = rng.random(L * k) * w

    def keys_many(self, X: np.ndarray) -> list:
        cells = np.floor((X @ self.A.T + self.b) / self.w).astype(np.int64)
        cells = cells.reshape(len(X), self.L, self.k)
        return [[tuple(map(int, row)) for row in point] for point in cells]

    def keys(self, x: np.ndarray) -> list:
        return self.keys_many(x[None, :])[0]


class LshIndex:
    """t_rep replicas x L tables of LSH buckets over a point set, with the
    buckets registered as sets of a shared RankedFamily.

    ``radius`` and ``approx_radius`` are in distance space (for Jaccard
    data: distance = 1 - similarity); similarity thresholds are converted
    at the build helpers.
    """

    def __init__(self, kind, points, L, t_rep, radius, approx_radius, seed):
        self.kind = kind
        self.points = points
        self.L = L
        self.t_rep = t_rep
        self.radius = float(radius)
        self.approx_radius = float(approx_radius)
        self.seed = int(seed)
        self.replica_params = []
        # per replica, per table: dict key -> family set id
        self.bucket_ids = []
        self.family: Optional[RankedFamily] = None
        self.set_sketches = None
        self._estimate_cache = {}
        self._build()

    # -- construction ------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def is_jaccard(self) -> bool:
        return isinstance(self.kind, MinHash1Bit)

    def _build(self):
        rng = np.random.default_rng(self.seed)
        n = self.n
        if n == 0:
            raise BuildError("cannot index an empty point set")
        bucket_lists = []
        for _ in range(self.t_rep):
            if self.is_jaccard:
                rep = _MinHashReplica(rng, self.L, self.kind.k)
                all_keys = [rep.keys(np.asarray(sorted(p), dtype=np.int64))
                            for p in self.points]
            else:
                dim = self.points.shape[1]
                rep = _GridReplica(rng, self.L, self.kind.k, self.kind.w, dim)
                all_keys = rep.keys_many(self.points)
            self.replica_params.append(rep)
            tables = [dict() for _ in range(self.L)]
            for pid in range(n):
                for tab in range(self.L):
                    tables[tab].setdefault(all_keys[pid][tab], []).append(pid)
            rep_ids = []
            for tab in range(self.L):
                id_map = {}
                for key, bucket in tables[tab].items():
                    rng.shuffle(bucket)
                    id_map[key] = len(bucket_lists)
                    bucket_lists.append(bucket)
                rep_ids.append(id_map)
            self.bucket_ids.append(rep_ids)
        self.family = build_family(bucket_lists, n=n, rng=rng)

    def attach_sketches(self, eps: float = 0.5, fail: float = 1e-4,
                        seed: Optional[int] = None):
        """Build per-bucket distinct sketches sharing one hasher set, as
        required by the segment samplers."""
        base = DistinctSketch(eps=eps, fail=fail,
                              seed=self.seed + 1 if seed is None else seed)
        self.set_sketches = []
        for s in self.family.sets:
            sk = base.spawn()
            sk.insert_many(np.asarray(s.ids, dtype=np.int64))
            self.set_sketches.append(sk)

    # -- geometry ----------------------------------------------------------

    def distance(self, q, pid: int) -> float:
        p = self.points[pid]
        if self.is_jaccard:
            inter = len(q & p)
            union = len(q) + len(p) - inter
            return 1.0 - (inter / union if union else 1.0)
        diff = q - p
        return float(math.sqrt(np.dot(diff, diff)))

    def _query_keys(self, q, replica: int) -> list:
        rep = self.replica_params[replica]
        if self.is_jaccard:
            return rep.keys(np.asarray(sorted(q), dtype=np.int64))
        return rep.keys(np.asarray(q, dtype=np.float64))

    def collided_set_ids(self, q, replica: int) -> list:
        """Family set ids of the L buckets q hashes to in one replica
        (missing buckets are skipped)."""
        keys = self._query_keys(q, replica)
        out = []
        for tab in range(self.L):
            sid = self.bucket_ids[replica][tab].get(keys[tab])
            if sid is not None:
                out.append(sid)
        return out

    def distance_memo(self, q):
        memo = {}

        def dist(pid: int) -> float:
            v = memo.get(pid)
            if v is None:
                v = self.distance(q, pid)
                memo[pid] = v
            return v

        return dist

    def query_buckets(self, q, replica: int = 0,
                      mode: str = "exact",
                      outlier_budget: Optional[int] = None) -> SubFamilyQuery:
        """Sub-family query over q's colliding buckets in one replica.

        The attached outlier oracle flags points farther than ``radius``
        (mode 'exact') or ``approx_radius`` (mode 'approx'); distances are
        memoised per returned query.
        """
        if mode not in ("exact", "approx"):
            raise ValueError("mode must be 'exact' or 'approx'")
        cutoff = self.radius if mode == "exact" else self.approx_radius
        dist = self.distance_memo(q)
        return SubFamilyQuery(
            set_ids=self.collided_set_ids(q, replica),
            outlier_oracle=lambda pid: dist(pid) > cutoff,
            outlier_budget=outlier_budget,
        )

    def merged_estimate(self, set_ids) -> float:
        """Cached distinct-count estimate of the union of some buckets."""
        from .sketches import merge_estimate
        if self.set_sketches is None:
            raise BuildError("attach_sketches was not called")
        key = tuple(sorted(set_ids))
        v = self._estimate_cache.get(key)
        if v is None:
            v = merge_estimate([self.set_sketches[sid] for sid in set_ids])
            self._estimate_cache[key] = v
        return v


def build_lsh(points, kind: LshFamilyKind, L: int, t_rep: int = 1,
              radius: float = None, approx_radius: float = None,
              sim_near: float = None, sim_far: float = None,
              seed: int = 0) -> LshIndex:
    """Build an LshIndex.  Thresholds are given either in distance space
    (radius <= approx_radius) or, for Jaccard data, as similarities
    (sim_near >= sim_far) converted via distance = 1 - similarity."""
    if isinstance(kind, MinHash1Bit):
        points = [frozenset(int(x) for x in p) for p in points]
        for i, p in enumerate(points):
            if not p:
                raise BuildError(f"point {i} is an empty set")
        if sim_near is not None:
            radius = 1.0 - sim_near
            approx_radius = 1.0 - sim_far
    elif isinstance(kind, EuclideanGrid):
        points = np.asarray(points, dtype=np.float64)
        if points.ndim != 2:
            raise BuildError("vector data must be a 2-d array")
    else:
        raise TypeError(f"unknown hash family {kind!r}")
    if radius is None or approx_radius is None:
        raise BuildError("need radius and approx_radius (or similarity thresholds)")
    if radius > approx_radius:
        raise BuildError("radius must not exceed approx_radius")
    if L <= 0 or t_rep <= 0:
        raise BuildError("L and t_rep must be positive")
    return LshIndex(kind, points, L, t_rep, radius, approx_radius, seed)


def standard_ann_query(index: LshIndex, q, replica: int = 0) -> Optional[int]:
    """Classic bucket scan: walk q's buckets in one replica and return the
    first point within approx_radius; give up (None) after seeing 3L
    points farther than approx_radius or exhausting the buckets."""
    return _scan_for_near(index, q, replica, index.approx_radius)


def _scan_for_near(index: LshIndex, q, replica: int, cutoff: float) -> Optional[int]:
    far_seen = 0
    limit = 3 * index.L
    for sid in index.collided_set_ids(q, replica):
        for pid in index.family.sets[sid].ids:
            if index.distance(q, pid) <= cutoff:
                return pid
            far_seen += 1
            if far_seen >= limit:
                return None
    return None
