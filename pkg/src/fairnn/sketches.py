"""Small sampling/estimation primitives: distinct-count sketches,
weight-proportional sampling trees, and sequential subset-size estimation.
"""

import math
from typing import Callable, Optional

import numpy as np

from .errors import EstimationError, MergeError, SamplingError

_U64 = np.uint64
_RANGE = 2.0 ** 64  # hash values are uniform in [0, 2^64)


def _num_rows(fail: float) -> int:
    # odd row count so the median is a single row's estimate
    return 2 * max(1, math.ceil(1.5 * math.log2(1.0 / fail))) + 1


class DistinctSketch:
    """Bottom-t distinct-count sketch, median over independent rows.

    Each of the ``rows`` keeps the t smallest distinct 64-bit hash values
    of the inserted support (t = ceil(24/eps^2) by default).  A row below
    capacity has seen fewer than t distinct values and counts exactly;
    otherwise the row estimates t * 2^64 / v_t from its t-th smallest
    value v_t.  The estimate is the median over rows.  Two sketches built
    from the same (seed, eps, fail, t) share hash functions and merge by
    row-wise union, which is indistinguishable from a single-stream build.
    """

    __slots__ = ("eps", "fail", "seed", "t", "num_rows", "_a", "_b", "rows")

    def __init__(self, eps: float = 0.5, fail: float = 0.01, seed: int = 0,
                 t: Optional[int] = None, num_rows: Optional[int] = None):
        if eps <= 0 or not (0 < fail < 1):
            raise ValueError("need eps > 0 and 0 < fail < 1")
        self.eps = float(eps)
        self.fail = float(fail)
        self.seed = int(seed)
        self.t = int(t) if t is not None else math.ceil(24.0 / (eps * eps))
        self.num_rows = int(num_rows) if num_rows is not None else _num_rows(fail)
        rng = np.random.default_rng(self.seed)
        # pairwise-independent multiply-shift style hashing on 64 bits
        self._a = (rng.integers(0, 2 ** 62, self.num_rows, dtype=np.uint64) << _U64(1)) | _U64(1)
        self._b = rng.integers(0, 2 ** 63, self.num_rows, dtype=np.uint64)
        self.rows = [np.empty(0, dtype=np.uint64) for _ in range(self.num_rows)]

    def spawn(self) -> "DistinctSketch":
        """A fresh empty sketch sharing this one's hash functions."""
        return DistinctSketch(self.eps, self.fail, self.seed, self.t, self.num_rows)

    def _params(self):
        return (self.eps, self.fail, self.seed, self.t, self.num_rows)

    def insert(self, x: int) -> None:
        self.insert_many(np.asarray([x]))

    def insert_many(self, xs) -> None:
        xs = np.unique(np.asarray(xs, dtype=np.uint64))
        if xs.size == 0:
            return
        with np.errstate(over="ignore"):
            hashed = (xs[None, :] * self._a[:, None]) + self._b[:, None]
        for w in range(self.num_rows):
            merged = np.unique(np.concatenate([self.rows[w], hashed[w]]))
            self.rows[w] = merged[: self.t]

    def merge(self, other: "DistinctSketch") -> "DistinctSketch":
        if self._params() != other._params():
            raise MergeError("sketches use different hashers or parameters")
        out = self.spawn()
        for w in range(self.num_rows):
            merged = np.unique(np.concatenate([self.rows[w], other.rows[w]]))
            out.rows[w] = merged[: self.t]
        return out

    def estimate(self) -> float:
        vals = []
        for row in self.rows:
            if len(row) < self.t:
                vals.append(float(len(row)))
            else:
                vals.append(self.t * _RANGE / float(row[self.t - 1]))
        return float(np.median(vals))

    def __eq__(self, other) -> bool:
        if not isinstance(other, DistinctSketch):
            return NotImplemented
        return (self._params() == other._params()
                and all(np.array_equal(a, b) for a, b in zip(self.rows, other.rows)))


def merge_estimate(sketches) -> float:
    """Distinct-count estimate of the union behind several sketches.

    Equivalent to folding ``merge`` over the list but only materialises
    row unions once.
    """
    sketches = list(sketches)
    if not sketches:
        return 0.0
    first = sketches[0]
    for sk in sketches[1:]:
        if sk._params() != first._params():
            raise MergeError("sketches use different hashers or parameters")
    t = first.t
    vals = []
    for w in range(first.num_rows):
        merged = np.unique(np.concatenate([sk.rows[w] for sk in sketches]))[:t]
        if len(merged) < t:
            vals.append(float(len(merged)))
        else:
            vals.append(t * _RANGE / float(merged[t - 1]))
    return float(np.median(vals))


class WeightedTree:
    """Static complete binary tree for weight-proportional index sampling.

    Leaves hold non-negative weights; internal nodes hold subtree sums.
    ``update`` and ``sample`` are O(log t).  Inspired by the classic
    array-backed segment tree with power-of-two capacity.
    """

    def __init__(self, weights):
        weights = [float(w) for w in weights]
        if any(w < 0 for w in weights):
            raise ValueError("weights must be non-negative")
        self.size = len(weights)
        cap = 1
        while cap < max(1, self.size):
            cap *= 2
        self._cap = cap
        self._tree = np.zeros(2 * cap, dtype=np.float64)
        self._tree[cap: cap + self.size] = weights
        for i in range(cap - 1, 0, -1):
            self._tree[i] = self._tree[2 * i] + self._tree[2 * i + 1]

    @property
    def total(self) -> float:
        return float(self._tree[1])

    def weight(self, i: int) -> float:
        if not (0 <= i < self.size):
            raise IndexError(i)
        return float(self._tree[self._cap + i])

    def update(self, i: int, w: float) -> None:
        if not (0 <= i < self.size):
            raise IndexError(i)
        if w < 0:
            raise ValueError("weights must be non-negative")
        j = self._cap + i
        self._tree[j] = w
        j //= 2
        while j >= 1:
            self._tree[j] = self._tree[2 * j] + self._tree[2 * j + 1]
            j //= 2

    def sample(self, rng: np.random.Generator) -> int:
        """Draw a leaf index with probability proportional to its weight."""
        if self.total <= 0:
            raise SamplingError("total weight is zero")
        u = rng.random() * self.total
        j = 1
        while j < self._cap:
            left = self._tree[2 * j]
            if u < left:
                j = 2 * j
            else:
                u -= left
                j = 2 * j + 1
        i = j - self._cap
        if i >= self.size:  # float round-off pushed us past the last leaf
            i = self.size - 1
        return i


def estimate_subset_fraction(universe_size: int, member: Callable[[int], bool],
                             eps: float, fail: float, rng: np.random.Generator,
                             probe_cap: Optional[int] = None) -> float:
    """Estimate |B| for an unknown B inside a universe of known size.

    Probes uniformly random indices with replacement until enough hits
    h = ceil(4 ln(2/fail) / eps^2) are observed after k total probes, and
    returns h * universe_size / k.  With probability >= 1 - fail the
    estimate is within (1 +- eps)|B|; expected probes are
    O((universe_size/|B|) eps^-2 log(1/fail)).  Raises EstimationError
    once the probe cap (default 64 * universe_size * eps^-2 * ln(1/fail))
    is exhausted, which certifies B is improbably small or empty.
    """
    if universe_size <= 0:
        raise ValueError("universe_size must be positive")
    if eps <= 0 or not (0 < fail < 1):
        raise ValueError("need eps > 0 and 0 < fail < 1")
    h = math.ceil(4.0 * math.log(2.0 / fail) / (eps * eps))
    if probe_cap is None:
        probe_cap = math.ceil(64.0 * universe_size * math.log(1.0 / fail) / (eps * eps))
    memo = np.full(universe_size, -1, dtype=np.int8)
    probes = 0
    hits = 0
    chunk = 256
    while probes < probe_cap:
        size = min(chunk, probe_cap - probes)
        idx = rng.integers(0, universe_size, size)
        fresh = np.unique(idx[memo[idx] < 0])
        for i in fresh:
            memo[i] = 1 if member(int(i)) else 0
        cum = hits + np.cumsum(memo[idx])
        reached = np.nonzero(cum >= h)[0]
        if reached.size:
            k = probes + int(reached[0]) + 1
            return h * universe_size / k
        hits = int(cum[-1])
        probes += size
        chunk = min(chunk * 4, 1 << 16)
    raise EstimationError(f"probe cap {probe_cap} exhausted with {hits}/{h} hits")
