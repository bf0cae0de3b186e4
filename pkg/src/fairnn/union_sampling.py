"""Sampling a uniform (or almost-uniform) element from a union of sets.

All samplers operate on a RankedFamily plus a SubFamilyQuery naming the
sets F' whose union is the target population.  Variants trade off
guarantees and cost:

  * ``sample_dependent``           min-rank element; uniform over the one
                                   permutation draw, but constant across
                                   repeated queries (dependent).
  * ``sample_dependent_perturb``   min-rank plus a rank re-randomisation of
                                   the returned element; each repeat is
                                   marginally uniform.
  * ``sample_exact_degree``        weighted set pick + rejection by exact
                                   degree; exactly uniform, independent.
  * ``sample_approx_degree``       degree replaced by a sequential
                                   (1 +- eps) estimate; eps-uniform.
  * ``sample_simulation``          degree rejection simulated by random
                                   urn probes; eps-uniform without ever
                                   computing the degree.
  * ``sample_rank_segment``        uniform rank segment + acceptance by
                                   segment occupancy; exactly uniform and
                                   independent across repeats.

Each has an outlier-aware twin that skips elements flagged by the
query's outlier oracle, spending at most ``outlier_budget`` touches.
"""

import heapq
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import RoundCapError, SamplingError, SegmentOverflowError
from .set_family import RankedFamily, SubFamilyQuery
from .sketches import WeightedTree, estimate_subset_fraction, merge_estimate


class SampleStatus(Enum):
    OK = "ok"
    EMPTY = "empty"
    BUDGET_EXCEEDED = "outlier_budget_exceeded"


class SamplerKind(Enum):
    DEPENDENT_MIN_RANK = "dependent_min_rank"
    RANK_PERTURB = "rank_perturb"
    EXACT_DEGREE = "exact_degree"
    APPROX_DEGREE = "approx_degree"
    SIMULATION = "simulation"
    RANK_SEGMENT = "rank_segment"


@dataclass
class SampleOutcome:
    """Result of one draw: the element (or a terminal status) plus
    diagnostics about the work spent."""

    element: Optional[int]
    status: SampleStatus = SampleStatus.OK
    rounds: int = 0
    probes: int = 0
    outliers_seen: int = 0
    work_log: Optional[list] = None

    @property
    def ok(self) -> bool:
        return self.status is SampleStatus.OK


def _query_sets(family: RankedFamily, query: SubFamilyQuery):
    return family.check_query(query)


def _log2n(family: RankedFamily) -> float:
    return math.log2(max(family.n, 2))


# ---------------------------------------------------------------------------
# min-rank samplers


def sample_dependent(family: RankedFamily, query: SubFamilyQuery) -> SampleOutcome:
    """Element of minimum rank in the union: uniform over the permutation
    draw, but identical on every repeat against the same family."""
    sets = _query_sets(family, query)
    best = None
    for s in sets:
        if s.ranks and (best is None or s.ranks[0] < best):
            best = s.ranks[0]
    if best is None:
        return SampleOutcome(None, SampleStatus.EMPTY)
    return SampleOutcome(int(family.ground.element_at_rank[best]), rounds=1)


def sample_dependent_perturb(family: RankedFamily, query: SubFamilyQuery,
                             rng: np.random.Generator) -> SampleOutcome:
    """Min-rank draw followed by re-randomising the winner's rank.

    The returned element x swaps ranks with the occupant of a uniform
    rank in {rank(x), ..., n-1}; this is one step of a backward
    Fisher-Yates shuffle, so each repeat is marginally uniform over the
    union even though consecutive repeats are correlated.
    """
    out = sample_dependent(family, query)
    if out.ok:
        x = out.element
        rx = int(family.ground.rank_of[x])
        target = int(rng.integers(rx, family.n))
        family.swap_ranks(x, int(family.ground.element_at_rank[target]))
    return out


# ---------------------------------------------------------------------------
# degree-rejection samplers


def _size_cumsum(sets):
    sizes = np.array([len(s) for s in sets], dtype=np.int64)
    return sizes, np.cumsum(sizes)


def _pick_weighted(cum, total, rng) -> int:
    return int(np.searchsorted(cum, rng.random() * total, side="right"))


def _degree(x: int, sets) -> int:
    return sum(1 for s in sets if x in s.members)


def _default_round_cap(family: RankedFamily, total: int, scale: float = 1.0) -> int:
    return max(1000, math.ceil(64 * total * max(1.0, _log2n(family)) * scale))


def sample_exact_degree(family: RankedFamily, query: SubFamilyQuery,
                        rng: np.random.Generator,
                        round_cap: Optional[int] = None) -> SampleOutcome:
    """Exactly uniform, independent draws: pick a set proportionally to
    its size, pick a member uniformly, accept with probability 1/degree."""
    sets = _query_sets(family, query)
    sizes, cum = _size_cumsum(sets)
    total = int(cum[-1]) if len(cum) else 0
    if total == 0:
        return SampleOutcome(None, SampleStatus.EMPTY)
    if round_cap is None:
        round_cap = _default_round_cap(family, total)
    rounds = 0
    probes = 0
    while rounds < round_cap:
        rounds += 1
        s = sets[_pick_weighted(cum, total, rng)]
        x = s.ids[int(rng.integers(len(s.ids)))]
        d = _degree(x, sets)
        probes += len(sets)
        if rng.random() * d < 1.0:
            return SampleOutcome(x, rounds=rounds, probes=probes)
    raise RoundCapError(f"no acceptance within {round_cap} rounds")


def sample_approx_degree(family: RankedFamily, query: SubFamilyQuery, eps: float,
                         rng: np.random.Generator, fail: Optional[float] = None,
                         round_cap: Optional[int] = None) -> SampleOutcome:
    """Like sample_exact_degree but the degree is estimated sequentially
    to within (1 +- eps/2), giving eps-uniform output probabilities."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    sets = _query_sets(family, query)
    sizes, cum = _size_cumsum(sets)
    total = int(cum[-1]) if len(cum) else 0
    if total == 0:
        return SampleOutcome(None, SampleStatus.EMPTY)
    if fail is None:
        fail = eps / 16.0
    if round_cap is None:
        round_cap = _default_round_cap(family, total)
    g = len(sets)
    rounds = 0
    while rounds < round_cap:
        rounds += 1
        s = sets[_pick_weighted(cum, total, rng)]
        x = s.ids[int(rng.integers(len(s.ids)))]
        est = estimate_subset_fraction(
            g, lambda j: x in sets[j].members, eps / 2.0, fail, rng)
        if rng.random() * est < 1.0:
            return SampleOutcome(x, rounds=rounds)
    raise RoundCapError(f"no acceptance within {round_cap} rounds")


# ---------------------------------------------------------------------------
# urn-probing primitives (degree rejection without computing the degree)


def accept_bit_scale(fail: float) -> int:
    """The deterministic scale Delta = ceil(ln(1/fail)) + 4 used by the
    urn acceptance bit."""
    if not (0 < fail < 1):
        raise ValueError("need 0 < fail < 1")
    return math.ceil(math.log(1.0 / fail)) + 4


def urn_probe_expectation(num_urns: int, nonempty: Callable[[int], bool],
                          rng: np.random.Generator) -> float:
    """Probe urns uniformly with replacement until a non-empty one is hit
    at trial i; return i/num_urns.  With d non-empty urns the value has
    expectation exactly 1/d."""
    if num_urns <= 0:
        raise ValueError("num_urns must be positive")
    memo = {}
    i = 0
    while True:
        i += 1
        j = int(rng.integers(num_urns))
        hit = memo.get(j)
        if hit is None:
            hit = bool(nonempty(j))
            memo[j] = hit
            if not hit and len(memo) == num_urns and not any(memo.values()):
                raise SamplingError("no non-empty urn")
        if hit:
            return i / num_urns


def urn_accept_bit(num_urns: int, nonempty: Callable[[int], bool], fail: float,
                   rng: np.random.Generator) -> int:
    """A 0/1 bit with Pr[1] in [1/(d*Delta) - fail, 1/(d*Delta)] where d is
    the number of non-empty urns and Delta = accept_bit_scale(fail).

    Probes uniformly until the first hit at trial i <= num_urns*Delta and
    then emits 1 with probability i/(num_urns*Delta); if no hit occurs in
    time the process truncates to 0.
    """
    if num_urns <= 0:
        raise ValueError("num_urns must be positive")
    scale = accept_bit_scale(fail)
    limit = num_urns * scale
    memo = {}
    for i in range(1, limit + 1):
        j = int(rng.integers(num_urns))
        hit = memo.get(j)
        if hit is None:
            hit = bool(nonempty(j))
            memo[j] = hit
        if hit:
            return 1 if rng.random() * (num_urns * scale) < i else 0
    return 0


def urn_first_hit_trials(num_urns: int, num_nonempty: int, trials: int,
                         rng: np.random.Generator) -> np.ndarray:
    """Vectorised Monte Carlo of the probing process: the trial index of
    the first hit is geometric with success probability d/g, which is
    drawn directly (identical law to probing one urn at a time)."""
    if not (0 < num_nonempty <= num_urns):
        raise ValueError("need 0 < num_nonempty <= num_urns")
    return rng.geometric(num_nonempty / num_urns, size=trials)


def urn_probe_values(num_urns: int, num_nonempty: int, trials: int,
                     rng: np.random.Generator) -> np.ndarray:
    """Vectorised batch of urn_probe_expectation values."""
    return urn_first_hit_trials(num_urns, num_nonempty, trials, rng) / num_urns


def urn_accept_bits(num_urns: int, num_nonempty: int, fail: float, trials: int,
                    rng: np.random.Generator) -> np.ndarray:
    """Vectorised batch of urn_accept_bit draws (identical law)."""
    scale = accept_bit_scale(fail)
    i = urn_first_hit_trials(num_urns, num_nonempty, trials, rng)
    u = rng.random(trials)
    return ((i <= num_urns * scale) & (u * (num_urns * scale) < i)).astype(np.uint8)


def _simulation_fail(eps: float, g: int) -> float:
    """A fail probability small enough that the accept-bit slack is an
    eps/8 fraction of the bit's own success probability."""
    fail = (eps / max(g, 2)) ** 2 / 16.0
    while fail > eps / (8.0 * g * accept_bit_scale(fail)):
        fail /= 2.0
    return fail


def _accept_bit_geometric(degree: int, g: int, scale: int,
                          rng: np.random.Generator):
    """First-hit trial index plus the acceptance bit, with the probe
    sequence collapsed to one geometric draw (identical law)."""
    i = int(rng.geometric(degree / g))
    if i > g * scale:
        return g * scale, 0
    return i, 1 if rng.random() * (g * scale) < i else 0


def sample_simulation(family: RankedFamily, query: SubFamilyQuery, eps: float,
                      rng: np.random.Generator,
                      round_cap: Optional[int] = None) -> SampleOutcome:
    """eps-uniform sampler whose rejection step never computes the degree:
    a pick is accepted when the urn acceptance bit (over the query's sets
    as urns, non-empty meaning 'contains the pick') comes up 1."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    sets = _query_sets(family, query)
    sizes, cum = _size_cumsum(sets)
    total = int(cum[-1]) if len(cum) else 0
    if total == 0:
        return SampleOutcome(None, SampleStatus.EMPTY)
    g = len(sets)
    fail = _simulation_fail(eps, g)
    scale = accept_bit_scale(fail)
    if round_cap is None:
        round_cap = _default_round_cap(family, total, scale)
    rounds = 0
    probes = 0
    degree_memo = {}
    while rounds < round_cap:
        rounds += 1
        s = sets[_pick_weighted(cum, total, rng)]
        x = s.ids[int(rng.integers(len(s.ids)))]
        d = degree_memo.get(x)
        if d is None:
            d = _degree(x, sets)
            degree_memo[x] = d
        i, bit = _accept_bit_geometric(d, g, scale, rng)
        probes += i
        if bit:
            return SampleOutcome(x, rounds=rounds, probes=probes)
    raise RoundCapError(f"no acceptance within {round_cap} rounds")


# ---------------------------------------------------------------------------
# rank-segment sampler


def _next_pow2_at_least(x: float) -> int:
    k = 1
    while k < x:
        k *= 2
    return k


def _segment_bounds(n: int, k: int, h: int):
    return (h * n) // k, ((h + 1) * n) // k


def default_segment_bound(family: RankedFamily, c_lambda: float = 8.0) -> int:
    """Acceptance bound on distinct elements per segment: c_lambda * log2 n."""
    return max(1, math.ceil(c_lambda * _log2n(family)))


def sample_rank_segment(family: RankedFamily, query: SubFamilyQuery,
                        set_sketches, rng: np.random.Generator,
                        c_lambda: float = 8.0, seg_bound: Optional[int] = None,
                        num_segments: Optional[int] = None,
                        s_hat: Optional[float] = None,
                        round_cap: Optional[int] = None) -> SampleOutcome:
    """Exactly uniform, independent draws via rank segments.

    The union size is first estimated (within a factor 2, from merged
    per-set distinct sketches); ranks are split into k segments, k the
    next power of two >= twice the estimate.  Each round picks a uniform
    segment h, lists the distinct union elements inside it, accepts the
    round with probability occupancy/seg_bound and then returns a uniform
    element of the segment.  Every element is returned with probability
    exactly 1/(k * seg_bound) per round.  A segment whose occupancy
    exceeds seg_bound aborts with SegmentOverflowError (rare by the
    balls-in-bins bound when seg_bound = c_lambda * log2 n).
    """
    sets = _query_sets(family, query)
    n = family.n
    if s_hat is None:
        s_hat = merge_estimate([set_sketches[sid] for sid in query.set_ids])
    if s_hat <= 0:
        if all(len(s) == 0 for s in sets):
            return SampleOutcome(None, SampleStatus.EMPTY)
        s_hat = 1.0
    k = num_segments if num_segments is not None else _next_pow2_at_least(2.0 * s_hat)
    if seg_bound is None:
        seg_bound = default_segment_bound(family, c_lambda)
    if round_cap is None:
        round_cap = max(1000, 600 * seg_bound)
    rounds = 0
    probes = 0
    while rounds < round_cap:
        rounds += 1
        h = int(rng.integers(k))
        lo, hi = _segment_bounds(n, k, h)
        occupants = {}
        for sid in query.set_ids:
            for x in family.rank_range(sid, lo, hi):
                occupants[x] = True
        probes += len(occupants)
        occ = len(occupants)
        if occ > seg_bound:
            raise SegmentOverflowError(
                f"segment holds {occ} > bound {seg_bound} elements")
        if occ and rng.random() * seg_bound < occ:
            members = list(occupants)
            return SampleOutcome(members[int(rng.integers(occ))],
                                 rounds=rounds, probes=probes)
    raise RoundCapError(f"no acceptance within {round_cap} rounds")


# ---------------------------------------------------------------------------
# outlier-aware variants


def _oracle_memo(query: SubFamilyQuery):
    oracle = query.outlier_oracle or (lambda x: False)
    memo = {}

    def is_outlier(x: int) -> bool:
        v = memo.get(x)
        if v is None:
            v = bool(oracle(x))
            memo[x] = v
        return v

    return is_outlier


def sample_dependent_outliers(family: RankedFamily,
                              query: SubFamilyQuery) -> SampleOutcome:
    """Min-rank element of the union that is not an outlier, found by a
    merged rank scan over the query's sets (a heap of per-set cursors)."""
    sets = _query_sets(family, query)
    is_outlier = _oracle_memo(query)
    heap = [(s.ranks[0], idx, 0) for idx, s in enumerate(sets) if s.ranks]
    heapq.heapify(heap)
    elem = family.ground.element_at_rank
    rounds = 0
    outliers = 0
    while heap:
        rank, idx, pos = heapq.heappop(heap)
        rounds += 1
        x = int(elem[rank])
        if not is_outlier(x):
            return SampleOutcome(x, rounds=rounds, outliers_seen=outliers)
        outliers += 1
        s = sets[idx]
        if pos + 1 < len(s.ranks):
            heapq.heappush(heap, (s.ranks[pos + 1], idx, pos + 1))
    return SampleOutcome(None, SampleStatus.EMPTY, rounds=rounds,
                         outliers_seen=outliers)


def sample_perturb_outliers(family: RankedFamily, query: SubFamilyQuery,
                            rng: np.random.Generator) -> SampleOutcome:
    """Outlier-skipping min-rank draw plus the rank re-randomisation of
    sample_dependent_perturb; marginally uniform over the non-outliers."""
    out = sample_dependent_outliers(family, query)
    if out.ok:
        x = out.element
        rx = int(family.ground.rank_of[x])
        target = int(rng.integers(rx, family.n))
        family.swap_ranks(x, int(family.ground.element_at_rank[target]))
    return out


def sample_approx_outliers(family: RankedFamily, query: SubFamilyQuery, eps: float,
                           rng: np.random.Generator,
                           budget: Optional[int] = None,
                           round_cap: Optional[int] = None) -> SampleOutcome:
    """eps-uniform sampling over the non-outliers of the union.

    Runs the urn-simulation sampler; every outlier drawn is logically
    deleted from the set it was drawn from (swap to the inactive suffix)
    so it cannot be drawn there again.  Deletions are rolled back before
    returning, so the family's state is untouched.  When more than
    ``budget`` deletions occur the draw aborts with BUDGET_EXCEEDED.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    sets = _query_sets(family, query)
    if budget is None:
        budget = query.outlier_budget
    is_outlier = _oracle_memo(query)
    active = [len(s) for s in sets]
    tree = WeightedTree(active)
    total = tree.total
    g = len(sets)
    fail = _simulation_fail(eps, max(g, 1))
    scale = accept_bit_scale(fail)
    if round_cap is None:
        round_cap = _default_round_cap(family, max(int(total), 1), scale)
    undo = []

    def rollback():
        for idx, i, j in reversed(undo):
            ids = sets[idx].ids
            ids[i], ids[j] = ids[j], ids[i]

    rounds = 0
    probes = 0
    outliers = 0
    degree_memo = {}
    while True:
        if total <= 0:
            rollback()
            return SampleOutcome(None, SampleStatus.EMPTY, rounds=rounds,
                                 probes=probes, outliers_seen=outliers)
        if rounds >= round_cap:
            rollback()
            raise RoundCapError(f"no acceptance within {round_cap} rounds")
        rounds += 1
        idx = tree.sample(rng)
        s = sets[idx]
        pos = int(rng.integers(active[idx]))
        x = s.ids[pos]
        if is_outlier(x):
            last = active[idx] - 1
            if pos != last:
                s.ids[pos], s.ids[last] = s.ids[last], s.ids[pos]
            undo.append((idx, pos, last))
            active[idx] = last
            tree.update(idx, last)
            total = tree.total
            outliers += 1
            if budget is not None and outliers > budget:
                rollback()
                return SampleOutcome(None, SampleStatus.BUDGET_EXCEEDED,
                                     rounds=rounds, probes=probes,
                                     outliers_seen=outliers)
            continue
        d = degree_memo.get(x)
        if d is None:
            d = _degree(x, sets)
            degree_memo[x] = d
        i, bit = _accept_bit_geometric(d, g, scale, rng)
        probes += i
        if bit:
            rollback()
            return SampleOutcome(x, rounds=rounds, probes=probes,
                                 outliers_seen=outliers)


def default_sigma_budget(family: RankedFamily, c_sigma: float = 4.0) -> int:
    """Failed-round allowance per segment-count level: c_sigma * log2^2 n."""
    return max(1, math.ceil(c_sigma * _log2n(family) ** 2))


def _segment_scan(family: RankedFamily, set_ids, is_outlier, lo: int, hi: int):
    """Distinct non-outliers in a rank segment plus the number of outlier
    retrieval events (an outlier counts once per set it is pulled from)."""
    occupants = {}
    outlier_events = 0
    for sid in set_ids:
        for x in family.rank_range(sid, lo, hi):
            if is_outlier(x):
                outlier_events += 1
            else:
                occupants[x] = True
    return occupants, outlier_events


def sample_segment_outliers(family: RankedFamily, query: SubFamilyQuery,
                            set_sketches, rng: np.random.Generator,
                            budget: Optional[int] = None,
                            c_lambda: float = 8.0, c_sigma: float = 4.0,
                            seg_bound: Optional[int] = None,
                            num_segments: Optional[int] = None,
                            s_hat: Optional[float] = None) -> SampleOutcome:
    """Exactly uniform, independent draws over the union's non-outliers.

    Runs the rank-segment acceptance loop; since outliers shrink the
    population below the sketch estimate, each segment-count level k gets
    a quota of c_sigma * log2^2 n failed rounds before k is halved.  k
    dropping below 2 certifies (up to the rare failure events) that no
    non-outlier exists and yields EMPTY.  Outlier retrieval events within
    a single segment scan beyond ``budget`` abort with BUDGET_EXCEEDED.
    """
    _query_sets(family, query)
    if budget is None:
        budget = query.outlier_budget
    is_outlier = _oracle_memo(query)
    n = family.n
    if s_hat is None:
        s_hat = merge_estimate([set_sketches[sid] for sid in query.set_ids])
    if s_hat <= 0:
        return SampleOutcome(None, SampleStatus.EMPTY)
    k = num_segments if num_segments is not None else max(
        2, _next_pow2_at_least(2.0 * s_hat))
    if seg_bound is None:
        seg_bound = default_segment_bound(family, c_lambda)
    level_quota = default_sigma_budget(family, c_sigma)
    rounds = 0
    probes = 0
    outliers = 0
    while k >= 2:
        for _ in range(level_quota):
            rounds += 1
            h = int(rng.integers(k))
            lo, hi = _segment_bounds(n, k, h)
            occupants, events = _segment_scan(family, query.set_ids,
                                              is_outlier, lo, hi)
            outliers += events
            probes += len(occupants) + events
            if budget is not None and events > budget:
                return SampleOutcome(None, SampleStatus.BUDGET_EXCEEDED,
                                     rounds=rounds, probes=probes,
                                     outliers_seen=outliers)
            occ = len(occupants)
            if occ > seg_bound:
                raise SegmentOverflowError(
                    f"segment holds {occ} > bound {seg_bound} elements")
            if occ and rng.random() * seg_bound < occ:
                members = list(occupants)
                return SampleOutcome(members[int(rng.integers(occ))],
                                     rounds=rounds, probes=probes,
                                     outliers_seen=outliers)
        k //= 2
    return SampleOutcome(None, SampleStatus.EMPTY, rounds=rounds,
                         probes=probes, outliers_seen=outliers)


def sample_segment_outliers_multi(family: RankedFamily,
                                  queries: Sequence[SubFamilyQuery],
                                  rng: np.random.Generator,
                                  budget: Optional[int] = None,
                                  c_lambda: float = 8.0, c_sigma: float = 4.0,
                                  seg_bound: Optional[int] = None,
                                  num_segments: Optional[int] = None) -> SampleOutcome:
    """Segment sampler over interchangeable replicas of the population.

    Each query addresses one replica whose union of non-outliers is the
    same target population.  Per round the segment h is drawn once; the
    replica whose sets hold the fewest ranks inside the segment (measured
    by rank-count range queries) is scanned, so per-round work tracks the
    cheapest replica.  k starts at the next power of two >= n, removing
    the need for a size estimate.  The chosen replica's work is minimal
    by construction; the per-round measurements are kept in work_log.
    """
    if not queries:
        raise SamplingError("need at least one replica query")
    for q in queries:
        family.check_query(q)
    if budget is None:
        budget = queries[0].outlier_budget
    n = family.n
    if n == 0:
        return SampleOutcome(None, SampleStatus.EMPTY)
    oracles = [_oracle_memo(q) for q in queries]
    k = num_segments if num_segments is not None else max(2, _next_pow2_at_least(n))
    if seg_bound is None:
        seg_bound = default_segment_bound(family, c_lambda)
    level_quota = default_sigma_budget(family, c_sigma)
    rounds = 0
    probes = 0
    outliers = 0
    work_log = []
    while k >= 2:
        for _ in range(level_quota):
            rounds += 1
            h = int(rng.integers(k))
            lo, hi = _segment_bounds(n, k, h)
            works = [sum(family.rank_count(sid, lo, hi) for sid in q.set_ids)
                     for q in queries]
            chosen = int(np.argmin(works))
            work_log.append((chosen, works))
            occupants, events = _segment_scan(
                family, queries[chosen].set_ids, oracles[chosen], lo, hi)
            outliers += events
            probes += len(occupants) + events
            if budget is not None and events > budget:
                return SampleOutcome(None, SampleStatus.BUDGET_EXCEEDED,
                                     rounds=rounds, probes=probes,
                                     outliers_seen=outliers, work_log=work_log)
            occ = len(occupants)
            if occ > seg_bound:
                raise SegmentOverflowError(
                    f"segment holds {occ} > bound {seg_bound} elements")
            if occ and rng.random() * seg_bound < occ:
                members = list(occupants)
                return SampleOutcome(members[int(rng.integers(occ))],
                                     rounds=rounds, probes=probes,
                                     outliers_seen=outliers, work_log=work_log)
        k //= 2
    return SampleOutcome(None, SampleStatus.EMPTY, rounds=rounds, probes=probes,
                         outliers_seen=outliers, work_log=work_log)
