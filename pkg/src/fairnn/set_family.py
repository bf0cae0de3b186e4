"""Ranked families of sets over a randomly permuted ground set.

A family F = {S_1, ..., S_g} of sets over a ground set of n elements
(ids 0..n-1).  Every element carries a rank: a position in a random
permutation of the ground set drawn once at build time.  Each set keeps
its members sorted by rank, which supports

  * min-rank queries (first member of the sorted list),
  * rank-range queries via binary search,
  * rank swaps between two elements in O(delta log n), where delta is the
    maximum number of sets any single element belongs to.

Queries address a sub-family F' by set ids and may attach an outlier
oracle (a predicate marking elements that must not be returned) plus a
budget on how many outlier touches a sampler may spend.
"""

from bisect import bisect_left, insort
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import BuildError


class GroundSet:
    """A set {0..n-1} with a stored random permutation (the ranks).

    ``rank_of[x]`` is the rank of element x and ``element_at_rank[r]`` is
    the element occupying rank r; the two arrays are mutually inverse.
    """

    __slots__ = ("rank_of", "element_at_rank")

    def __init__(self, rank_of: np.ndarray, element_at_rank: np.ndarray):
        self.rank_of = rank_of
        self.element_at_rank = element_at_rank

    @classmethod
    def shuffled(cls, n: int, rng: np.random.Generator) -> "GroundSet":
        """Draw a uniform permutation of {0..n-1} (Fisher-Yates via numpy)."""
        element_at_rank = rng.permutation(n).astype(np.int64)
        rank_of = np.empty(n, dtype=np.int64)
        rank_of[element_at_rank] = np.arange(n, dtype=np.int64)
        return cls(rank_of, element_at_rank)

    @property
    def n(self) -> int:
        return len(self.rank_of)

    def swap(self, x: int, y: int) -> None:
        """Exchange the ranks of elements x and y."""
        rx, ry = self.rank_of[x], self.rank_of[y]
        self.rank_of[x], self.rank_of[y] = ry, rx
        self.element_at_rank[rx], self.element_at_rank[ry] = y, x


class ElementSet:
    """One member set: element ids plus the rank-sorted view."""

    __slots__ = ("ids", "ranks", "members")

    def __init__(self, ids: list, ranks: list, members: set):
        self.ids = ids          # storage order (stable, used for uniform picks)
        self.ranks = ranks      # ranks of members, sorted ascending
        self.members = members  # set(ids) for O(1) membership probes

    def __len__(self) -> int:
        return len(self.ids)


@dataclass
class SubFamilyQuery:
    """Addresses a sub-family F' of a RankedFamily.

    ``outlier_oracle`` marks elements that samplers must skip; the oracle
    is consulted lazily.  ``outlier_budget`` caps how many outlier touches
    a budgeted sampler may spend before giving up.
    """

    set_ids: Sequence[int]
    outlier_oracle: Optional[Callable[[int], bool]] = None
    outlier_budget: Optional[int] = None


class RankedFamily:
    """A family of sets with a shared, swappable rank permutation."""

    def __init__(self, ground: GroundSet, sets: list, set_of_element: list):
        self.ground = ground
        self.sets = sets
        self.set_of_element = set_of_element  # element id -> list of set ids

    @property
    def n(self) -> int:
        return self.ground.n

    @property
    def num_sets(self) -> int:
        return len(self.sets)

    @property
    def total_size(self) -> int:
        return sum(len(s) for s in self.sets)

    @property
    def max_multiplicity(self) -> int:
        if not self.set_of_element:
            return 0
        return max(len(owners) for owners in self.set_of_element)

    def check_query(self, query: SubFamilyQuery) -> list:
        """Validate a sub-family query; returns the addressed ElementSets."""
        seen = set()
        out = []
        for sid in query.set_ids:
            if not (0 <= sid < len(self.sets)):
                raise BuildError(f"set id {sid} out of range")
            if sid in seen:
                raise BuildError(f"duplicate set id {sid} in query")
            seen.add(sid)
            out.append(self.sets[sid])
        return out

    def rank_range(self, set_id: int, lo: int, hi: int) -> list:
        """Members of a set with rank in [lo, hi), in increasing rank order."""
        s = self.sets[set_id]
        i = bisect_left(s.ranks, lo)
        j = bisect_left(s.ranks, hi)
        elem = self.ground.element_at_rank
        return [int(elem[r]) for r in s.ranks[i:j]]

    def rank_count(self, set_id: int, lo: int, hi: int) -> int:
        """Number of members of a set with rank in [lo, hi)."""
        s = self.sets[set_id]
        return max(0, bisect_left(s.ranks, hi) - bisect_left(s.ranks, lo))

    def min_rank(self, set_id: int) -> Optional[int]:
        s = self.sets[set_id]
        return s.ranks[0] if s.ranks else None

    def swap_ranks(self, x: int, y: int) -> None:
        """Exchange the ranks of x and y, keeping every containing set sorted."""
        if x == y:
            return
        rx = int(self.ground.rank_of[x])
        ry = int(self.ground.rank_of[y])
        owners_x = set(self.set_of_element[x])
        owners_y = set(self.set_of_element[y])
        # Sets containing both elements keep the same rank multiset.
        for sid in owners_x - owners_y:
            s = self.sets[sid]
            del s.ranks[bisect_left(s.ranks, rx)]
            insort(s.ranks, ry)
        for sid in owners_y - owners_x:
            s = self.sets[sid]
            del s.ranks[bisect_left(s.ranks, ry)]
            insort(s.ranks, rx)
        self.ground.swap(x, y)


def build_family(sets: Sequence[Sequence[int]], seed=None, n: Optional[int] = None,
                 rng: Optional[np.random.Generator] = None) -> RankedFamily:
    """Build a RankedFamily from lists of element ids.

    Element ids must be dense non-negative ints; ``n`` defaults to
    max(id) + 1.  Duplicate ids within one set are rejected.  The rank
    permutation is drawn from ``rng`` (or a fresh generator seeded with
    ``seed``).
    """
    if rng is None:
        rng = np.random.default_rng(seed)
    max_id = -1
    for members in sets:
        for x in members:
            if not isinstance(x, (int, np.integer)) or x < 0:
                raise BuildError(f"bad element id {x!r}")
            if x > max_id:
                max_id = int(x)
    if n is None:
        n = max_id + 1
    elif max_id >= n:
        raise BuildError(f"element id {max_id} >= n={n}")

    ground = GroundSet.shuffled(n, rng)
    set_of_element = [[] for _ in range(n)]
    built = []
    for sid, members in enumerate(sets):
        ids = [int(x) for x in members]
        mset = set(ids)
        if len(mset) != len(ids):
            raise BuildError(f"duplicate element within set {sid}")
        ranks = sorted(int(ground.rank_of[x]) for x in ids)
        built.append(ElementSet(ids, ranks, mset))
        for x in ids:
            set_of_element[x].append(sid)
    return RankedFamily(ground, built, set_of_element)
