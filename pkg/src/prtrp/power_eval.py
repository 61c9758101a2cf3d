"""Precedence semantics of the power tree and exact route evaluation.

Vertex sets are n-bit masks with bit v-1 standing for vertex v, so the
solver hot loops compare and hash sets as single integers. Supports up to
63 fault vertices.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, Sequence, Tuple

from .instance import Instance, Route


@dataclass(frozen=True)
class PrecedenceIndex:
    """Per-vertex successor and ancestor sets of the power tree.

    successors[v-1] holds v plus everything below it; ancestors[v-1] holds
    v plus everything on its path up to the source. Vertex v is energized
    exactly when its whole ancestor set has been repaired.
    """

    n: int
    source: int
    successors: Tuple[int, ...]
    successor_count: Tuple[int, ...]
    ancestors: Tuple[int, ...]

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1


def build_index(instance: Instance) -> PrecedenceIndex:
    """Index a valid instance. O(n^2) mask construction."""
    n = instance.n
    parent = instance.power_parent
    ancestors = [0] * n
    for v in range(1, n + 1):
        mask = 1 << (v - 1)
        cur = v
        while cur != instance.source:
            cur = parent[cur]
            mask |= 1 << (cur - 1)
        ancestors[v - 1] = mask

    successors = [0] * n
    for j in range(n):
        m = ancestors[j]
        while m:
            low = m & -m
            successors[low.bit_length() - 1] |= 1 << j
            m ^= low

    return PrecedenceIndex(
        n=n,
        source=instance.source,
        successors=tuple(successors),
        successor_count=tuple(s.bit_count() for s in successors),
        ancestors=tuple(ancestors),
    )


def disrupted_count(index: PrecedenceIndex, repaired: int) -> int:
    """Number of fault vertices still without power given a repaired mask.

    A vertex is energized iff all its ancestors are repaired. Depot bits
    (>= n) in the mask are ignored by construction.
    """
    dark = 0
    for a in index.ancestors:
        if a & repaired != a:
            dark += 1
    return dark


def make_disrupted_counter(index: PrecedenceIndex) -> Callable[[int], int]:
    """Memoized disrupted_count for hot loops.

    The memo is a plain dict: create one counter per thread. Values never
    depend on what was cached before.
    """
    ancestors = index.ancestors
    n = index.n
    memo: Dict[int, int] = {0: n, (1 << n) - 1: 0}

    def count(repaired: int) -> int:
        v = memo.get(repaired)
        if v is None:
            v = 0
            for a in ancestors:
                if a & repaired != a:
                    v += 1
            memo[repaired] = v
        return v

    return count


def evaluate_route(
    instance: Instance, index: PrecedenceIndex, order: Sequence[int]
) -> Route:
    """Evaluate a full visiting order on a zero-duration instance.

    Arrival times accumulate travel from the depot; the disruption time of a
    vertex is the largest arrival time among its ancestors (itself
    included). The per-vertex sum is cross-checked against the equivalent
    leg-weighted sum, where each travel leg costs its duration times the
    number of dark vertices while it is driven.
    """
    n = instance.n
    if sorted(order) != list(range(1, n + 1)):
        raise ValueError(f"order is not a permutation of 1..{n}: {tuple(order)}")
    if any(instance.repair_duration):
        raise ValueError("repair durations must be absorbed before evaluation")

    travel = instance.travel
    t = [0] * n
    now = 0
    prev = 0
    mask = 0
    legs_total = 0
    for v in order:
        legs_total += disrupted_count(index, mask) * travel[prev][v]
        now += travel[prev][v]
        t[v - 1] = now
        mask |= 1 << (v - 1)
        prev = v
    # The leg back to the depot has everything repaired and costs nothing.

    r = [0] * n
    for v in range(1, n + 1):
        m = index.ancestors[v - 1]
        best = 0
        while m:
            low = m & -m
            m ^= low
            tv = t[low.bit_length() - 1]
            if tv > best:
                best = tv
        r[v - 1] = best
    objective = sum(r)
    if objective != legs_total:
        raise RuntimeError(
            "internal error: disruption-sum and leg-sum objectives disagree "
            f"({objective} vs {legs_total})"
        )
    return Route(order=tuple(order), objective=objective, r=tuple(r), t=tuple(t))
