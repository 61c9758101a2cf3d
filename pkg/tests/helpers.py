"""Independent reference implementations used only by the tests.

Everything here recomputes precedence data from the raw parent map and
works with plain Python sets, on purpose sharing nothing with the package
internals it checks.
"""

from itertools import permutations
from typing import Dict, FrozenSet, Sequence, Tuple


def ancestor_sets(instance) -> Dict[int, FrozenSet[int]]:
    anc = {}
    for v in range(1, instance.n + 1):
        chain = {v}
        cur = v
        while cur != instance.source:
            cur = instance.power_parent[cur]
            chain.add(cur)
        anc[v] = frozenset(chain)
    return anc


def dark_count(anc: Dict[int, FrozenSet[int]], repaired) -> int:
    repaired = set(repaired)
    return sum(1 for a in anc.values() if not a <= repaired)


def sim_objective_with_durations(instance, order: Sequence[int]) -> int:
    """Completion-time simulation honoring explicit repair durations.

    The crew arrives, repairs for the vertex's duration, then departs; a
    vertex has power once every ancestor's repair has completed.
    """
    anc = ancestor_sets(instance)
    p = instance.repair_duration
    done = {}
    now = 0
    prev = 0
    for v in order:
        now += instance.travel[prev][v] + p[v - 1]
        done[v] = now
        prev = v
    return sum(max(done[a] for a in anc[v]) for v in anc)


def leg_sum_objective(instance, order: Sequence[int]) -> int:
    """Total disruption as sum over legs of (dark vertices) * (leg time)."""
    anc = ancestor_sets(instance)
    repaired = set()
    total = 0
    prev = 0
    for v in order:
        total += dark_count(anc, repaired) * instance.travel[prev][v]
        repaired.add(v)
        prev = v
    return total


def dark_profile(instance, order: Sequence[int]) -> Tuple[int, ...]:
    """Dark count right before each arrival along the tour."""
    anc = ancestor_sets(instance)
    repaired = set()
    out = []
    for v in order:
        out.append(dark_count(anc, repaired))
        repaired.add(v)
    return tuple(out)


def latency_objective(travel, order: Sequence[int]) -> int:
    """Classic minimum-latency value: sum of arrival times from the depot."""
    now = 0
    prev = 0
    total = 0
    for v in order:
        now += travel[prev][v]
        total += now
        prev = v
    return total


def latency_brute_force(travel) -> int:
    n = len(travel) - 1
    return min(
        latency_objective(travel, order)
        for order in permutations(range(1, n + 1))
    )


def pure_backward_values(instance):
    """Memoized v(current, unvisited) from the backward recursion.

    Returns a callable v(k, Y) with Y a frozenset; v(0, all) is the optimum.
    """
    anc = ancestor_sets(instance)
    travel = instance.travel
    everything = frozenset(range(1, instance.n + 1))
    memo = {}

    def v(k, unvisited):
        if not unvisited:
            return 0
        key = (k, unvisited)
        if key in memo:
            return memo[key]
        w = dark_count(anc, everything - unvisited)
        best = min(
            w * travel[k][j] + v(j, unvisited - {j}) for j in sorted(unvisited)
        )
        memo[key] = best
        return best

    return v


def pure_backward_optimum(instance) -> int:
    v = pure_backward_values(instance)
    return v(0, frozenset(range(1, instance.n + 1)))


def pure_forward_optimum(instance) -> int:
    """min over endpoints of u(everything, endpoint) from the forward recursion."""
    anc = ancestor_sets(instance)
    travel = instance.travel
    n = instance.n
    memo = {}

    def u(visited, i):
        if visited == frozenset((i,)):
            return n * travel[0][i]
        key = (visited, i)
        if key in memo:
            return memo[key]
        rest = visited - {i}
        w = dark_count(anc, rest)
        best = min(u(rest, j) + w * travel[j][i] for j in sorted(rest))
        memo[key] = best
        return best

    everything = frozenset(range(1, n + 1))
    return min(u(everything, i) for i in range(1, n + 1))


def random_orders(rng, n: int, count: int):
    verts = list(range(1, n + 1))
    for _ in range(count):
        rng.shuffle(verts)
        yield tuple(verts)
