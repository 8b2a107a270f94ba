"""Independent brute-force oracles used to validate the DP kernels and the
partition oracle layer.  Everything here enumerates; nothing here shares code
with the package internals beyond basic data plumbing.
"""
from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Optional, Sequence


def enumerate_assignments(sizes: Sequence[int], target: int):
    """Yield every 0/1 side vector (side per component, 0 = cluster 0) whose
    cluster-0 mass is exactly ``target``."""
    k = len(sizes)
    for bits in itertools.product((0, 1), repeat=k):
        if sum(s for s, b in zip(sizes, bits) if b == 0) == target:
            yield list(bits)


def bf_feasible(sizes: Sequence[int], target: int) -> bool:
    return any(True for _ in enumerate_assignments(sizes, target))


def bf_count(sizes: Sequence[int], target: int) -> int:
    return sum(1 for _ in enumerate_assignments(sizes, target))


def bf_min_move(
    sizes: Sequence[int], move_costs: Sequence[int], target: int
) -> Optional[int]:
    """Minimum total cluster-0 placement cost over valid assignments."""
    best = None
    for bits in enumerate_assignments(sizes, target):
        c = sum(k for k, b in zip(move_costs, bits) if b == 0)
        if best is None or c < best:
            best = c
    return best


def bf_balanced_feasible(
    sizes: Sequence[int],
    is_r: Sequence[bool],
    target: int,
    lo: int,
    hi: int,
) -> bool:
    for bits in enumerate_assignments(sizes, target):
        r0 = sum(1 for r, b in zip(is_r, bits) if r and b == 0)
        if lo <= r0 <= hi:
            return True
    return False


def bf_balanced_min_move(
    sizes: Sequence[int],
    move_costs: Sequence[int],
    is_r: Sequence[bool],
    target: int,
    lo: int,
    hi: int,
) -> Optional[int]:
    best = None
    for bits in enumerate_assignments(sizes, target):
        r0 = sum(1 for r, b in zip(is_r, bits) if r and b == 0)
        if not (lo <= r0 <= hi):
            continue
        c = sum(k for k, b in zip(move_costs, bits) if b == 0)
        if best is None or c < best:
            best = c
    return best


def bf_partition_distance(p: Sequence[int], q: Sequence[int]) -> int:
    return sum(1 for a, b in zip(p, q) if a != b)


def bf_bezout_search(
    a_values: Sequence[int], b_values: Sequence[int], bound: int
) -> Optional[tuple[list[int], list[int]]]:
    """Smallest-coefficient-sum nonnegative certificate with
    sum(r*a) = gcd(all) + sum(s*b), all coefficients <= ``bound``.

    Pure enumeration over the coefficient grid, ordered by total coefficient
    sum so the first hit is minimal.  Intended for tiny inputs only.
    """
    import math

    g = math.gcd(*a_values, *b_values)
    k, l = len(a_values), len(b_values)
    for total in range(0, bound * (k + l) + 1):
        for r in _compositions(total, k, bound):
            lhs = sum(x * a for x, a in zip(r, a_values))
            rem = lhs - g
            if rem < 0:
                continue
            for s in _bounded_reps(rem, b_values, bound):
                return list(r), list(s)
    return None


def _compositions(total: int, parts: int, bound: int):
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(min(total, bound) + 1):
        for rest in _compositions(total - first, parts - 1, bound):
            yield (first,) + rest


def _bounded_reps(value: int, values: Sequence[int], bound: int):
    """Yield one representation value = sum(s_i * values_i), 0 <= s_i <= bound."""
    if not values:
        if value == 0:
            yield ()
        return
    v = values[0]
    for s in range(min(bound, value // v) + 1):
        for rest in _bounded_reps(value - s * v, values[1:], bound):
            yield (s,) + rest
            return  # one witness is enough


def bf_opt(n: int, p0: Sequence[int], requests: Sequence[tuple[int, int]]) -> int:
    """Exact offline optimum by exhaustive DP over all balanced partitions.

    Service is charged against the pre-move partition, then any move is
    allowed.  Independent of the package's vectorized implementation.
    """
    states = [bits for bits in itertools.product((0, 1), repeat=n)
              if sum(bits) == n // 2]
    index = {s: i for i, s in enumerate(states)}
    dist = [
        [sum(1 for a, b in zip(x, y) if a != b) for y in states] for x in states
    ]
    inf = float("inf")
    f = [inf] * len(states)
    f[index[tuple(p0)]] = 0
    for (u, v) in requests:
        served = [
            f[i] + (1 if states[i][u] != states[i][v] else 0)
            for i in range(len(states))
        ]
        f = [
            min(served[j] + dist[j][i] for j in range(len(states)))
            for i in range(len(states))
        ]
    return int(min(f))


def chi_square_stat(observed: dict, expected_total: int) -> Fraction:
    """Chi-square statistic against the uniform distribution over the keys."""
    cells = len(observed)
    expected = Fraction(expected_total, cells)
    return sum(
        (Fraction(count) - expected) ** 2 / expected for count in observed.values()
    )
