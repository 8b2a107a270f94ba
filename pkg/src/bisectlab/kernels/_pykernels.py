"""Pure-Python kernel implementations.

These are the reference semantics for the hot inner-loop computations:
subset-sum feasibility, minimum-movement assignment, balance-constrained
variants, exact assignment counting, and exact uniform sampling.  The
compiled backend (`_ckernels`) must match these bit for bit: same inputs,
same outputs, same tie-breaks, same rng draws.

Conventions shared by both backends
-----------------------------------
* A *type* is a group of interchangeable components: ``sizes[i]`` elements
  each, ``counts[i]`` of them, optional per-component movement cost
  ``costs[i]`` (the number of elements that end up in cluster 0 although
  they previously sat in cluster 1), and flag ``is_r[i]`` marking whether
  the size belongs to the tracked ladder.
* An *assignment* picks, per type, how many of its components go to
  cluster 0 (`picks`).  The cluster-0 mass must hit ``target`` exactly.
* Minimum-cost results use a canonical tie-break: walking types from last
  to first, take the smallest pick consistent with the optimum.  The
  balance-constrained variant reorders types internally (ladder types
  first, stable), applies the count window at the phase boundary choosing
  the smallest window count achieving the optimum, and returns picks in
  the caller's order.
* ``sample_assignment`` consumes exactly one 64-bit draw per component
  whose side is not forced, extending the draw only when it falls on the
  decision boundary, so the stream of draws is a backend-independent
  function of (component sizes, target, seed).
"""
from __future__ import annotations

from typing import Optional, Sequence

BACKEND_NAME = "python"

_INF = float("inf")


def _reachable_bits(sizes: Sequence[int], counts: Sequence[int], cap: int) -> int:
    """Bitset of masses reachable by sub-multisets, truncated at ``cap``."""
    bits = 1
    mask = (1 << (cap + 1)) - 1
    for s, k in zip(sizes, counts):
        if s <= 0:
            raise ValueError("sizes must be positive")
        k = min(k, cap // s)
        step = 1
        while k > 0:
            take = min(step, k)
            bits |= (bits << (take * s)) & mask
            k -= take
            step <<= 1
    return bits


def feasible_mass(sizes: Sequence[int], counts: Sequence[int], target: int) -> bool:
    """Can some sub-multiset of components reach exactly ``target`` mass?"""
    if target < 0:
        return False
    total = sum(s * k for s, k in zip(sizes, counts))
    if target > total:
        return False
    return (_reachable_bits(sizes, counts, target) >> target) & 1 == 1


def min_move_assignment(
    sizes: Sequence[int],
    costs: Sequence[int],
    counts: Sequence[int],
    target: int,
) -> Optional[tuple[int, list[int]]]:
    """Cheapest picks with cluster-0 mass exactly ``target``.

    Cost of a pick vector is ``sum(picks[i] * costs[i])``.  Returns
    ``(total_cost, picks)`` or None when the target mass is unreachable.
    """
    t = len(sizes)
    if target < 0:
        return None
    # layers[i] = DP table after processing types 0..i-1
    layer = [_INF] * (target + 1)
    layer[0] = 0
    layers = [layer]
    for i in range(t):
        s, kappa, k = sizes[i], costs[i], counts[i]
        prev = layers[-1]
        cur = list(prev)
        for m in range(1, target + 1):
            jmax = min(k, m // s)
            best = cur[m]
            for j in range(1, jmax + 1):
                v = prev[m - j * s] + j * kappa
                if v < best:
                    best = v
            cur[m] = best
        layers.append(cur)
    if layers[t][target] == _INF:
        return None
    # canonical backtrack: smallest pick per type, last type first
    picks = [0] * t
    m = target
    for i in range(t - 1, -1, -1):
        s, kappa, k = sizes[i], costs[i], counts[i]
        want = layers[i + 1][m]
        for j in range(0, min(k, m // s) + 1):
            if layers[i][m - j * s] + j * kappa == want:
                picks[i] = j
                m -= j * s
                break
        else:  # pragma: no cover - unreachable if DP is consistent
            raise AssertionError("backtrack failed")
    return int(layers[t][target]), picks


def _split_r_first(is_r: Sequence[bool]) -> list[int]:
    """Stable permutation putting ladder types first."""
    order = [i for i, r in enumerate(is_r) if r]
    order += [i for i, r in enumerate(is_r) if not r]
    return order


def balanced_feasible(
    sizes: Sequence[int],
    counts: Sequence[int],
    is_r: Sequence[bool],
    target: int,
    lo: int,
    hi: int,
) -> bool:
    """Is there an assignment with mass ``target`` and cluster-0 ladder-type
    component count in ``[lo, hi]``?"""
    if target < 0 or lo > hi:
        return False
    r_idx = [i for i, r in enumerate(is_r) if r]
    nr_idx = [i for i, r in enumerate(is_r) if not r]
    tot_r = sum(counts[i] for i in r_idx)
    lo = max(lo, 0)
    hi = min(hi, tot_r)
    if lo > hi:
        return False
    r_mass_cap = min(target, sum(sizes[i] * counts[i] for i in r_idx))
    # rows[m] = bitmask over achievable cluster-0 ladder counts at ladder mass m
    rows = [0] * (r_mass_cap + 1)
    rows[0] = 1
    for i in r_idx:
        s, k = sizes[i], counts[i]
        k = min(k, r_mass_cap // s) if s <= r_mass_cap else 0
        step = 1
        while k > 0:
            take = min(step, k)
            cm, cj = take * s, take
            for m in range(r_mass_cap, cm - 1, -1):
                if rows[m - cm]:
                    rows[m] |= rows[m - cm] << cj
            k -= take
            step <<= 1
    window = ((1 << (hi - lo + 1)) - 1) << lo
    bits = 0
    for m in range(r_mass_cap + 1):
        if rows[m] & window:
            bits |= 1 << m
    if bits == 0:
        return False
    # non-ladder phase: plain subset-sum on top of feasible boundary masses
    mask = (1 << (target + 1)) - 1
    for i in nr_idx:
        s, k = sizes[i], counts[i]
        k = min(k, target // s) if s <= target else 0
        step = 1
        while k > 0:
            take = min(step, k)
            bits |= (bits << (take * s)) & mask
            k -= take
            step <<= 1
    return (bits >> target) & 1 == 1


def balanced_min_move(
    sizes: Sequence[int],
    costs: Sequence[int],
    counts: Sequence[int],
    is_r: Sequence[bool],
    target: int,
    lo: int,
    hi: int,
) -> Optional[tuple[int, list[int]]]:
    """Cheapest assignment with mass ``target`` and cluster-0 ladder count in
    ``[lo, hi]``.  Returns ``(total_cost, picks)`` in the caller's type order,
    or None when infeasible."""
    t = len(sizes)
    if target < 0 or lo > hi:
        return None
    order = _split_r_first(is_r)
    n_r = sum(1 for r in is_r if r)
    tot_r = sum(counts[i] for i, r in enumerate(is_r) if r)
    lo = max(lo, 0)
    hi = min(hi, tot_r)
    if lo > hi:
        return None

    # phase 1: ladder types with exact (mass, count) state
    r_layers: list[list[list[float]]] = []
    cur = [[_INF] * (tot_r + 1) for _ in range(target + 1)]
    cur[0][0] = 0
    r_layers.append(cur)
    for pos in range(n_r):
        i = order[pos]
        s, kappa, k = sizes[i], costs[i], counts[i]
        prev = r_layers[-1]
        nxt = [row[:] for row in prev]
        for m in range(1, target + 1):
            for c in range(1, tot_r + 1):
                jmax = min(k, m // s, c)
                best = nxt[m][c]
                for j in range(1, jmax + 1):
                    v = prev[m - j * s][c - j]
                    if v + j * kappa < best:
                        best = v + j * kappa
                nxt[m][c] = best
        r_layers.append(nxt)

    # boundary: apply the count window, collapse the count dimension
    boundary = r_layers[-1]
    f1 = [_INF] * (target + 1)
    c_star = [-1] * (target + 1)
    for m in range(target + 1):
        best, bc = _INF, -1
        row = boundary[m]
        for c in range(lo, hi + 1):
            if row[c] < best:
                best, bc = row[c], c
        f1[m] = best
        c_star[m] = bc

    # phase 2: non-ladder types, 1D
    nr_layers = [f1]
    for pos in range(n_r, t):
        i = order[pos]
        s, kappa, k = sizes[i], costs[i], counts[i]
        prev = nr_layers[-1]
        cur1 = list(prev)
        for m in range(1, target + 1):
            jmax = min(k, m // s)
            best = cur1[m]
            for j in range(1, jmax + 1):
                v = prev[m - j * s]
                if v + j * kappa < best:
                    best = v + j * kappa
            cur1[m] = best
        nr_layers.append(cur1)

    total = nr_layers[-1][target]
    if total == _INF:
        return None

    picks = [0] * t
    # backtrack non-ladder phase (last processed first, smallest pick)
    m = target
    for pos in range(t - 1, n_r - 1, -1):
        i = order[pos]
        s, kappa, k = sizes[i], costs[i], counts[i]
        want = nr_layers[pos - n_r + 1][m]
        for j in range(0, min(k, m // s) + 1):
            v = nr_layers[pos - n_r][m - j * s]
            if v + j * kappa == want:
                picks[i] = j
                m -= j * s
                break
        else:  # pragma: no cover
            raise AssertionError("backtrack failed (non-ladder)")
    # boundary count, then ladder phase
    c = c_star[m]
    if c < 0:  # pragma: no cover
        raise AssertionError("backtrack failed (boundary)")
    for pos in range(n_r - 1, -1, -1):
        i = order[pos]
        s, kappa, k = sizes[i], costs[i], counts[i]
        want = r_layers[pos + 1][m][c]
        for j in range(0, min(k, m // s, c) + 1):
            v = r_layers[pos][m - j * s][c - j]
            if v + j * kappa == want:
                picks[i] = j
                m -= j * s
                c -= j
                break
        else:  # pragma: no cover
            raise AssertionError("backtrack failed (ladder)")
    return int(total), picks


def count_assignments(sizes: Sequence[int], counts: Sequence[int], target: int) -> int:
    """Exact number of assignments with cluster-0 mass ``target``.

    Components of equal size are distinguishable, hence the binomial
    weights.  Arbitrary precision.
    """
    from math import comb

    if target < 0:
        return 0
    table = [0] * (target + 1)
    table[0] = 1
    for s, k in zip(sizes, counts):
        new = [0] * (target + 1)
        for m in range(target + 1):
            if table[m] == 0:
                continue
            v = table[m]
            jmax = min(k, (target - m) // s)
            for j in range(jmax + 1):
                new[m + j * s] += v * comb(k, j)
        table = new
    return table[target]


def lazy_bernoulli(rng, n0: int, n1: int) -> int:
    """Draw 0 with probability n0/(n0+n1), 1 otherwise — exactly.

    Consumes 64-bit chunks from ``rng.getrandbits`` lazily: the draw is
    extended only while the sampled dyadic interval straddles the
    threshold.  Preconditions: n0 > 0 and n1 > 0.
    """
    d = n0 + n1
    bits = 64
    u = rng.getrandbits(64)
    while True:
        # u encodes the interval [u, u+1) / 2^bits
        scaled = n0 << bits
        if (u + 1) * d <= scaled:
            return 0
        if u * d >= scaled:
            return 1
        u = (u << 64) | rng.getrandbits(64)
        bits += 64


def sample_assignment(
    comp_sizes: Sequence[int], target: int, rng
) -> Optional[list[int]]:
    """Uniformly random assignment (side per component) with cluster-0 mass
    exactly ``target``; None when no assignment exists.

    Components are processed in the caller's order; suffix counting tables
    make every conditional choice exact.
    """
    k = len(comp_sizes)
    if target < 0:
        return None
    # suffix[i][m] = number of completions over comps i.. with mass m
    suffix: list[list[int]] = [[] for _ in range(k + 1)]
    suffix[k] = [1]
    cap = 0
    caps = [0] * (k + 1)
    for i in range(k - 1, -1, -1):
        s = comp_sizes[i]
        cap = min(target, cap + s)
        caps[i] = cap
        prev = suffix[i + 1]
        cur = [0] * (cap + 1)
        plen = len(prev)
        for m in range(min(cap, plen - 1) + 1):
            cur[m] = prev[m]
        for m in range(s, cap + 1):
            if m - s < plen:
                cur[m] += prev[m - s]
        suffix[i] = cur
    if k == 0:
        return [] if target == 0 else None
    if target > caps[0] or suffix[0][target] == 0:
        return None
    sides = [0] * k
    r = target
    for i in range(k):
        s = comp_sizes[i]
        nxt = suffix[i + 1]
        n0 = nxt[r - s] if 0 <= r - s < len(nxt) else 0
        n1 = nxt[r] if r < len(nxt) else 0
        if n0 == 0 and n1 == 0:  # pragma: no cover - inconsistent tables
            raise AssertionError("sampling walk hit a dead state")
        if n0 == 0:
            side = 1
        elif n1 == 0:
            side = 0
        else:
            side = lazy_bernoulli(rng, n0, n1)
        sides[i] = side
        if side == 0:
            r -= s
    return sides


def sample_support_count(comp_sizes: Sequence[int], target: int) -> int:
    """Number of assignments ``sample_assignment`` can return (diagnostics)."""
    sizes = list(comp_sizes)
    return count_assignments(sizes, [1] * len(sizes), target)
