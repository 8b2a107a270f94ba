"""Exact oracles over component multisets.

Every oracle answers a question about the set P(C) of *C-preserving*
balanced partitions — partitions that keep each component of C whole —
or about its balanced refinement P^g_l(C), the subset whose clusters each
hold at least ``l`` components with sizes on the ladder of ``g``.

Components move atomically, so each oracle reduces to a bounded-count
subset-sum problem over the multiset of component sizes.  The DP work is
delegated to a kernel backend (compiled when available); this module owns
the canonical component ordering, the distance bookkeeping, and the
realization of a component→side assignment as an element partition.

The distance identity used throughout: for balanced ``p_prev`` and any
preserving assignment y, ``dist(p_prev, p_y) = 2 * sum of kappa_c`` over
components placed in cluster 0, where ``kappa_c`` counts the members of c
in cluster 1 of ``p_prev``.  (Both clusters end at n/2, so mass moved in
equals mass moved out.)
"""
from __future__ import annotations

import random
from typing import Optional

from .core import Component, ComponentSet, Partition, dist
from .kernels import Backend, get_backend
from .numbertheory import Extended, in_ladder

__all__ = [
    "exists_preserving",
    "closest_preserving",
    "exists_balanced",
    "best_balanced",
    "count_preserving",
    "sample_uniform",
]


def _canonical(C: ComponentSet) -> list[Component]:
    if C._canon is None:
        C._canon = _canonical_order(C)
    return C._canon


def _canonical_order(C: ComponentSet) -> list[Component]:
    """Components in the fixed order all oracles share: size descending,
    then component id ascending."""
    return sorted(C, key=lambda c: (-c.size, c.cid))


def _size_types(comps: list[Component]) -> tuple[list[int], list[int]]:
    """Collapse canonically-ordered components into (sizes, counts) runs."""
    sizes: list[int] = []
    counts: list[int] = []
    for c in comps:
        if sizes and sizes[-1] == c.size:
            counts[-1] += 1
        else:
            sizes.append(c.size)
            counts.append(1)
    return sizes, counts


def _move_types(
    comps: list[Component], p_prev: Partition
) -> tuple[list[int], list[int], list[int], list[list[Component]]]:
    """Group components by (size, kappa) where kappa is the member mass on
    side 1 of ``p_prev`` — the cost of placing the component on side 0.

    Returns parallel (sizes, kappas, counts, groups); groups keep the
    canonical within-type order (component id ascending).
    """
    keyed: dict[tuple[int, int], list[Component]] = {}
    at = p_prev.sides.__getitem__
    for c in comps:
        kappa = sum(map(at, c.members))
        keyed.setdefault((c.size, kappa), []).append(c)
    order = sorted(keyed, key=lambda k: (-k[0], k[1]))
    sizes = [k[0] for k in order]
    kappas = [k[1] for k in order]
    counts = [len(keyed[k]) for k in order]
    groups = [keyed[k] for k in order]
    return sizes, kappas, counts, groups


def _realize(groups: list[list[Component]], picks: list[int], n: int) -> Partition:
    """Turn per-type side-0 pick counts into an element partition.

    Within each type the first ``picks[i]`` components (smallest ids)
    go to side 0 — the deterministic tie-break shared by all oracles.
    """
    sides = bytearray([1] * n)
    for group, take in zip(groups, picks):
        for c in group[:take]:
            for m in c.members:
                sides[m] = 0
    return Partition(sides)


def _check_query(C: ComponentSet, p_prev: Optional[Partition] = None) -> int:
    n = C.n
    if n < 2 or n % 2 != 0:
        raise ValueError(f"component set covers {n} elements; need even n >= 2")
    if p_prev is not None and p_prev.n != n:
        raise ValueError("partition and component set cover different universes")
    return n


def exists_preserving(C: ComponentSet, backend: Optional[Backend] = None) -> bool:
    """True iff P(C) is nonempty: some sub-multiset of sizes sums to n/2."""
    n = _check_query(C)
    kern = backend or get_backend()
    sizes, counts = _size_types(_canonical(C))
    return kern.feasible_mass(sizes, counts, n // 2)


def closest_preserving(
    C: ComponentSet, p_prev: Partition, backend: Optional[Backend] = None
) -> Optional[tuple[Partition, int]]:
    """A partition in P(C) minimizing dist(p_prev, ·), with that distance.

    Returns None when P(C) is empty.
    """
    n = _check_query(C, p_prev)
    kern = backend or get_backend()
    comps = _canonical(C)
    sizes, kappas, counts, groups = _move_types(comps, p_prev)
    res = kern.min_move_assignment(sizes, kappas, counts, n // 2)
    if res is None:
        return None
    cost, picks = res
    p = _realize(groups, picks, n)
    moved = dist(p_prev, p)
    assert moved == 2 * cost, "distance identity violated"
    return p, moved


def _exists_balanced_types(
    sizes: list[int], counts: list[int], g: Extended, ell: int, q: int,
    n: int, kern: Backend,
) -> bool:
    """Existence core over a size multiset (type order is irrelevant)."""
    is_r = [in_ladder(s, g, q) for s in sizes]
    tot_r = sum(c for c, r in zip(counts, is_r) if r)
    if tot_r < 2 * ell:
        return False
    return kern.balanced_feasible(sizes, counts, is_r, n // 2, ell, tot_r - ell)


def exists_balanced(
    C: ComponentSet,
    g: Extended,
    ell: int,
    q: int,
    backend: Optional[Backend] = None,
) -> bool:
    """True iff P^g_ell(C) is nonempty.

    Members of P^g_ell(C) are preserving partitions keeping at least
    ``ell`` components with sizes on the ladder of ``g`` (multiples of g
    up to q) in *both* clusters.
    """
    if ell < 0:
        raise ValueError("balance threshold must be nonnegative")
    if q < 1:
        raise ValueError("q must be positive")
    n = _check_query(C)
    kern = backend or get_backend()
    sizes, counts = _size_types(_canonical(C))
    return _exists_balanced_types(sizes, counts, g, ell, q, n, kern)


def best_balanced(
    C: ComponentSet,
    g: Extended,
    ell: int,
    q: int,
    p_prev: Partition,
    backend: Optional[Backend] = None,
) -> Optional[tuple[Partition, int]]:
    """A partition in P^g_ell(C) minimizing dist(p_prev, ·), with distance.

    Returns None when P^g_ell(C) is empty.  With ell = 0 this coincides
    with :func:`closest_preserving`.
    """
    if ell < 0:
        raise ValueError("balance threshold must be nonnegative")
    if q < 1:
        raise ValueError("q must be positive")
    n = _check_query(C, p_prev)
    kern = backend or get_backend()
    comps = _canonical(C)
    sizes, kappas, counts, groups = _move_types(comps, p_prev)
    is_r = [in_ladder(s, g, q) for s in sizes]
    tot_r = sum(c for c, r in zip(counts, is_r) if r)
    if tot_r < 2 * ell:
        return None
    res = kern.balanced_min_move(
        sizes, kappas, counts, is_r, n // 2, ell, tot_r - ell
    )
    if res is None:
        return None
    cost, picks = res
    p = _realize(groups, picks, n)
    moved = dist(p_prev, p)
    assert moved == 2 * cost, "distance identity violated"
    return p, moved


def count_preserving(C: ComponentSet, backend: Optional[Backend] = None) -> int:
    """|P(C)| exactly, as an arbitrary-precision integer."""
    n = _check_query(C)
    kern = backend or get_backend()
    sizes, counts = _size_types(_canonical(C))
    return kern.count_assignments(sizes, counts, n // 2)


def sample_uniform(
    C: ComponentSet, rng: random.Random, backend: Optional[Backend] = None
) -> Partition:
    """Exact uniform draw from P(C).

    Identical seed and component set give the identical partition,
    whatever the backend.  Raises ValueError when P(C) is empty —
    callers are expected to check :func:`exists_preserving` first.
    """
    n = _check_query(C)
    kern = backend or get_backend()
    comps = _canonical(C)
    comp_sizes = [c.size for c in comps]
    assignment = kern.sample_assignment(comp_sizes, n // 2, rng)
    if assignment is None:
        raise ValueError("cannot sample: no preserving partition exists")
    sides = bytearray(n)
    for c, side in zip(comps, assignment):
        for m in c.members:
            sides[m] = side
    return Partition(sides)
