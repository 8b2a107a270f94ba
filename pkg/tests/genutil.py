"""Shared test generators and exhaustive partition-level oracles.

Everything here enumerates over raw element partitions via ``itertools``;
nothing below depends on the DP kernels under test.
"""
from __future__ import annotations

import itertools
import random
from typing import Optional

from bisectlab.core import Component, ComponentSet, Partition, dist
from bisectlab.numbertheory import Extended, in_ladder


def random_component_set(
    rng: random.Random, n: int, max_comps: Optional[int] = None
) -> ComponentSet:
    """Random component structure over shuffled elements 0..n-1.

    Sizes come from random cuts of n; component ids are drawn sparse and
    unsorted so tests do not accidentally rely on dense ids.
    """
    elements = list(range(n))
    rng.shuffle(elements)
    k = min(rng.randint(1, max_comps if max_comps is not None else n), n)
    cuts = sorted(rng.sample(range(1, n), k - 1)) if k > 1 else []
    sizes = [b - a for a, b in zip([0] + cuts, cuts + [n])]
    cids = rng.sample(range(0, 10 * n + 10), len(sizes))
    comps = []
    at = 0
    for cid, s in zip(cids, sizes):
        comps.append(Component(cid, tuple(elements[at : at + s])))
        at += s
    return ComponentSet(comps)


def all_preserving(C: ComponentSet) -> list[Partition]:
    """Every C-preserving balanced partition, by exhaustive enumeration."""
    comps = sorted(C, key=lambda c: c.cid)
    half = C.n // 2
    out = []
    for bits in itertools.product((0, 1), repeat=len(comps)):
        if sum(c.size for c, b in zip(comps, bits) if b == 0) != half:
            continue
        sides = bytearray(C.n)
        for c, b in zip(comps, bits):
            for m in c.members:
                sides[m] = b
        out.append(Partition(sides))
    return out


def r_count_per_side(
    C: ComponentSet, p: Partition, g: Extended, q: int
) -> tuple[int, int]:
    """Number of ladder-sized components fully on each side of ``p``."""
    c0 = c1 = 0
    for c in C:
        if not in_ladder(c.size, g, q):
            continue
        side = p.side(c.members[0])
        if side == 0:
            c0 += 1
        else:
            c1 += 1
    return c0, c1


def all_balanced(
    C: ComponentSet, g: Extended, ell: int, q: int
) -> list[Partition]:
    """Every member of P^g_ell(C), by exhaustive enumeration."""
    out = []
    for p in all_preserving(C):
        c0, c1 = r_count_per_side(C, p, g, q)
        if c0 >= ell and c1 >= ell:
            out.append(p)
    return out


def min_dist_to(ps: list[Partition], p_prev: Partition) -> Optional[int]:
    return min((dist(p_prev, p) for p in ps), default=None)


def random_balanced_partition(rng: random.Random, n: int) -> Partition:
    elements = list(range(n))
    rng.shuffle(elements)
    sides = bytearray(n)
    for v in elements[n // 2 :]:
        sides[v] = 1
    return Partition(sides)


def random_preserving_partition(
    rng: random.Random, C: ComponentSet
) -> Optional[Partition]:
    """A random member of P(C), or None if empty (enumeration-based)."""
    ps = all_preserving(C)
    return rng.choice(ps) if ps else None
