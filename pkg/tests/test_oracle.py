"""Tests for the partition oracles against exhaustive enumeration."""
from __future__ import annotations

import math
import random

import pytest

from bisectlab.core import Component, ComponentSet, Partition, dist
from bisectlab.kernels import available_backends, get_backend
from bisectlab.numbertheory import INFINITY
from bisectlab.partition_oracle import (
    best_balanced,
    closest_preserving,
    count_preserving,
    exists_balanced,
    exists_preserving,
    sample_uniform,
)
from genutil import (
    all_balanced,
    all_preserving,
    min_dist_to,
    r_count_per_side,
    random_balanced_partition,
    random_component_set,
)


@pytest.fixture(params=available_backends())
def backend(request):
    return get_backend(request.param)


# ---------------------------------------------------------------------------
# Existence
# ---------------------------------------------------------------------------


def test_exists_preserving_examples(backend):
    assert not exists_preserving(ComponentSet.from_sizes([3, 1]), backend)
    assert exists_preserving(ComponentSet.from_sizes([2, 1, 1]), backend)
    assert exists_preserving(ComponentSet.singletons(8), backend)


# ---------------------------------------------------------------------------
# Closest preserving
# ---------------------------------------------------------------------------


def test_closest_is_identity_when_structure_unchanged(backend):
    # components already match p_prev's clusters
    C = ComponentSet.from_sizes([2, 2])  # members 0,1 | 2,3
    p_prev = Partition([0, 0, 1, 1])
    res = closest_preserving(C, p_prev, backend)
    assert res == (p_prev, 0)


def test_closest_after_cross_merge(backend):
    # n=4 singletons a,b|c,d then merge {a,c}: either completion moves 2
    C = ComponentSet(
        [Component(9, (0, 2)), Component(1, (1,)), Component(3, (3,))]
    )
    p_prev = Partition([0, 0, 1, 1])
    p_star, moved = closest_preserving(C, p_prev, backend)
    assert moved == 2
    assert dist(p_prev, p_star) == 2


def test_closest_none_when_empty(backend):
    C = ComponentSet.from_sizes([3, 1])
    assert closest_preserving(C, Partition.default(4), backend) is None


# ---------------------------------------------------------------------------
# Balanced variants
# ---------------------------------------------------------------------------


def balanced_example_set() -> ComponentSet:
    return ComponentSet.from_sizes([1, 1, 1, 1, 2, 2])


def test_exists_balanced_examples(backend):
    C = balanced_example_set()
    assert exists_balanced(C, g=1, ell=2, q=2, backend=backend)
    assert not exists_balanced(C, g=1, ell=4, q=2, backend=backend)
    assert not exists_balanced(C, g=INFINITY, ell=1, q=2, backend=backend)


def test_exists_balanced_matches_enumeration_on_example(backend):
    C = balanced_example_set()
    for ell in range(0, 5):
        expected = bool(all_balanced(C, 1, ell, q=2))
        assert exists_balanced(C, 1, ell, 2, backend) == expected


def test_best_balanced_keeps_qualifying_previous_partition(backend):
    C = balanced_example_set()
    # four singletons (members 0..3) left, the two pairs right
    p_prev = Partition([0, 0, 0, 0, 1, 1, 1, 1])
    res = best_balanced(C, g=1, ell=2, q=2, p_prev=p_prev, backend=backend)
    assert res == (p_prev, 0)


def test_best_balanced_zero_threshold_reduces_to_closest(backend):
    rng = random.Random(5)
    for _ in range(25):
        n = rng.choice([4, 6, 8, 10])
        C = random_component_set(rng, n, max_comps=6)
        p_prev = random_balanced_partition(rng, n)
        a = best_balanced(C, 1, 0, n, p_prev, backend)
        b = closest_preserving(C, p_prev, backend)
        assert (a is None) == (b is None)
        if a is not None:
            assert a[1] == b[1]


def test_best_balanced_none_when_infeasible(backend):
    C = balanced_example_set()
    p_prev = Partition.default(8)
    assert best_balanced(C, 1, 4, 2, p_prev, backend) is None


# ---------------------------------------------------------------------------
# Counting and sampling
# ---------------------------------------------------------------------------


def test_count_examples(backend):
    assert count_preserving(ComponentSet.singletons(4), backend) == 6
    assert count_preserving(ComponentSet.from_sizes([2, 1, 1]), backend) == 2
    assert count_preserving(ComponentSet.from_sizes([3, 1]), backend) == 0


def test_count_singletons_is_central_binomial(backend):
    for n in (2, 4, 6, 8, 10, 12):
        assert count_preserving(ComponentSet.singletons(n), backend) == math.comb(
            n, n // 2
        )


def test_sampler_requires_feasible_set(backend):
    with pytest.raises(ValueError):
        sample_uniform(ComponentSet.from_sizes([3, 1]), random.Random(0), backend)


def test_sampler_is_deterministic_per_seed(backend):
    C = random_component_set(random.Random(3), 12, max_comps=8)
    p1 = sample_uniform(C, random.Random(42), backend)
    p2 = sample_uniform(C, random.Random(42), backend)
    p3 = sample_uniform(C, random.Random(43), backend)
    assert p1 == p2
    assert p3.n == 12  # different seed still a valid member
    assert p3 in all_preserving(C)


def test_sampler_support_is_exactly_preserving_set(backend):
    rng = random.Random(9)
    C = ComponentSet.from_sizes([2, 1, 1])
    seen = {sample_uniform(C, random.Random(i), backend) for i in range(64)}
    assert seen == set(all_preserving(C))
    C2 = random_component_set(rng, 8, max_comps=5)
    members = set(all_preserving(C2))
    if members:
        draws = {sample_uniform(C2, random.Random(i), backend) for i in range(200)}
        assert draws <= members


# ---------------------------------------------------------------------------
# Randomized equivalence with exhaustive enumeration
# ---------------------------------------------------------------------------


def test_oracles_match_enumeration(backend):
    rng = random.Random(2024)
    for trial in range(150):
        n = rng.choice([2, 4, 6, 8, 10, 12, 14, 16])
        C = random_component_set(rng, n, max_comps=min(12, n))
        members = all_preserving(C)
        ctx = f"trial {trial}: sizes {C.sizes()}"

        assert exists_preserving(C, backend) == bool(members), ctx
        assert count_preserving(C, backend) == len(members), ctx

        p_prev = random_balanced_partition(rng, n)
        res = closest_preserving(C, p_prev, backend)
        if not members:
            assert res is None, ctx
        else:
            p_star, moved = res
            assert p_star in members, ctx
            assert moved == dist(p_prev, p_star) == min_dist_to(members, p_prev), ctx

        g = rng.choice([1, 1, 2, 3, INFINITY])
        q = rng.randint(1, n)
        ell = rng.randint(0, 4)
        balanced = all_balanced(C, g, ell, q)
        assert exists_balanced(C, g, ell, q, backend) == bool(balanced), ctx
        bres = best_balanced(C, g, ell, q, p_prev, backend)
        if not balanced:
            assert bres is None, ctx
        else:
            bp, bmoved = bres
            c0, c1 = r_count_per_side(C, bp, g, q)
            assert c0 >= ell and c1 >= ell, ctx
            assert bp in members, ctx
            assert bmoved == dist(p_prev, bp) == min_dist_to(balanced, p_prev), ctx
