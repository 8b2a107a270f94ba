"""Tests for partitions, distance, and the component tracker."""
from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bisectlab.core import (
    ComponentSet,
    ComponentTracker,
    Partition,
    dist,
    ingest_request,
)


def balanced_partitions(n: int):
    """Hypothesis strategy for a random balanced partition of 0..n-1."""
    return st.permutations(list(range(n))).map(
        lambda perm: Partition(
            [0 if perm.index(v) < n // 2 else 1 for v in range(n)]
        )
    )


# ---------------------------------------------------------------------------
# Partition
# ---------------------------------------------------------------------------


def test_default_partition_splits_halves():
    p = Partition.default(8)
    assert p.n == 8
    assert p.cluster(0) == (0, 1, 2, 3)
    assert p.cluster(1) == (4, 5, 6, 7)


@pytest.mark.parametrize(
    "sides",
    [
        [0, 0, 1],          # odd n
        [0, 0, 0, 1],       # unbalanced
        [0, 2, 1, 1],       # bad label
        [],                 # empty
    ],
)
def test_partition_rejects_invalid(sides):
    with pytest.raises(ValueError):
        Partition(sides)


def test_partition_is_immutable_and_hashable():
    p = Partition.default(4)
    with pytest.raises(AttributeError):
        p.n = 6  # type: ignore[misc]
    assert len({p, Partition([0, 0, 1, 1]), Partition([1, 1, 0, 0])}) == 2


# ---------------------------------------------------------------------------
# dist
# ---------------------------------------------------------------------------


def test_dist_identity_is_zero():
    p = Partition.default(10)
    assert dist(p, p) == 0


def test_dist_single_swap_moves_two():
    # (a,b | c,d) vs (a,c | b,d)
    p = Partition([0, 0, 1, 1])
    p2 = Partition([0, 1, 0, 1])
    assert dist(p, p2) == 2


def test_dist_full_exchange():
    p = Partition([0, 0, 0, 1, 1, 1])
    p2 = Partition([1, 1, 1, 0, 0, 0])
    assert dist(p, p2) == 6


def test_dist_rejects_mismatched_universes():
    with pytest.raises(ValueError):
        dist(Partition.default(4), Partition.default(6))


@settings(max_examples=200)
@given(st.integers(2, 5).flatmap(lambda h: st.tuples(
    balanced_partitions(2 * h), balanced_partitions(2 * h),
    balanced_partitions(2 * h))))
def test_dist_metric_properties(ps):
    """Symmetry, evenness, and the triangle inequality."""
    p, q, r = ps
    assert dist(p, q) == dist(q, p)
    assert dist(p, q) % 2 == 0
    assert dist(p, r) <= dist(p, q) + dist(q, r)


# ---------------------------------------------------------------------------
# ComponentTracker
# ---------------------------------------------------------------------------


def test_tracker_starts_with_singletons():
    tr = ComponentTracker(6)
    assert tr.component_count == 6
    assert dict(tr.size_counts()) == {1: 6}
    assert all(tr.component_of(v) == v for v in range(6))


def test_merge_event_fields_and_size_conservation():
    tr = ComponentTracker(6)
    ev = tr.ingest(0, 3)
    assert ev is not None
    assert {ev.a, ev.b} == {0, 3}
    assert ev.size == ev.size_a + ev.size_b == 2
    assert ev.step == 1
    # repeated intra-component requests produce no event
    assert tr.ingest(0, 3) is None
    assert tr.ingest(3, 0) is None
    ev2 = tr.ingest(3, 4)
    assert ev2 is not None and ev2.size == 3 and ev2.step == 4
    cs = tr.component_set()
    assert cs.n == 6
    assert sum(c.size for c in cs) == 6
    assert cs.sizes() == [3, 1, 1, 1]


def test_ingest_rejects_self_request():
    tr = ComponentTracker(4)
    with pytest.raises(ValueError):
        tr.ingest(2, 2)


def test_reset_epoch_restores_singletons_and_is_idempotent():
    tr = ComponentTracker(4)
    tr.ingest(0, 1)
    tr.ingest(2, 3)
    tr.reset_epoch()
    assert dict(tr.size_counts()) == {1: 4}
    before = tr.component_set().ids()
    tr.reset_epoch()
    assert tr.component_set().ids() == before == [0, 1, 2, 3]


def test_merged_ids_are_fresh_across_epochs():
    tr = ComponentTracker(4)
    ev1 = tr.ingest(0, 1)
    tr.reset_epoch()
    ev2 = tr.ingest(0, 1)
    assert ev1.merged != ev2.merged


def test_ingest_request_service_costs():
    tr = ComponentTracker(4)
    p = Partition([0, 0, 1, 1])
    # different components, same side
    cost, ev = ingest_request(tr, 0, 1, p)
    assert (cost, ev.crossed) == (0, False)
    # different components, different sides
    cost, ev = ingest_request(tr, 2, 0, p)
    assert (cost, ev.crossed) == (1, True)
    # same component now; intra-component requests cost nothing here
    cost, ev = ingest_request(tr, 1, 2, p)
    assert cost == 1 and ev is None  # 1,2 straddle p but share a component
    cost, ev = ingest_request(tr, 0, 1, p)
    assert (cost, ev) == (0, None)


def test_post_reset_crossing_merge_of_singletons():
    tr = ComponentTracker(4)
    tr.ingest(0, 1)
    tr.reset_epoch()
    cost, ev = ingest_request(tr, 0, 2, Partition([0, 0, 1, 1]))
    assert cost == 1
    assert ev is not None and ev.size_a == ev.size_b == 1


def test_merges_per_epoch_bounded_by_n_minus_one():
    rng = random.Random(0)
    n = 10
    tr = ComponentTracker(n)
    merges = 0
    for _ in range(300):
        u = rng.randrange(n)
        v = rng.randrange(n)
        if u == v:
            continue
        if tr.ingest(u, v) is not None:
            merges += 1
        if tr.component_count == 1:
            assert merges <= n - 1
            tr.reset_epoch()
            merges = 0
    assert merges <= n - 1


def test_component_set_from_sizes_and_counts():
    cs = ComponentSet.from_sizes([3, 2, 1])
    assert cs.n == 6
    assert cs.size_counts() == {3: 1, 2: 1, 1: 1}
    assert cs[0].members == (0, 1, 2)
    assert ComponentSet.singletons(4).sizes() == [1, 1, 1, 1]
