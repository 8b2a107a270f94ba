"""Tests for extended-gcd arithmetic, the estimator, and Bezout certificates."""
from __future__ import annotations

import itertools
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bisectlab.numbertheory import (
    INFINITY,
    BezoutCertificate,
    EstimatorState,
    ext_divides,
    ext_gcd_set,
    gcd_chain_ok,
    is_finite,
    nonneg_bezout,
    popular_sizes,
    r_ladder,
    update_estimator,
)
from bruteforce import bf_bezout_search


# ---------------------------------------------------------------------------
# Extended gcd / divisibility
# ---------------------------------------------------------------------------


def test_gcd_of_empty_set_is_infinite():
    assert ext_gcd_set([]) == INFINITY
    assert not is_finite(ext_gcd_set([]))


def test_gcd_of_values():
    assert ext_gcd_set([4, 6]) == 2
    assert ext_gcd_set([5]) == 5
    assert ext_gcd_set([3, 5]) == 1


def test_gcd_rejects_nonpositive():
    with pytest.raises(ValueError):
        ext_gcd_set([0, 4])
    with pytest.raises(ValueError):
        ext_gcd_set([-2])


def test_divisibility_with_infinity():
    assert ext_divides(3, 9)
    assert not ext_divides(9, 3)
    assert ext_divides(7, INFINITY)
    assert ext_divides(INFINITY, INFINITY)
    assert not ext_divides(INFINITY, 7)


def test_r_ladder():
    assert r_ladder(1, 4) == [1, 2, 3, 4]
    assert r_ladder(2, 9) == [2, 4, 6, 8]
    assert r_ladder(5, 4) == []
    assert r_ladder(INFINITY, 100) == []


@given(st.integers(1, 30), st.integers(1, 100))
def test_ladder_gcd_roundtrip(g, q):
    """gcd of the ladder of g recovers g (or INF when the ladder is empty)."""
    ladder = r_ladder(g, q)
    if g <= q:
        assert ext_gcd_set(ladder) == g
    else:
        assert ladder == [] and ext_gcd_set(ladder) == INFINITY


# ---------------------------------------------------------------------------
# Estimator
# ---------------------------------------------------------------------------


def test_popular_sizes_threshold():
    counts = {1: 10, 2: 3, 3: 7, 9: 50}
    assert popular_sizes(counts, q=3, w=5) == [1, 3]
    assert popular_sizes(counts, q=3, w=100) == []


def test_update_estimator_examples():
    assert update_estimator(1, {2, 4}, q=4) == 2
    assert update_estimator(2, {3}, q=4) == INFINITY
    assert update_estimator(INFINITY, {1, 2, 3}, q=4) == INFINITY


@settings(max_examples=300)
@given(
    st.integers(2, 16),
    st.lists(st.sets(st.integers(1, 16)), min_size=1, max_size=8),
)
def test_estimator_chain_is_divisibility_chain(q, popular_seq):
    """Iterated updates give g0 | g1 | ... with nested shrinking ladders."""
    g = 1
    chain = [g]
    ladders = [set(r_ladder(g, q))]
    for pop in popular_seq:
        g = update_estimator(g, pop, q)
        chain.append(g)
        ladders.append(set(r_ladder(g, q)))
        assert g == INFINITY or 1 <= g <= q
    assert gcd_chain_ok(chain)
    for big, small in zip(ladders, ladders[1:]):
        assert small <= big
    # value changes are few: at most 1 + log2(q)
    changes = sum(a != b for a, b in zip(chain, chain[1:]))
    assert changes <= 1 + math.log2(q)


def test_estimator_state_wrapper():
    s = EstimatorState(1, q=4)
    s = s.update({2, 4})
    assert s.g == 2 and s.ladder() == [2, 4]
    with pytest.raises(ValueError):
        EstimatorState(9, q=4)


# ---------------------------------------------------------------------------
# Nonnegative Bezout certificates
# ---------------------------------------------------------------------------


def test_bezout_single_pair_example():
    cert = nonneg_bezout([4], [6])
    assert cert.g == 2
    assert cert.bound == 3 * 36
    assert cert.verify()
    # brute force finds the minimal certificate for the same instance
    assert bf_bezout_search([4], [6], cert.bound) == ([2], [1])


def test_bezout_input_validation():
    with pytest.raises(ValueError):
        nonneg_bezout([], [3])
    with pytest.raises(ValueError):
        nonneg_bezout([3], [])
    with pytest.raises(ValueError):
        nonneg_bezout([2, 3], [3, 5])  # overlapping
    with pytest.raises(ValueError):
        nonneg_bezout([0], [3])


def test_certificate_verify_rejects_tampering():
    cert = nonneg_bezout([4], [6])
    broken = BezoutCertificate(
        a_coeffs={4: cert.a_coeffs[4] + 1},
        b_coeffs=dict(cert.b_coeffs),
        g=cert.g,
        bound=cert.bound,
    )
    assert not broken.verify()


def test_bezout_exhaustive_small_universe():
    """Every disjoint nonempty A, B within 1..8, |A|+|B| <= 4, has a
    verifying certificate matched by brute-force search."""
    universe = range(1, 9)
    for asz in range(1, 4):
        for bsz in range(1, 5 - asz):
            for a_vals in itertools.combinations(universe, asz):
                rest = [v for v in universe if v not in a_vals]
                for b_vals in itertools.combinations(rest, bsz):
                    cert = nonneg_bezout(a_vals, b_vals)
                    assert cert.verify(), (a_vals, b_vals)
                    found = bf_bezout_search(
                        sorted(a_vals, reverse=True),
                        sorted(b_vals, reverse=True),
                        cert.bound,
                    )
                    assert found is not None, (a_vals, b_vals)


@settings(max_examples=250, deadline=None)
@given(st.data())
def test_bezout_random_sets_verify(data):
    m = data.draw(st.integers(2, 6))
    vals = data.draw(
        st.lists(st.integers(1, 60), min_size=m, max_size=m, unique=True)
    )
    split = data.draw(st.integers(1, m - 1))
    cert = nonneg_bezout(vals[:split], vals[split:])
    assert cert.verify()
    assert cert.g == math.gcd(*vals)
