"""Extended-gcd arithmetic, the size ladder, and the popularity estimator.

The estimator tracks a divisor ``g`` of the "popular" component sizes.
Its value lives in ``[q] ∪ {INFINITY}`` where ``INFINITY`` is the gcd of
the empty set: once no popular size is a multiple of ``g``, the estimator
jumps to infinity and stays there for the rest of the epoch.

Also provides :func:`nonneg_bezout`: an explicit certificate that the gcd
of two disjoint size sets can be written as a *nonnegative* combination
``sum r_i a_i = g + sum s_j b_j`` with all coefficients at most
``(1 + k + l) * H**2`` for ``H = max(A ∪ B)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Optional, Sequence, Union

INFINITY: float = math.inf

Extended = Union[int, float]  # positive int, or INFINITY


def is_finite(g: Extended) -> bool:
    return g != INFINITY


def _check_extended(g: Extended) -> None:
    if g == INFINITY:
        return
    if not isinstance(g, int) or g < 1:
        raise ValueError(f"expected a positive integer or INFINITY, got {g!r}")


def ext_gcd_set(values: Iterable[int]) -> Extended:
    """gcd of a set of positive integers; the empty set has gcd INFINITY."""
    vals = list(values)
    for v in vals:
        if not isinstance(v, int) or v < 1:
            raise ValueError(f"gcd over positive integers only, got {v!r}")
    if not vals:
        return INFINITY
    return math.gcd(*vals)


def ext_divides(a: Extended, b: Extended) -> bool:
    """Divisibility on positive integers extended with INFINITY.

    Every value divides INFINITY; INFINITY divides only itself.
    """
    _check_extended(a)
    _check_extended(b)
    if b == INFINITY:
        return True
    if a == INFINITY:
        return False
    return b % a == 0


def r_ladder(g: Extended, q: int) -> list[int]:
    """Multiples of ``g`` within ``1..q`` (empty for g = INFINITY or g > q)."""
    _check_extended(g)
    if q < 1:
        raise ValueError("q must be positive")
    if g == INFINITY:
        return []
    return list(range(g, q + 1, g))


def in_ladder(size: int, g: Extended, q: int) -> bool:
    """Whether ``size`` lies on the ladder of ``g``: size <= q and g | size."""
    _check_extended(g)
    if g == INFINITY or size > q or size < 1:
        return False
    return size % g == 0


def popular_sizes(size_counts: Mapping[int, int], q: int, w: int) -> list[int]:
    """Sizes in ``1..q`` occurring at least ``w`` times, ascending."""
    return [i for i in range(1, q + 1) if size_counts.get(i, 0) >= w]


def update_estimator(g: Extended, popular: Iterable[int], q: int) -> Extended:
    """Next estimator value: gcd of the popular sizes on the ladder of ``g``.

    Guarantees ``g | result`` and a (weakly) shrinking ladder; once
    INFINITY, stays INFINITY.
    """
    pop = set(popular)
    return ext_gcd_set(v for v in r_ladder(g, q) if v in pop)


def gcd_chain_ok(chain: Sequence[Extended]) -> bool:
    """True when consecutive values form a divisibility chain g0 | g1 | ..."""
    return all(ext_divides(a, b) for a, b in zip(chain, chain[1:]))


@dataclass(frozen=True)
class EstimatorState:
    """Current estimator value together with its size cap ``q``."""

    g: Extended
    q: int

    def __post_init__(self):
        _check_extended(self.g)
        if self.g != INFINITY and self.g > self.q:
            raise ValueError(f"estimator {self.g} outside 1..{self.q}")

    def ladder(self) -> list[int]:
        return r_ladder(self.g, self.q)

    def update(self, popular: Iterable[int]) -> "EstimatorState":
        return EstimatorState(update_estimator(self.g, popular, self.q), self.q)


# ---------------------------------------------------------------------------
# Nonnegative Bezout certificates
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BezoutCertificate:
    """Witness that ``sum r_i a_i = g + sum s_j b_j`` with small coefficients.

    ``a_coeffs`` maps each a-value to its r coefficient, ``b_coeffs`` each
    b-value to its s coefficient.  All coefficients are nonnegative and at
    most ``bound = (1 + k + l) * H**2``.
    """

    a_coeffs: Mapping[int, int]
    b_coeffs: Mapping[int, int]
    g: int
    bound: int

    def verify(self) -> bool:
        a_vals = list(self.a_coeffs)
        b_vals = list(self.b_coeffs)
        if not a_vals or not b_vals or set(a_vals) & set(b_vals):
            return False
        h = max(a_vals + b_vals)
        if self.bound != (1 + len(a_vals) + len(b_vals)) * h * h:
            return False
        if self.g != math.gcd(*a_vals, *b_vals):
            return False
        coeffs = list(self.a_coeffs.values()) + list(self.b_coeffs.values())
        if any(c < 0 or c > self.bound for c in coeffs):
            return False
        lhs = sum(r * a for a, r in self.a_coeffs.items())
        rhs = self.g + sum(s * b for b, s in self.b_coeffs.items())
        return lhs == rhs

    def as_dict(self) -> dict:
        return {
            "g": self.g,
            "bound": self.bound,
            "a_coeffs": {str(a): r for a, r in self.a_coeffs.items()},
            "b_coeffs": {str(b): s for b, s in self.b_coeffs.items()},
        }


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Returns (x, y, g) with x*a + y*b = g = gcd(a, b)."""
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        quot, rem = divmod(a, b)
        a, b = b, rem
        x0, x1 = x1, x0 - quot * x1
        y0, y1 = y1, y0 - quot * y1
    return x0, y0, a


def _fold_signed(values: Sequence[int]) -> list[int]:
    """Signed coefficients c with sum c_i v_i = gcd(values).

    Each fold step reduces the running coefficient to its symmetric
    residue, which keeps growth mild but does not by itself guarantee
    the |c| <= max(values) target.
    """
    g = values[0]
    coeffs = [1]
    for v in values[1:]:
        x, y, g2 = _xgcd(g, v)
        mod = v // g2
        if mod > 1:
            x_red = x % mod
            if 2 * x_red > mod:
                x_red -= mod
            y += ((x - x_red) // mod) * (g // g2)
            x = x_red
        coeffs = [c * x for c in coeffs]
        coeffs.append(y)
        g = g2
    return coeffs


def _sweep_reduce(values: Sequence[int], coeffs: list[int], cap: int) -> None:
    """Pairwise transfers pushing every |coefficient| toward <= cap.

    Moving t*(v_j/gcd_ij) out of c_i and t*(v_i/gcd_ij) into c_j keeps the
    combination invariant.  Bounded number of passes; may stall.
    """
    m = len(values)
    if m < 2:
        return
    for _ in range(32 * m):
        i = max(range(m), key=lambda k: abs(coeffs[k]))
        if abs(coeffs[i]) <= cap:
            return
        j = max((k for k in range(m) if k != i), key=lambda k: values[k])
        gij = math.gcd(values[i], values[j])
        step = values[j] // gij
        t = (coeffs[i] + step // 2) // step
        if t == 0:
            return
        coeffs[i] -= t * step
        coeffs[j] += t * (values[i] // gij)


def _centered(box: int) -> Iterator[int]:
    yield 0
    for k in range(1, box + 1):
        yield k
        yield -k


def _box_search(values: Sequence[int], g: int, box: int) -> Optional[list[int]]:
    """Exhaustive meet-in-the-middle search for sum c_i v_i = g, |c_i| <= box.

    Returns the lexicographically-canonical minimal-weight solution, or
    None when the box contains no solution.
    """
    mid = len(values) // 2

    def spans(vs: Sequence[int]) -> dict[int, tuple[int, ...]]:
        acc: dict[int, tuple[int, ...]] = {0: ()}
        for v in vs:
            nxt: dict[int, tuple[int, ...]] = {}
            for total, prefix in acc.items():
                for c in _centered(box):
                    key = total + c * v
                    if key not in nxt:
                        nxt[key] = prefix + (c,)
            acc = nxt
        return acc

    left = spans(values[:mid])
    right = spans(values[mid:])
    best = None
    for total, prefix in left.items():
        suffix = right.get(g - total)
        if suffix is None:
            continue
        cand = prefix + suffix
        key = (sum(map(abs, cand)), cand)
        if best is None or key < best:
            best = key
    return None if best is None else list(best[1])


def nonneg_bezout(
    a_values: Iterable[int], b_values: Iterable[int]
) -> BezoutCertificate:
    """Certificate for g = gcd(A ∪ B) as sum r a = g + sum s b, r, s >= 0.

    Strategy: find signed coefficients with |c| <= H (constructive fold
    plus reduction sweeps, exhaustive boxed search as fallback), then
    shift both sides by matching multiples of a1 and b1 to clear the
    signs.  The shift keeps every coefficient within (1+k+l)*H**2.
    """
    a_sorted = sorted(set(a_values), reverse=True)
    b_sorted = sorted(set(b_values), reverse=True)
    if not a_sorted or not b_sorted:
        raise ValueError("both value sets must be nonempty")
    if set(a_sorted) & set(b_sorted):
        raise ValueError("value sets must be disjoint")
    for v in a_sorted + b_sorted:
        if not isinstance(v, int) or v < 1:
            raise ValueError(f"values must be positive integers, got {v!r}")

    values = a_sorted + b_sorted
    k, ell = len(a_sorted), len(b_sorted)
    h = max(values)
    g = math.gcd(*values)

    coeffs = _fold_signed(values)
    _sweep_reduce(values, coeffs, h)
    if max(abs(c) for c in coeffs) > h:
        # Exhaustive fallback; a solution within |c| <= max(H/(2g), 1)
        # always exists, so the widened H box cannot come up empty.
        found = _box_search(values, g, max(h // (2 * g), 1))
        if found is None:
            found = _box_search(values, g, h)
        if found is None:
            raise ArithmeticError(
                f"no signed coefficients within |c| <= {h} for {values}"
            )
        coeffs = found

    r_tilde = coeffs[:k]
    s_tilde = [-c for c in coeffs[k:]]
    a1, b1 = a_sorted[0], b_sorted[0]
    ca = -(-h // a1)  # ceil(H / a1)
    cb = -(-h // b1)

    r = [rt + cb * b1 for rt in r_tilde]
    r[0] += ca * sum(b_sorted)
    s = [st + ca * a1 for st in s_tilde]
    s[0] += cb * sum(a_sorted)

    cert = BezoutCertificate(
        a_coeffs=dict(zip(a_sorted, r)),
        b_coeffs=dict(zip(b_sorted, s)),
        g=g,
        bound=(1 + k + ell) * h * h,
    )
    if not cert.verify():
        raise AssertionError(f"constructed certificate failed to verify: {cert}")
    return cert
