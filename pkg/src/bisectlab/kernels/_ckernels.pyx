# cython: language_level=3
# cython: boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled kernel implementations.

Semantics, tie-breaks and rng-draw protocol are defined by `_pykernels`
(the reference backend); this module must be observationally identical.
Differences are purely mechanical:

* bitsets are unsigned-64 word arrays instead of Python bigints;
* bounded-count min-cost layers use monotone-deque sliding-window minima,
  O(states) per type instead of O(states * count);
* the sampler's suffix counts are (mantissa, exponent) soft-floats; any
  side decision that falls within the numeric error margin raises
  DecisionAmbiguous, and the caller replays the pure path with the rng
  rewound, keeping sampled assignments backend-independent.
"""

from libc.stdlib cimport calloc, free, malloc
from libc.math cimport ldexp

BACKEND_NAME = "cython"

ctypedef unsigned long long u64
ctypedef long long i64


class DecisionAmbiguous(Exception):
    """A float-based side decision fell inside the error margin."""


cdef i64 INF = <i64>1 << 60
# Decision margin 2^-38: dominates the accumulated relative error of the
# soft-float tables (< n * 2^-53 for any practical n) by orders of magnitude.
cdef double MU = 2.0 ** -38

# Exact negative powers of two: multiplying by these equals ldexp(x, -i)
# for the alignment range used in _soft_add, without the libm call.
cdef double[65] _POW2N
for _i in range(65):
    _POW2N[_i] = 2.0 ** -_i


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------


cdef int* _as_int_array(object values, Py_ssize_t k) except NULL:
    cdef int* arr = <int*>malloc(k * sizeof(int) if k else sizeof(int))
    if arr == NULL:
        raise MemoryError()
    cdef Py_ssize_t i
    try:
        for i in range(k):
            arr[i] = values[i]
    except BaseException:
        free(arr)
        raise
    return arr


cdef void _self_or_shifted(u64* b, Py_ssize_t W, long shift) noexcept:
    """b |= b << shift over a W-word little-endian bitset (in place)."""
    cdef long wo = shift >> 6
    cdef int ro = <int>(shift & 63)
    cdef Py_ssize_t i
    if wo >= W:
        return
    if ro == 0:
        for i in range(W - 1, wo - 1, -1):
            b[i] |= b[i - wo]
    else:
        for i in range(W - 1, wo, -1):
            b[i] |= (b[i - wo] << ro) | (b[i - wo - 1] >> (64 - ro))
        b[wo] |= b[0] << ro


cdef void _or_shifted_row(u64* dst, u64* src, Py_ssize_t W, long shift) noexcept:
    """dst |= src << shift (distinct rows)."""
    cdef long wo = shift >> 6
    cdef int ro = <int>(shift & 63)
    cdef Py_ssize_t i
    if wo >= W:
        return
    if ro == 0:
        for i in range(W - 1, wo - 1, -1):
            dst[i] |= src[i - wo]
    else:
        for i in range(W - 1, wo, -1):
            dst[i] |= (src[i - wo] << ro) | (src[i - wo - 1] >> (64 - ro))
        dst[wo] |= src[0] << ro


cdef bint _any_bit_in_range(u64* row, long lo, long hi) noexcept:
    """Any set bit with index in [lo, hi]?"""
    cdef long wlo = lo >> 6, whi = hi >> 6
    cdef u64 mask
    cdef long w
    if wlo == whi:
        mask = ((<u64>0 - 1) >> (63 - (hi & 63))) & ((<u64>0 - 1) << (lo & 63))
        return (row[wlo] & mask) != 0
    mask = (<u64>0 - 1) << (lo & 63)
    if row[wlo] & mask:
        return True
    for w in range(wlo + 1, whi):
        if row[w]:
            return True
    mask = (<u64>0 - 1) >> (63 - (hi & 63))
    return (row[whi] & mask) != 0


# ---------------------------------------------------------------------------
# feasibility
# ---------------------------------------------------------------------------


def feasible_mass(sizes, counts, target):
    """Can some sub-multiset of components reach exactly ``target`` mass?"""
    cdef long tgt = target
    if tgt < 0:
        return False
    cdef Py_ssize_t t = len(sizes)
    cdef i64 total = 0
    cdef Py_ssize_t i
    cdef long s, k, take, step
    for i in range(t):
        s = sizes[i]
        if s <= 0:
            raise ValueError("sizes must be positive")
        total += <i64>s * <i64>(counts[i])
    if tgt > total:
        return False
    cdef Py_ssize_t W = (tgt >> 6) + 1
    cdef u64* bits = <u64*>calloc(W, sizeof(u64))
    if bits == NULL:
        raise MemoryError()
    bits[0] = 1
    try:
        for i in range(t):
            s = sizes[i]
            k = counts[i]
            if k > tgt // s:
                k = tgt // s
            step = 1
            while k > 0:
                take = step if step < k else k
                _self_or_shifted(bits, W, take * s)
                k -= take
                step <<= 1
        return (bits[tgt >> 6] >> (tgt & 63)) & 1 == 1
    finally:
        free(bits)


# ---------------------------------------------------------------------------
# min-cost assignment (1D bounded knapsack with sliding-window minima)
# ---------------------------------------------------------------------------


cdef void _min_layer_step(
    i64* prev, i64* cur, long target, long s, long kappa, long k,
    i64* win_val, long* win_idx,
) noexcept:
    """cur[m] = min_{0<=j<=min(k, m//s)} prev[m - j*s] + j*kappa.

    Deque arrays are scratch of length >= target // s + 2.  Values are
    offset by -jbar*kappa so the window minimum is order-preserving.
    """
    cdef long rho, m, jbar, head, tail, limit
    cdef i64 a
    for rho in range(s if s <= target else target + 1):
        head = 0
        tail = 0  # deque in win_idx[head:tail], values win_val aligned
        jbar = 0
        m = rho
        while m <= target:
            a = prev[m] - <i64>jbar * kappa
            while tail > head and win_val[tail - 1] >= a:
                tail -= 1
            win_val[tail] = a
            win_idx[tail] = jbar
            tail += 1
            limit = jbar - k
            while win_idx[head] < limit:
                head += 1
            cur[m] = win_val[head] + <i64>jbar * kappa
            jbar += 1
            m += s
    # masses smaller than any same-residue reachable step: copy-through
    # handled naturally since jbar window always includes j=0 (prev[m]).


def min_move_assignment(sizes, costs, counts, target):
    """Cheapest picks with cluster-0 mass exactly ``target``.

    Returns ``(total_cost, picks)`` or None; canonical backtrack takes the
    smallest pick per type, walking types last to first.
    """
    cdef long tgt = target
    if tgt < 0:
        return None
    cdef Py_ssize_t t = len(sizes)
    cdef int* szs = _as_int_array(sizes, t)
    cdef int* kps = NULL
    cdef int* cnt = NULL
    cdef i64* layers = NULL
    cdef i64* win_val = NULL
    cdef long* win_idx = NULL
    cdef Py_ssize_t i, row
    cdef long m, s, kappa, k, j, jmax, want_m
    cdef i64 want
    try:
        kps = _as_int_array(costs, t)
        cnt = _as_int_array(counts, t)
        layers = <i64*>malloc((t + 1) * (tgt + 1) * sizeof(i64))
        win_val = <i64*>malloc((tgt + 2) * sizeof(i64))
        win_idx = <long*>malloc((tgt + 2) * sizeof(long))
        if layers == NULL or win_val == NULL or win_idx == NULL:
            raise MemoryError()
        layers[0] = 0
        for m in range(1, tgt + 1):
            layers[m] = INF
        for i in range(t):
            s = szs[i]
            if s <= 0:
                raise ValueError("sizes must be positive")
            _min_layer_step(
                layers + i * (tgt + 1), layers + (i + 1) * (tgt + 1),
                tgt, s, kps[i], cnt[i], win_val, win_idx,
            )
        if layers[t * (tgt + 1) + tgt] >= INF:
            return None
        picks = [0] * t
        m = tgt
        for i in range(t - 1, -1, -1):
            s = szs[i]
            kappa = kps[i]
            k = cnt[i]
            want = layers[(i + 1) * (tgt + 1) + m]
            jmax = m // s
            if k < jmax:
                jmax = k
            for j in range(jmax + 1):
                if layers[i * (tgt + 1) + m - j * s] + <i64>j * kappa == want:
                    picks[i] = j
                    m -= j * s
                    break
            else:
                raise AssertionError("backtrack failed")
        return int(layers[t * (tgt + 1) + tgt]), picks
    finally:
        free(szs)
        free(kps)
        free(cnt)
        free(layers)
        free(win_val)
        free(win_idx)


# ---------------------------------------------------------------------------
# balance-constrained variants
# ---------------------------------------------------------------------------


def balanced_feasible(sizes, counts, is_r, target, lo, hi):
    """Assignment with mass ``target`` and cluster-0 ladder count in
    [lo, hi]?  Mirrors the two-phase reference: exact (mass, count) bitset
    rows over ladder types, count window at the boundary, then plain
    subset-sum over the rest."""
    cdef long tgt = target, clo = lo, chi = hi
    if tgt < 0 or clo > chi:
        return False
    cdef Py_ssize_t t = len(sizes)
    cdef Py_ssize_t i
    cdef long tot_r = 0, r_mass = 0
    for i in range(t):
        if is_r[i]:
            tot_r += counts[i]
            r_mass += sizes[i] * counts[i]
    if clo < 0:
        clo = 0
    if chi > tot_r:
        chi = tot_r
    if clo > chi:
        return False
    cdef long rcap = tgt if tgt < r_mass else r_mass
    cdef Py_ssize_t Wc = (tot_r >> 6) + 1
    cdef Py_ssize_t Wm = (tgt >> 6) + 1
    cdef u64* rows = <u64*>calloc((rcap + 1) * Wc, sizeof(u64))
    cdef u64* bits = NULL
    if rows == NULL:
        raise MemoryError()
    cdef long s, k, take, step, m, cm, cj
    cdef bint ok
    try:
        rows[0] = 1
        for i in range(t):
            if not is_r[i]:
                continue
            s = sizes[i]
            if s <= 0:
                raise ValueError("sizes must be positive")
            k = counts[i]
            if s > rcap:
                k = 0
            elif k > rcap // s:
                k = rcap // s
            step = 1
            while k > 0:
                take = step if step < k else k
                cm = take * s
                cj = take
                for m in range(rcap, cm - 1, -1):
                    _or_shifted_row(rows + m * Wc, rows + (m - cm) * Wc, Wc, cj)
                k -= take
                step <<= 1
        bits = <u64*>calloc(Wm, sizeof(u64))
        if bits == NULL:
            raise MemoryError()
        ok = False
        for m in range(rcap + 1):
            if _any_bit_in_range(rows + m * Wc, clo, chi):
                bits[m >> 6] |= <u64>1 << (m & 63)
                ok = True
        if not ok:
            return False
        for i in range(t):
            if is_r[i]:
                continue
            s = sizes[i]
            if s <= 0:
                raise ValueError("sizes must be positive")
            k = counts[i]
            if s > tgt:
                k = 0
            elif k > tgt // s:
                k = tgt // s
            step = 1
            while k > 0:
                take = step if step < k else k
                _self_or_shifted(bits, Wm, take * s)
                k -= take
                step <<= 1
        return (bits[tgt >> 6] >> (tgt & 63)) & 1 == 1
    finally:
        free(rows)
        free(bits)


cdef void _balanced_layer_step(
    i64* prev, i64* cur, long target, long ccap,
    long s, long kappa, long k, i64* win_val, long* win_idx,
) noexcept:
    """cur[m][c] = min_{0<=j<=min(k, m//s, c)} prev[m-j*s][c-j] + j*kappa.

    Runs a sliding-window minimum along each (m - s, c - 1) diagonal.
    Rows are (ccap+1) wide, flattened m-major.
    """
    cdef long stride = ccap + 1
    cdef long m0, c0, m, c, step_i, head, tail, limit
    cdef i64 a
    # diagonal starts: c == 0 (any m), or m < s (any c >= 1)
    for m0 in range(target + 1):
        for c0 in range(ccap + 1):
            if not (c0 == 0 or m0 < s):
                continue
            head = 0
            tail = 0
            step_i = 0
            m = m0
            c = c0
            while m <= target and c <= ccap:
                a = prev[m * stride + c] - <i64>step_i * kappa
                while tail > head and win_val[tail - 1] >= a:
                    tail -= 1
                win_val[tail] = a
                win_idx[tail] = step_i
                tail += 1
                limit = step_i - k
                while win_idx[head] < limit:
                    head += 1
                cur[m * stride + c] = win_val[head] + <i64>step_i * kappa
                step_i += 1
                m += s
                c += 1


def balanced_min_move(sizes, costs, counts, is_r, target, lo, hi):
    """Cheapest assignment with mass ``target`` and cluster-0 ladder count
    in [lo, hi]; picks returned in the caller's type order."""
    cdef long tgt = target, clo = lo, chi = hi
    if tgt < 0 or clo > chi:
        return None
    cdef Py_ssize_t t = len(sizes)
    order = [i for i in range(t) if is_r[i]] + [i for i in range(t) if not is_r[i]]
    cdef Py_ssize_t n_r = 0
    cdef long tot_r = 0
    cdef Py_ssize_t i
    for i in range(t):
        if is_r[i]:
            n_r += 1
            tot_r += counts[i]
    if clo < 0:
        clo = 0
    if chi > tot_r:
        chi = tot_r
    if clo > chi:
        return None
    # Count dimension: c cluster-0 ladder components need mass >= c, so
    # states with c > target are unreachable and can be dropped outright.
    cdef long ccap = tot_r if tot_r < tgt else tgt
    if clo > ccap:
        return None
    if chi > ccap:
        chi = ccap
    cdef long stride = ccap + 1
    cdef Py_ssize_t rcells = (tgt + 1) * stride
    cdef int* szs = _as_int_array(sizes, t)
    cdef int* kps = NULL
    cdef int* cnt = NULL
    cdef i64* r_layers = NULL
    cdef i64* f1 = NULL
    cdef long* c_star = NULL
    cdef i64* nr_layers = NULL
    cdef i64* win_val = NULL
    cdef long* win_idx = NULL
    cdef long m, c, s, kappa, k, j, jmax, pos, wmax
    cdef i64 best, v, want, total
    cdef Py_ssize_t idx
    try:
        kps = _as_int_array(costs, t)
        cnt = _as_int_array(counts, t)
        for i in range(t):
            if szs[i] <= 0:
                raise ValueError("sizes must be positive")
        r_layers = <i64*>malloc((n_r + 1) * rcells * sizeof(i64))
        f1 = <i64*>malloc((tgt + 1) * sizeof(i64))
        c_star = <long*>malloc((tgt + 1) * sizeof(long))
        nr_layers = <i64*>malloc((t - n_r + 1) * (tgt + 1) * sizeof(i64))
        wmax = tgt + tot_r + 2
        win_val = <i64*>malloc(wmax * sizeof(i64))
        win_idx = <long*>malloc(wmax * sizeof(long))
        if (r_layers == NULL or f1 == NULL or c_star == NULL
                or nr_layers == NULL or win_val == NULL or win_idx == NULL):
            raise MemoryError()

        # phase 1: ladder types, exact (mass, count) state
        for idx in range(rcells):
            r_layers[idx] = INF
        r_layers[0] = 0
        for pos in range(n_r):
            i = order[pos]
            _balanced_layer_step(
                r_layers + pos * rcells, r_layers + (pos + 1) * rcells,
                tgt, ccap, szs[i], kps[i], cnt[i], win_val, win_idx,
            )

        # boundary: count window, collapse count dimension
        for m in range(tgt + 1):
            best = INF
            c_star[m] = -1
            for c in range(clo, chi + 1):
                v = r_layers[n_r * rcells + m * stride + c]
                if v < best:
                    best = v
                    c_star[m] = c
            f1[m] = best

        # phase 2: non-ladder types, 1D
        for m in range(tgt + 1):
            nr_layers[m] = f1[m]
        for pos in range(n_r, t):
            i = order[pos]
            _min_layer_step(
                nr_layers + (pos - n_r) * (tgt + 1),
                nr_layers + (pos - n_r + 1) * (tgt + 1),
                tgt, szs[i], kps[i], cnt[i], win_val, win_idx,
            )
        total = nr_layers[(t - n_r) * (tgt + 1) + tgt]
        if total >= INF:
            return None

        picks = [0] * t
        m = tgt
        for pos in range(t - 1, n_r - 1, -1):
            i = order[pos]
            s = szs[i]
            kappa = kps[i]
            k = cnt[i]
            want = nr_layers[(pos - n_r + 1) * (tgt + 1) + m]
            jmax = m // s
            if k < jmax:
                jmax = k
            for j in range(jmax + 1):
                v = nr_layers[(pos - n_r) * (tgt + 1) + m - j * s]
                if v + <i64>j * kappa == want:
                    picks[i] = j
                    m -= j * s
                    break
            else:
                raise AssertionError("backtrack failed (non-ladder)")
        c = c_star[m]
        if c < 0:
            raise AssertionError("backtrack failed (boundary)")
        for pos in range(n_r - 1, -1, -1):
            i = order[pos]
            s = szs[i]
            kappa = kps[i]
            k = cnt[i]
            want = r_layers[(pos + 1) * rcells + m * stride + c]
            jmax = m // s
            if k < jmax:
                jmax = k
            if c < jmax:
                jmax = c
            for j in range(jmax + 1):
                v = r_layers[pos * rcells + (m - j * s) * stride + (c - j)]
                if v + <i64>j * kappa == want:
                    picks[i] = j
                    m -= j * s
                    c -= j
                    break
            else:
                raise AssertionError("backtrack failed (ladder)")
        return int(total), picks
    finally:
        free(szs)
        free(kps)
        free(cnt)
        free(r_layers)
        free(f1)
        free(c_star)
        free(nr_layers)
        free(win_val)
        free(win_idx)


# ---------------------------------------------------------------------------
# sampling (soft-float suffix counts; escalate on ambiguity)
# ---------------------------------------------------------------------------


cdef inline void _soft_add(
    double fa, int ea, double fb, int eb, double* fo, int* eo
) noexcept:
    """(fa, ea) + (fb, eb) -> (fo, eo); mantissas in [0.5, 1) or exactly 0.

    Nonnegative inputs only, so zero-ness is exact: a sum is 0.0 iff both
    addends are.
    """
    cdef double f
    cdef int e, diff
    if fa == 0.0:
        fo[0] = fb
        eo[0] = eb
        return
    if fb == 0.0:
        fo[0] = fa
        eo[0] = ea
        return
    if ea < eb:
        f = fa
        fa = fb
        fb = f
        e = ea
        ea = eb
        eb = e
    diff = ea - eb
    if diff > 64:
        fo[0] = fa
        eo[0] = ea
        return
    f = fa + fb * _POW2N[diff]
    e = ea
    if f >= 1.0:
        f *= 0.5
        e += 1
    fo[0] = f
    eo[0] = e


def sample_assignment_fast(comp_sizes, target, rng):
    """Uniform assignment with cluster-0 mass exactly ``target``.

    Identical draw protocol to the reference sampler: one 64-bit draw per
    unforced component.  Raises DecisionAmbiguous whenever a comparison
    falls within MU of the decision boundary (the wrapper then rewinds the
    rng and replays the exact path).
    """
    cdef long tgt = target
    cdef Py_ssize_t k = len(comp_sizes)
    if tgt < 0:
        return None
    if k == 0:
        return [] if tgt == 0 else None
    cdef int* szs = _as_int_array(comp_sizes, k)
    cdef Py_ssize_t width = tgt + 1
    cdef double* man = NULL
    cdef int* ex = NULL
    cdef long* caps = NULL
    cdef long* los = NULL
    cdef Py_ssize_t i
    cdef long s, m, cap, lo, prefix, r
    cdef double f0, f1v, fs, phat, ulo, uhi
    cdef int e0, e1, es
    cdef u64 u
    cdef int side
    try:
        for i in range(k):
            if szs[i] <= 0:
                raise ValueError("sizes must be positive")
        man = <double*>calloc((k + 1) * width, sizeof(double))
        ex = <int*>calloc((k + 1) * width, sizeof(int))
        caps = <long*>malloc((k + 1) * sizeof(long))
        los = <long*>malloc((k + 1) * sizeof(long))
        if man == NULL or ex == NULL or caps == NULL or los == NULL:
            raise MemoryError()
        # Row i is only ever read at masses in [tgt - prefix_mass_i,
        # suffix_mass_i] (clamped to [0, tgt]): the walk has consumed at
        # most the prefix mass when it reaches row i.  Cells outside stay
        # zero, matching their true counts.
        prefix = 0
        for i in range(k + 1):
            lo = tgt - prefix
            los[i] = lo if lo > 0 else 0
            if i < k:
                prefix += szs[i]
        if los[k] == 0:
            man[k * width] = 0.5
            ex[k * width] = 1  # exact 1 = 0.5 * 2^1
        caps[k] = 0
        for i in range(k - 1, -1, -1):
            s = szs[i]
            cap = caps[i + 1] + s
            if cap > tgt:
                cap = tgt
            caps[i] = cap
            for m in range(los[i], cap + 1):
                f0 = man[(i + 1) * width + m]
                e0 = ex[(i + 1) * width + m]
                if m >= s:
                    _soft_add(
                        f0, e0,
                        man[(i + 1) * width + m - s], ex[(i + 1) * width + m - s],
                        &f0, &e0,
                    )
                man[i * width + m] = f0
                ex[i * width + m] = e0
        if man[0 * width + tgt] == 0.0:
            return None
        sides = [0] * k
        r = tgt
        for i in range(k):
            s = szs[i]
            if r - s >= 0:
                f0 = man[(i + 1) * width + r - s]
                e0 = ex[(i + 1) * width + r - s]
            else:
                f0 = 0.0
                e0 = 0
            f1v = man[(i + 1) * width + r]
            e1 = ex[(i + 1) * width + r]
            if f0 == 0.0 and f1v == 0.0:
                raise AssertionError("sampling walk hit a dead state")
            if f0 == 0.0:
                side = 1
            elif f1v == 0.0:
                side = 0
            else:
                _soft_add(f0, e0, f1v, e1, &fs, &es)
                phat = ldexp(f0 / fs, e0 - es)
                u = rng.getrandbits(64)
                ulo = ldexp(<double>u, -64)
                uhi = ldexp((<double>u) + 1.0, -64)
                if uhi <= phat - MU:
                    side = 0
                elif ulo >= phat + MU:
                    side = 1
                else:
                    raise DecisionAmbiguous()
            sides[i] = side
            if side == 0:
                r -= s
        return sides
    finally:
        free(szs)
        free(man)
        free(ex)
        free(caps)
        free(los)
