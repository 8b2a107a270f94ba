#!/usr/bin/env python3
"""Compare the pure-Python and compiled kernel backends.

Times the raw kernel entry points on a representative mid-epoch size
multiset, then whole runs of the two moving strategies, and checks along
the way that both backends return identical answers (costs, samples,
partitions) for the same seed.  The compiled backend is optional; without
it the script reports the pure timings only.

Usage: python3 scripts/bench_backends.py [--n 256] [--T 1280] [--seed 0]
       [--repeat 3]
"""
from __future__ import annotations

import argparse
import random
import sys
import time

from bisectlab.algorithms import CbBaseline, IcbAlgorithm, IcbParameters
from bisectlab.harness import gen_uniform, run
from bisectlab.kernels import get_backend


def bench_params(n: int) -> IcbParameters:
    """A parameter tuple that keeps the side conditions valid when n
    allows it (q=2, d=n/8, w=d/8), falling back to the formula defaults."""
    params = IcbParameters(n=n, q=2, w=max(1, n // 32), d=max(2, n // 8))
    return params if params.valid else IcbParameters.defaults(n)


def timed(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def workload(n: int) -> tuple:
    """Mid-epoch-looking multiset: a few larger components, many singletons."""
    counts = {4: n // 16, 3: n // 12, 2: n // 8}
    mass = sum(s * c for s, c in counts.items())
    counts[1] = n - mass
    sizes = sorted(counts)
    return sizes, [counts[s] for s in sizes]


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=256)
    ap.add_argument("--T", type=int, default=0,
                    help="requests per end-to-end run (default 5n)")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    n, seed, repeat = args.n, args.seed, args.repeat
    T = args.T or 5 * n

    pure = get_backend("python")
    try:
        fast = get_backend("cython")
    except ValueError:
        fast = None
        print("compiled backend not built; timing the pure backend only\n")
    backends = [pure] + ([fast] if fast else [])

    sizes, counts = workload(n)
    comp_sizes = [s for s, c in zip(sizes, counts) for _ in range(c)]
    rows = []

    def row(label, runs):
        times = {}
        results = []
        for b in backends:
            out, dt = runs(b)
            times[b.name] = dt
            results.append(out)
        assert all(r == results[0] for r in results[1:]), (
            f"{label}: backends disagree"
        )
        rows.append((label, times))

    row("feasible_mass x200", lambda b: (
        b.feasible_mass(sizes, counts, n // 2),
        timed(lambda: [b.feasible_mass(sizes, counts, n // 2)
                       for _ in range(200)], repeat),
    ))
    row("count_assignments x20", lambda b: (
        b.count_assignments(sizes, counts, n // 2),
        timed(lambda: [b.count_assignments(sizes, counts, n // 2)
                       for _ in range(20)], repeat),
    ))

    def sample_many(b):
        rng = random.Random(seed)
        draws = [b.sample_assignment(comp_sizes, n // 2, rng)
                 for _ in range(50)]
        return draws, timed(
            lambda: [get_backend(b.name).sample_assignment(
                comp_sizes, n // 2, random.Random(seed))
                for _ in range(5)], repeat)

    row("sample_assignment x5", sample_many)

    params = bench_params(n)
    inst = gen_uniform(n, T, seed=seed)

    def icb_run(b):
        rep = run(IcbAlgorithm(params, seed=seed, backend=b), inst,
                  monitors=())
        return (rep.total_cost, rep.epochs_finished), timed(
            lambda: run(IcbAlgorithm(params, seed=seed, backend=b), inst,
                        monitors=()), repeat)

    def cb_run(b):
        rep = run(CbBaseline(n, backend=b), inst, monitors=())
        return (rep.total_cost, rep.epochs_finished), timed(
            lambda: run(CbBaseline(n, backend=b), inst, monitors=()), repeat)

    row(f"icb end-to-end n={n} T={T}", icb_run)
    row(f"cb end-to-end n={n} T={T}", cb_run)

    print(f"workload: n={n}, T={T}, seed={seed}, params=(q={params.q}, "
          f"w={params.w}, d={params.d}), best of {repeat}")
    print("both backends returned identical results on every row\n"
          if fast else "")
    width = max(len(r[0]) for r in rows)
    header = f"{'kernel':<{width}}  {'python':>10}"
    if fast:
        header += f"  {'cython':>10}  {'speedup':>8}"
    print(header)
    for label, times in rows:
        line = f"{label:<{width}}  {times['python']:>9.4f}s"
        if fast:
            ratio = times["python"] / max(times["cython"], 1e-9)
            line += f"  {times['cython']:>9.4f}s  {ratio:>7.1f}x"
        print(line)
    return 0


if __name__ == "__main__":
    sys.exit(main())
