"""Command-line workbench for the online bisection strategies.

Six subcommands::

    simulate   one algorithm on one generated stream; writes ledger + report
    sweep      the same run fanned out over many seeds, merged into one table
    verify     self-contained property checks (oracles, certificates, sampling)
    oracle     inspect the preserving-partition space of a size multiset
    bezout     nonnegative certificate for gcd(A ∪ B) across two size sets
    opt        exact offline optimum for a recorded trace or generated stream

Exit codes: 0 on success; 1 on a usage error (bad flags or values, broken
config, infeasible query); 2 on a property violation — a lemma monitor
firing under ``--strict``, or a failing ``verify`` check.

Every random choice derives from ``--seed``, so a repeated invocation with
the same arguments produces byte-identical output files.  Output lands in
``--out`` when given, else ``$BISECTLAB_OUT``, else the working directory.
A JSON ``--config`` file may supply any long flag of the same subcommand by
name; explicit flags win over config values, and unknown fields are
rejected rather than ignored.
"""
from __future__ import annotations

import argparse
import dataclasses
import itertools
import json
import math
import os
import random
import sys
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from .algorithms import IcbParameters, make_algorithm
from .core import ComponentSet, Partition, dist
from .harness import ALL_MONITORS, GeneratorSpec, MonitorFailure, run
from .kernels import get_backend
from .numbertheory import INFINITY, in_ladder, is_finite, nonneg_bezout
from .opt import DEFAULT_STATE_CAP, Instance, epoch_lower_bound, exact_opt
from .partition_oracle import (
    best_balanced,
    closest_preserving,
    count_preserving,
    exists_balanced,
    exists_preserving,
    sample_uniform,
)

ALGORITHM_CHOICES = ("icb", "cb", "static")

# user-facing generator names -> harness kinds (long spellings also accepted)
_GEN_KIND = {
    "uniform": "uniform_random",
    "adaptive": "adaptive_cut",
    "merge_script": "merge_script",
    "uniform_random": "uniform_random",
    "adaptive_cut": "adaptive_cut",
}

# chi-square critical values at significance 1e-3 for the degrees of
# freedom the sampling check can produce
_CHISQ_CRITICAL = {1: 10.828, 5: 20.515}


class UsageError(Exception):
    """Bad invocation: wrong flags, unusable values, broken config."""


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on bad usage; the exit-code contract reserves 2
    for property violations, so usage problems are rethrown and exit 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


# ---------------------------------------------------------------------------
# option plumbing
# ---------------------------------------------------------------------------


def _opt_int(opts: dict, key: str, default: Optional[int] = None,
             minimum: Optional[int] = None, required: bool = False
             ) -> Optional[int]:
    """Integer option that may come from a flag or the config file."""
    if key not in opts:
        if required:
            raise UsageError(f"--{key} is required")
        return default
    v = opts[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise UsageError(f"{key} must be an integer, got {v!r}")
    if minimum is not None and v < minimum:
        raise UsageError(f"{key} must be at least {minimum}")
    return v


def _even_n(opts: dict) -> int:
    n = _opt_int(opts, "n", required=True)
    if n % 2:
        raise UsageError("n must be even")
    if n < 2:
        raise UsageError("n must be at least 2")
    return n


def _choice(opts: dict, key: str, choices: Sequence[str], default: str) -> str:
    v = opts.get(key, default)
    if v not in choices:
        raise UsageError(f"{key} must be one of: {', '.join(choices)}")
    return v


def _outdir(opts: dict) -> Path:
    d = opts.get("out") or os.environ.get("BISECTLAB_OUT") or "."
    path = Path(d)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _monitor_names(opts: dict) -> Optional[tuple]:
    """None means "all monitors"; an empty tuple disables them."""
    raw = opts.get("monitors", "all")
    if isinstance(raw, (list, tuple)):
        names = [str(s) for s in raw]
    else:
        text = str(raw)
        if text == "all":
            return None
        if text == "none":
            return ()
        names = [s for s in text.split(",") if s]
    unknown = sorted(set(names) - set(ALL_MONITORS))
    if unknown:
        raise UsageError(
            f"unknown monitors: {', '.join(unknown)} "
            f"(known: {', '.join(ALL_MONITORS)})"
        )
    return tuple(names)


def _icb_params(opts: dict, n: int) -> IcbParameters:
    """Defaults for n, overridden field-wise by --q/--w/--d; a violated
    side condition is reported (both sides of the inequality) but does
    not stop the run — the lemma monitors downgrade to skipped."""
    params = IcbParameters.defaults(n)
    overrides = {
        k: _opt_int(opts, k, minimum=1) for k in ("q", "w", "d") if k in opts
    }
    if overrides:
        params = dataclasses.replace(params, **overrides)
    for constraint in params.violated_constraints():
        print(f"warning: parameter constraint violated: {constraint}",
              file=sys.stderr)
    return params


def _parse_seeds(raw) -> list:
    if isinstance(raw, list):
        seeds = raw
        if not all(isinstance(s, int) and not isinstance(s, bool) for s in seeds):
            raise UsageError("seeds list must contain integers")
    else:
        text = str(raw)
        try:
            if ":" in text:
                lo, _, hi = text.partition(":")
                seeds = list(range(int(lo), int(hi)))
            else:
                seeds = [int(s) for s in text.split(",") if s]
        except ValueError:
            raise UsageError(
                f"cannot parse seeds {text!r}: use start:stop or a comma list"
            ) from None
    if not seeds:
        raise UsageError("at least one seed is required")
    return seeds


def _merge_config(given: dict, allowed_keys: dict) -> dict:
    """Layer a JSON config under the explicitly given flags."""
    path = given.pop("config", None)
    if path is None:
        return given
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config: {exc}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"config is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError("config must be a JSON object")
    allowed = allowed_keys[given["command"]]
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise UsageError(
            f"unknown config fields for {given['command']}: "
            f"{', '.join(unknown)}"
        )
    return {**data, **given}


# ---------------------------------------------------------------------------
# simulate / sweep
# ---------------------------------------------------------------------------


def _build_instance(gen_kind: str, n: int, T: int, seed: int, alg_name: str,
                    params: Optional[IcbParameters], backend_name: str):
    spec = GeneratorSpec(kind=gen_kind, n=n, T=T, seed=seed)
    if gen_kind != "adaptive_cut":
        return spec.instantiate()
    # the adaptive stream is recorded against its own driver copy; the
    # measured run then replays it against a fresh, identically seeded one
    driver = make_algorithm(alg_name, n, seed=seed, params=params,
                            backend=get_backend(backend_name))
    return spec.instantiate(driver)


def _run_once(alg_name: str, n: int, T: int, gen_kind: str, seed: int,
              params: Optional[IcbParameters], monitors, strict: bool,
              backend_name: str, csv_path=None, trace_path=None):
    instance = _build_instance(gen_kind, n, T, seed, alg_name, params,
                               backend_name)
    alg = make_algorithm(alg_name, n, seed=seed, params=params,
                         backend=get_backend(backend_name))
    return run(alg, instance, monitors=monitors, strict=strict,
               csv_path=csv_path, trace_path=trace_path)


def _cmd_simulate(opts: dict) -> int:
    n = _even_n(opts)
    T = _opt_int(opts, "T", required=True, minimum=0)
    alg_name = _choice(opts, "alg", ALGORITHM_CHOICES, "icb")
    gen_name = _choice(opts, "gen", tuple(_GEN_KIND), "uniform")
    seed = _opt_int(opts, "seed", default=0)
    strict = bool(opts.get("strict", False))
    backend_name = _choice(opts, "backend", ("auto", "python", "cython"),
                           "auto")
    monitors = _monitor_names(opts)
    params = _icb_params(opts, n) if alg_name == "icb" else None
    if alg_name != "icb" and any(k in opts for k in ("q", "w", "d")):
        print("warning: --q/--w/--d apply only to icb; ignored",
              file=sys.stderr)

    outdir = _outdir(opts)
    prefix = opts.get("prefix") or f"{alg_name}-{gen_name}-n{n}-T{T}-seed{seed}"
    csv_path = outdir / f"{prefix}.csv"
    report_path = outdir / f"{prefix}.report.json"
    trace_path = outdir / f"{prefix}.trace.jsonl" if opts.get("trace") else None

    report = _run_once(
        alg_name, n, T, _GEN_KIND[gen_name], seed, params, monitors, strict,
        backend_name, csv_path=str(csv_path),
        trace_path=str(trace_path) if trace_path else None,
    )
    report_path.write_text(report.to_json(), encoding="utf-8")
    sys.stdout.write(report.to_json())
    for path in (csv_path, report_path, trace_path):
        if path is not None:
            print(f"wrote {path}", file=sys.stderr)
    return 0


def _sweep_worker(payload: dict) -> dict:
    """One independent run; lives at module scope so worker processes can
    import it.  Monitors run non-strict here — violations are collected
    into the report and judged by the aggregator."""
    report = _run_once(
        payload["alg"], payload["n"], payload["T"], payload["gen"],
        payload["seed"], payload["params"], payload["monitors"],
        False, payload["backend"],
    )
    doc = report.to_json_dict()
    # the report's seed field is the algorithm's own (None for the
    # derandomized baselines); sweep rows are keyed by the stream seed
    doc["seed"] = payload["seed"]
    return doc


_SWEEP_COLUMNS = [
    "seed", "algorithm", "generator", "n", "T", "backend", "total_cost",
    "service_cost", "switching_cost", "rebalancing_cost", "epochs_finished",
    "empirical_ratio", "monitor_failures",
]


def _cmd_sweep(opts: dict) -> int:
    n = _even_n(opts)
    T = _opt_int(opts, "T", required=True, minimum=0)
    alg_name = _choice(opts, "alg", ALGORITHM_CHOICES, "icb")
    gen_name = _choice(opts, "gen", tuple(_GEN_KIND), "uniform")
    seeds = _parse_seeds(opts.get("seeds", "0:10"))
    strict = bool(opts.get("strict", False))
    backend_name = _choice(opts, "backend", ("auto", "python", "cython"),
                           "auto")
    monitors = _monitor_names(opts)
    params = _icb_params(opts, n) if alg_name == "icb" else None
    workers = _opt_int(opts, "workers", default=0, minimum=0)
    if not workers:
        workers = min(len(seeds), os.cpu_count() or 1)

    payloads = [
        {"alg": alg_name, "n": n, "T": T, "gen": _GEN_KIND[gen_name],
         "seed": s, "params": params, "monitors": monitors,
         "backend": backend_name}
        for s in seeds
    ]
    if workers > 1 and len(payloads) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(_sweep_worker, payloads))
    else:
        reports = [_sweep_worker(p) for p in payloads]

    outdir = _outdir(opts)
    prefix = opts.get("prefix") or f"sweep-{alg_name}-{gen_name}-n{n}-T{T}"
    csv_path = outdir / f"{prefix}.csv"
    json_path = outdir / f"{prefix}.json"

    lines = [",".join(_SWEEP_COLUMNS)]
    for rep in reports:
        ratio = Fraction(rep["total_cost"], max(1, rep["epochs_finished"]))
        lines.append(",".join(str(x) for x in (
            rep["seed"], rep["algorithm"], gen_name, rep["n"], rep["T"],
            rep["backend"], rep["total_cost"], rep["service_cost"],
            rep["switching_cost"], rep["rebalancing_cost"],
            rep["epochs_finished"], float(ratio), len(rep["failures"]),
        )))
    csv_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    json_path.write_text(
        json.dumps(reports, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    print(f"wrote {csv_path}", file=sys.stderr)
    print(f"wrote {json_path}", file=sys.stderr)

    failed = [(rep["seed"], f) for rep in reports for f in rep["failures"]]
    total = sum(rep["total_cost"] for rep in reports)
    epochs = sum(rep["epochs_finished"] for rep in reports)
    print(f"{len(reports)} runs, total cost {total}, "
          f"epochs finished {epochs}, monitor failures {len(failed)}")
    if failed and strict:
        for seed, failure in failed:
            print(f"error: seed {seed}: monitor {failure}", file=sys.stderr)
        return 2
    return 0


# ---------------------------------------------------------------------------
# verify: self-contained property checks with their own enumerators
# ---------------------------------------------------------------------------


def _enumerate_preserving(C: ComponentSet) -> list:
    """All preserving partitions of C by brute force over side choices."""
    comps = list(C)
    half = C.n // 2
    out = []
    for bits in itertools.product((0, 1), repeat=len(comps)):
        if sum(c.size for c, b in zip(comps, bits) if b) != half:
            continue
        sides = bytearray(C.n)
        for c, b in zip(comps, bits):
            for m in c.members:
                sides[m] = b
        out.append(Partition(sides))
    return out


def _random_component_set(rng: random.Random) -> ComponentSet:
    """Random size multiset with n <= 16 even and at most 12 components."""
    while True:
        n = rng.randrange(2, 18, 2)
        sizes, left = [], n
        while left:
            s = rng.randint(1, left)
            sizes.append(s)
            left -= s
        if len(sizes) <= 12:
            return ComponentSet.from_sizes(sizes)


def _random_partition(rng: random.Random, n: int) -> Partition:
    side0 = set(rng.sample(range(n), n // 2))
    return Partition(bytes(0 if v in side0 else 1 for v in range(n)))


def _verify_oracles(rng: random.Random, cases: int) -> tuple:
    backend = get_backend("auto")
    for case in range(cases):
        C = _random_component_set(rng)
        truth = _enumerate_preserving(C)
        have = {p.sides for p in truth}
        p_prev = _random_partition(rng, C.n)

        if exists_preserving(C, backend) != bool(truth):
            return False, f"exists_preserving disagrees on case {case}"
        if count_preserving(C, backend) != len(truth):
            return False, f"count_preserving disagrees on case {case}"

        res = closest_preserving(C, p_prev, backend)
        if truth:
            best = min(dist(p_prev, p) for p in truth)
            ok = (res is not None and res[0].sides in have
                  and res[1] == best == dist(p_prev, res[0]))
        else:
            ok = res is None
        if not ok:
            return False, f"closest_preserving disagrees on case {case}"

        g = rng.choice([1, 2, 3, INFINITY])
        q = rng.randint(1, 4)
        ell = rng.randint(0, 3)
        balanced = [
            p for p in truth
            if min(Counter(
                p.side(c.members[0]) for c in C if in_ladder(c.size, g, q)
            ).get(side, 0) for side in (0, 1)) >= ell
        ]
        if exists_balanced(C, g, ell, q, backend) != bool(balanced):
            return False, f"exists_balanced disagrees on case {case}"
        res = best_balanced(C, g, ell, q, p_prev, backend)
        if balanced:
            best = min(dist(p_prev, p) for p in balanced)
            bset = {p.sides for p in balanced}
            ok = (res is not None and res[0].sides in bset and res[1] == best)
        else:
            ok = res is None
        if not ok:
            return False, f"best_balanced disagrees on case {case}"

        if truth and sample_uniform(C, rng, backend).sides not in have:
            return False, f"sample_uniform left the support on case {case}"
    return True, f"{cases} random multisets, all oracle answers exact"


def _verify_bezout() -> tuple:
    universe = range(1, 9)
    checked = 0
    for k in range(1, 5):
        for a_set in itertools.combinations(universe, k):
            rest = [v for v in universe if v not in a_set]
            for ell in range(1, 6 - k):
                for b_set in itertools.combinations(rest, ell):
                    cert = nonneg_bezout(a_set, b_set)
                    if not cert.verify():
                        return False, (
                            f"certificate fails for A={a_set} B={b_set}"
                        )
                    checked += 1
    return True, f"{checked} disjoint set pairs, every certificate verifies"


def _chi_square(C: ComponentSet, draws: int, rng: random.Random) -> tuple:
    """(statistic, degrees of freedom) against the exact uniform law."""
    support = _enumerate_preserving(C)
    counts = Counter(sample_uniform(C, rng).sides for _ in range(draws))
    expected = Fraction(draws, len(support))
    stat = sum(
        (counts.get(p.sides, 0) - expected) ** 2 / expected for p in support
    )
    return float(stat), len(support) - 1


def _verify_sampling(rng: random.Random, draws: int) -> tuple:
    details = []
    for sizes in ([1, 1, 1, 1], [2, 1, 1]):
        stat, df = _chi_square(ComponentSet.from_sizes(sizes), draws, rng)
        critical = _CHISQ_CRITICAL[df]
        label = "+".join(map(str, sizes))
        if stat > critical:
            return False, (
                f"sizes {label}: chi-square {stat:.3f} exceeds {critical} "
                f"(df {df}, {draws} draws)"
            )
        details.append(f"sizes {label}: {stat:.3f} < {critical} (df {df})")
    return True, "; ".join(details)


def _cmd_verify(opts: dict) -> int:
    seed = _opt_int(opts, "seed", default=0)
    cases = _opt_int(opts, "cases", default=120, minimum=1)
    draws = _opt_int(opts, "draws", default=10_000, minimum=100)
    rng = random.Random(seed)
    checks = [
        ("oracle_equivalence", lambda: _verify_oracles(rng, cases)),
        ("bezout_certificates", _verify_bezout),
        ("sampling_chisq", lambda: _verify_sampling(rng, draws)),
    ]
    ok = True
    for name, check in checks:
        passed, detail = check()
        ok = ok and passed
        print(f"{'ok' if passed else 'FAIL'}: {name} ({detail})")
    return 0 if ok else 2


# ---------------------------------------------------------------------------
# oracle / bezout / opt
# ---------------------------------------------------------------------------


def _oracle_sizes(opts: dict) -> list:
    raw = opts.get("sizes")
    if raw is None and opts.get("sizes_json"):
        try:
            with open(opts["sizes_json"], encoding="utf-8") as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read sizes: {exc}") from None
    if raw is None:
        raise UsageError("--sizes or --sizes-json is required")
    if isinstance(raw, str):
        raw = [s for s in raw.split(",") if s]
    if not isinstance(raw, list) or not raw:
        raise UsageError("sizes must be a nonempty list")
    try:
        sizes = [int(s) for s in raw]
    except (TypeError, ValueError):
        raise UsageError(f"sizes must be integers, got {raw!r}") from None
    if any(s < 1 for s in sizes):
        raise UsageError("sizes must be positive")
    return sizes


def _cmd_oracle(opts: dict) -> int:
    sizes = _oracle_sizes(opts)
    C = ComponentSet.from_sizes(sizes)
    backend = get_backend(
        _choice(opts, "backend", ("auto", "python", "cython"), "auto")
    )
    doc = {
        "n": C.n,
        "sizes": sorted(sizes, reverse=True),
        "exists": exists_preserving(C, backend),
        "count": count_preserving(C, backend),
    }
    balance_keys = [k for k in ("g", "ell", "q") if k in opts]
    if balance_keys:
        if len(balance_keys) != 3:
            raise UsageError("balanced queries need all of --g, --ell, --q")
        g_raw = opts["g"]
        if str(g_raw) == "inf":
            g = INFINITY
        else:
            try:
                g = int(g_raw)
            except (TypeError, ValueError):
                raise UsageError(
                    f"g must be a positive integer or inf, got {g_raw!r}"
                ) from None
            if g < 1:
                raise UsageError("g must be at least 1")
        ell = _opt_int(opts, "ell", minimum=0)
        q = _opt_int(opts, "q", minimum=1)
        doc["balanced"] = {
            "g": int(g) if is_finite(g) else "inf",
            "ell": ell,
            "q": q,
            "exists": exists_balanced(C, g, ell, q, backend),
        }
    draws = _opt_int(opts, "sample", default=0, minimum=0)
    if draws:
        rng = random.Random(_opt_int(opts, "seed", default=0))
        doc["samples"] = [
            "".join(map(str, sample_uniform(C, rng, backend).sides))
            for _ in range(draws)
        ]
    print(json.dumps(doc, sort_keys=True, indent=2))
    return 0


def _cmd_bezout(opts: dict) -> int:
    a_values = opts.get("a") or []
    b_values = opts.get("b") or []
    if not a_values or not b_values:
        raise UsageError("--a and --b both need at least one value")
    cert = nonneg_bezout(a_values, b_values)
    doc = cert.as_dict()
    doc["verified"] = cert.verify()
    print(json.dumps(doc, sort_keys=True, indent=2))
    if not doc["verified"]:
        print("error: certificate failed verification", file=sys.stderr)
        return 2
    return 0


def _read_trace(path: str) -> list:
    try:
        with open(path, encoding="utf-8") as fh:
            rows = [json.loads(line) for line in fh if line.strip()]
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read trace: {exc}") from None
    for key in ("t", "u", "v", "ended"):
        if any(key not in row for row in rows):
            raise UsageError(f"trace rows are missing the {key!r} field")
    return sorted(rows, key=lambda row: row["t"])


def _cmd_opt(opts: dict) -> int:
    n = _even_n(opts)
    cap = _opt_int(opts, "cap", default=DEFAULT_STATE_CAP, minimum=1)
    if opts.get("trace"):
        rows = _read_trace(opts["trace"])
        instance = Instance(
            n, Partition.default(n), tuple((r["u"], r["v"]) for r in rows)
        )
        lower = epoch_lower_bound(rows)
        source = {"trace": opts["trace"]}
    elif "gen" in opts or "T" in opts:
        gen_name = _choice(opts, "gen", ("uniform", "uniform_random",
                                         "merge_script"), "uniform")
        T = _opt_int(opts, "T", required=True, minimum=0)
        seed = _opt_int(opts, "seed", default=0)
        spec = GeneratorSpec(kind=_GEN_KIND[gen_name], n=n, T=T, seed=seed)
        instance = spec.instantiate()
        # epoch boundaries are input-determined, so any run over the same
        # stream counts them; the static baseline is the cheapest
        lower = run(make_algorithm("static", n), instance).epochs_finished
        source = {"generator": gen_name, "seed": seed}
    else:
        raise UsageError("either --trace or --gen/--T is required")

    value = exact_opt(instance, cap=cap)
    doc = {
        "n": n,
        "T": len(instance.requests),
        "states": math.comb(n, n // 2),
        "exact_opt": value,
        "epoch_lower_bound": lower,
        **source,
    }
    print(json.dumps(doc, sort_keys=True, indent=2))
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _build_parser() -> tuple:
    parser = _Parser(
        prog="bisectlab",
        description="Workbench for randomized online bisection experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True,
                                metavar="command", parser_class=_Parser)
    S = argparse.SUPPRESS  # so config merging can tell "given" from "default"

    def add_run_flags(sp):
        sp.add_argument("--alg", default=S,
                        help="algorithm: icb, cb or static (default icb)")
        sp.add_argument("--n", type=int, default=S, help="number of elements")
        sp.add_argument("--T", type=int, default=S, help="number of requests")
        sp.add_argument("--gen", default=S,
                        help="generator: uniform, adaptive or merge_script")
        sp.add_argument("--q", type=int, default=S, help="size-range knob")
        sp.add_argument("--w", type=int, default=S, help="popularity knob")
        sp.add_argument("--d", type=int, default=S, help="balance knob")
        sp.add_argument("--monitors", default=S,
                        help="comma list of monitor names, or all/none")
        sp.add_argument("--strict", action="store_true", default=S,
                        help="exit 2 on the first monitor violation")
        sp.add_argument("--backend", default=S,
                        help="kernel backend: auto, python or cython")
        sp.add_argument("--out", default=S, help="output directory")
        sp.add_argument("--prefix", default=S, help="output file prefix")
        sp.add_argument("--config", default=S,
                        help="JSON file with defaults for these flags")

    sim = sub.add_parser("simulate", help="run one algorithm on one stream")
    add_run_flags(sim)
    sim.add_argument("--seed", type=int, default=S,
                     help="source of all randomness (default 0)")
    sim.add_argument("--trace", action="store_true", default=S,
                     help="also write the JSON-lines trace")

    swp = sub.add_parser("sweep", help="fan one setup out over many seeds")
    add_run_flags(swp)
    swp.add_argument("--seeds", default=S,
                     help="start:stop range or comma list (default 0:10)")
    swp.add_argument("--workers", type=int, default=S,
                     help="parallel processes (default: one per cpu)")

    ver = sub.add_parser("verify", help="run the self-check property suite")
    ver.add_argument("--seed", type=int, default=S)
    ver.add_argument("--cases", type=int, default=S,
                     help="random multisets for the oracle check")
    ver.add_argument("--draws", type=int, default=S,
                     help="samples per chi-square test")
    ver.add_argument("--config", default=S)

    orc = sub.add_parser("oracle", help="query the partition oracles")
    orc.add_argument("--sizes", default=S, help="component sizes, e.g. 2,1,1")
    orc.add_argument("--sizes-json", dest="sizes_json", default=S,
                     help="JSON file holding the size list")
    orc.add_argument("--g", default=S,
                     help="size estimate for balanced queries (int or inf)")
    orc.add_argument("--ell", type=int, default=S,
                     help="per-cluster on-ladder component minimum")
    orc.add_argument("--q", type=int, default=S, help="ladder length bound")
    orc.add_argument("--sample", type=int, default=S,
                     help="also draw this many uniform partitions")
    orc.add_argument("--seed", type=int, default=S)
    orc.add_argument("--backend", default=S)
    orc.add_argument("--config", default=S)

    bez = sub.add_parser("bezout", help="nonnegative gcd certificate")
    bez.add_argument("--a", type=int, nargs="+", default=S,
                     help="first value set")
    bez.add_argument("--b", type=int, nargs="+", default=S,
                     help="second value set (disjoint from --a)")
    bez.add_argument("--config", default=S)

    opt = sub.add_parser("opt", help="exact offline optimum")
    opt.add_argument("--n", type=int, default=S, help="number of elements")
    opt.add_argument("--trace", default=S,
                     help="JSON-lines trace recorded by simulate")
    opt.add_argument("--gen", default=S,
                     help="generate instead: uniform or merge_script")
    opt.add_argument("--T", type=int, default=S)
    opt.add_argument("--seed", type=int, default=S)
    opt.add_argument("--cap", type=int, default=S,
                     help=f"largest allowed state space "
                          f"(default {DEFAULT_STATE_CAP})")
    opt.add_argument("--config", default=S)

    # every flag a subcommand accepts may equally come from --config
    allowed_keys = {
        name: {a.dest for a in sp._actions} - {"help", "config"}
        for name, sp in sub.choices.items()
    }
    return parser, allowed_keys


_HANDLERS = {
    "simulate": _cmd_simulate,
    "sweep": _cmd_sweep,
    "verify": _cmd_verify,
    "oracle": _cmd_oracle,
    "bezout": _cmd_bezout,
    "opt": _cmd_opt,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser, allowed_keys = _build_parser()
    try:
        opts = _merge_config(vars(parser.parse_args(argv)), allowed_keys)
        return _HANDLERS[opts.pop("command")](opts)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except MonitorFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
