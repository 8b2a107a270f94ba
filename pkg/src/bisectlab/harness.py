"""Request generators, the simulation loop, and runtime cost monitors.

The monitors re-derive every bound they check from the run's parameters
and, where possible, from independent state (the tracker's component
structure rather than the algorithm's internal counters), so a run doubles
as a property check of the implementation.  Each monitor arms only when
its precondition holds; a monitor that never armed reports ``skipped``
rather than ``pass``.
"""
from __future__ import annotations

import csv
import json
import math
import random
from bisect import insort
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

from .algorithms import (
    FIRST,
    IRREGULAR,
    IcbAlgorithm,
    OnlineBisection,
    REGULAR,
    StaticBaseline,
)
from .core import Partition
from .kernels import get_backend
from .numbertheory import ext_divides, is_finite, r_ladder
from .opt import Instance

__all__ = [
    "ALL_MONITORS",
    "GeneratorSpec",
    "LemmaMonitors",
    "MonitorFailure",
    "RunReport",
    "doubling_timeline",
    "gen_adaptive_cut",
    "gen_merge_script",
    "gen_uniform",
    "run",
]

CSV_COLUMNS = [
    "step", "epoch", "stage", "service", "switching", "rebalancing",
    "g", "regular", "pivotal", "rebalanced", "components", "epochs_finished",
]

GENERATOR_KINDS = ("uniform_random", "adaptive_cut", "merge_script")


# ---------------------------------------------------------------------------
# request generators
# ---------------------------------------------------------------------------


def gen_uniform(n: int, T: int, seed: Optional[int]) -> Instance:
    """T independent uniform requests over distinct element pairs."""
    rng = random.Random(seed)
    reqs = []
    for _ in range(T):
        u = rng.randrange(n)
        v = rng.randrange(n)
        while v == u:
            v = rng.randrange(n)
        reqs.append((u, v))
    return Instance(n, Partition.default(n), tuple(reqs))


def gen_adaptive_cut(n: int, T: int, algorithm: OnlineBisection) -> Instance:
    """Adversarial stream built online: every request straddles the cut.

    The generator watches only the partitions the algorithm emits (never
    its random state) and always picks the straddling pair whose endpoints
    sit in the smallest components, slowing the merge process down.  The
    driven algorithm is consumed; replay the returned instance on a fresh
    one.  A randomized algorithm must carry a recorded seed so the replay
    sees the same coin flips.
    """
    if algorithm.n != n:
        raise ValueError(f"algorithm is over n={algorithm.n}, expected {n}")
    if isinstance(algorithm, IcbAlgorithm) and algorithm.seed is None:
        raise ValueError(
            "adaptive stream against a randomized strategy requires a "
            "recorded seed, so the produced instance can be replayed"
        )
    p0 = algorithm.partition
    reqs = []
    for _ in range(T):
        p = algorithm.partition
        size_of = [0] * n
        for comp in algorithm.tracker.component_set():
            for m in comp.members:
                size_of[m] = comp.size
        best = [None, None]
        for m in range(n):
            s = p.side(m)
            if best[s] is None or size_of[m] < size_of[best[s]]:
                best[s] = m
        u, v = best
        reqs.append((u, v))
        algorithm.step(u, v)
    return Instance(n, p0, tuple(reqs))


def gen_merge_script(sizes_timeline: Sequence[Mapping[int, int]]) -> Instance:
    """Realize a scripted sequence of component-size multisets as requests.

    Each timeline entry is the size multiset after one more merge; a merge
    is realized by joining the two components of the required sizes whose
    smallest elements are least (requests name those smallest elements, so
    any consumer merges exactly the scripted components).  An entry with no
    balanced split ends the epoch, and the next entry must again be one
    merge away from all singletons.
    """
    timeline = [Counter({int(s): int(c) for s, c in entry.items() if c})
                for entry in sizes_timeline]
    if not timeline:
        raise ValueError("empty timeline")
    n = sum(s * c for s, c in timeline[0].items())
    if n < 2 or n % 2:
        raise ValueError(f"timeline implies n={n}, which is not even and >= 2")
    kern = get_backend()

    def feasible(counts: Counter) -> bool:
        sizes = sorted(counts)
        return kern.feasible_mass(sizes, [counts[s] for s in sizes], n // 2)

    # components as (size -> sorted list of smallest members)
    def fresh():
        return Counter({1: n}), {1: list(range(n))}

    counts, by_size = fresh()
    reqs = []
    for i, want in enumerate(timeline):
        if sum(s * c for s, c in want.items()) != n:
            raise ValueError(f"timeline entry {i} does not cover {n} elements")
        gained = want - counts
        lost = counts - want
        merged = list(gained.elements())
        parts = sorted(lost.elements())
        if len(merged) != 1 or len(parts) != 2 or sum(parts) != merged[0]:
            raise ValueError(
                f"timeline entry {i} is not one merge away from the previous "
                f"multiset (lost {parts or dict(lost)}, gained {dict(gained)})"
            )
        a, b = parts
        u = by_size[a].pop(0)
        v = by_size[b].pop(0)
        if not by_size[a]:
            del by_size[a]
        if b in by_size and not by_size[b]:
            del by_size[b]
        reqs.append((min(u, v), max(u, v)))
        insort(by_size.setdefault(a + b, []), min(u, v))
        counts = want
        if not feasible(counts):
            counts, by_size = fresh()
    return Instance(n, Partition.default(n), tuple(reqs))


def doubling_timeline(n: int, T: int) -> list[dict[int, int]]:
    """Merge-the-two-smallest script: components double phase by phase.

    Runs until the multiset loses its balanced split (which resets it to
    singletons) and repeats for exactly ``T`` merges.
    """
    kern = get_backend()
    out: list[dict[int, int]] = []
    counts = Counter({1: n})
    while len(out) < T:
        keys = sorted(counts)
        a = keys[0]
        b = a if counts[a] >= 2 else keys[1]
        counts[a] -= 1
        counts[b] -= 1
        counts[a + b] += 1
        counts = +counts
        out.append(dict(counts))
        keys = sorted(counts)
        if not kern.feasible_mass(keys, [counts[k] for k in keys], n // 2):
            counts = Counter({1: n})
    return out


@dataclass(frozen=True)
class GeneratorSpec:
    """Declarative description of how to build an instance."""

    kind: str
    n: int
    T: int
    seed: Optional[int] = None

    def __post_init__(self):
        if self.kind not in GENERATOR_KINDS:
            raise ValueError(f"unknown generator {self.kind!r}")
        if self.T < 0:
            raise ValueError("T must be nonnegative")
        if self.n < 2 or self.n % 2:
            raise ValueError("n must be even and at least 2")

    def instantiate(self, algorithm: Optional[OnlineBisection] = None) -> Instance:
        if self.kind == "uniform_random":
            return gen_uniform(self.n, self.T, self.seed)
        if self.kind == "merge_script":
            return gen_merge_script(doubling_timeline(self.n, self.T))
        if algorithm is None:
            raise ValueError("adaptive_cut needs the algorithm to drive")
        return gen_adaptive_cut(self.n, self.T, algorithm)


# ---------------------------------------------------------------------------
# monitors
# ---------------------------------------------------------------------------


class MonitorFailure(AssertionError):
    """A cost-bound monitor caught a violation."""

    def __init__(self, monitor: str, step: int, detail: str):
        super().__init__(f"monitor {monitor} failed at step {step}: {detail}")
        self.monitor = monitor
        self.step = step
        self.detail = detail


ALL_MONITORS = (
    "step_cost",          # every step costs at most n + 1
    "epoch_length",       # at most n - 1 merges per epoch
    "preservation",       # partition keeps every component in one cluster
    "balance",            # clusters stay at n/2 elements
    "estimate_chain",     # the size estimate only grows by divisibility
    "pivotal_budget",     # estimate changes per epoch <= floor(log2 q) + 1
    "regular_switching",  # on-ladder merges under a settled estimate: <= 4q^6
    "irregular_budget",   # off-ladder merges in the first stage: <= q^2 w + n/q
    "rebalancing_gap",    # same-estimate rebalances at least d/2 cost apart
    "ladder_membership",  # first stage keeps >= d on-ladder components a side
)


class LemmaMonitors:
    """Online verdict accounting for one run.

    Verdicts per monitor: ``pass`` (armed, no violation), ``fail`` (at
    least one violation), ``skipped`` (precondition never held: wrong
    algorithm kind, invalid parameters, or the triggering pattern never
    occurred).  In strict mode the first violation raises
    :class:`MonitorFailure`.
    """

    def __init__(self, algorithm: OnlineBisection,
                 enabled: Optional[Iterable[str]] = None,
                 strict: bool = False):
        names = set(ALL_MONITORS) if enabled is None else set(enabled)
        unknown = names - set(ALL_MONITORS)
        if unknown:
            raise ValueError(f"unknown monitors: {sorted(unknown)}")
        self.enabled = names
        self.strict = strict
        self.alg = algorithm
        self.n = algorithm.n
        self.is_icb = isinstance(algorithm, IcbAlgorithm)
        self.icb_armed = self.is_icb and algorithm.params.valid
        if self.is_icb:
            p = algorithm.params
            self._pivot_budget = int(math.log2(p.q)) + 1
            self._regular_bound = 4 * p.q**6
            self.q, self.w, self.d = p.q, p.w, p.d
        self._fired: dict[str, bool] = {}
        self._failed: dict[str, bool] = {}
        self.failures: list[str] = []
        self._rsets: dict = {}  # estimate -> frozenset of on-ladder sizes
        self._reset_epoch_state()

    def _reset_epoch_state(self) -> None:
        self._epoch_merges = 0
        self._epoch_pivots = 0
        self._epoch_irregular = 0
        self._g_hist = [1]
        self._gap_sum = 0
        self._last_rebalance_g = None

    def _check(self, name: str, ok: bool, t: int, detail: str) -> None:
        if name not in self.enabled:
            return
        self._fired[name] = True
        if ok:
            return
        if not self._failed.get(name):
            self.failures.append(f"{name} at step {t}: {detail}")
        self._failed[name] = True
        if self.strict:
            raise MonitorFailure(name, t, detail)

    def _rset(self, g) -> frozenset:
        rs = self._rsets.get(g)
        if rs is None:
            rs = frozenset(r_ladder(g, self.q)) if is_finite(g) else frozenset()
            self._rsets[g] = rs
        return rs

    def observe(self, t: int, u: int, stage_before: str, g_prev, out) -> None:
        alg, n = self.alg, self.n
        moved = out.switching + out.rebalancing

        self._check("step_cost", out.cost <= n + 1, t,
                    f"cost {out.cost} exceeds {n + 1}")
        if out.merged:
            self._epoch_merges += 1
            self._check("epoch_length", self._epoch_merges <= n - 1, t,
                        f"{self._epoch_merges} merges in one epoch")
        if moved and "balance" in self.enabled:
            ones = bytes(alg.partition.sides).count(1)
            self._check("balance", 2 * ones == n, t,
                        f"cluster sizes {n - ones}/{ones}")
        if (
            "preservation" in self.enabled
            and not isinstance(alg, StaticBaseline)
            and (out.merged or moved)
            and not out.epoch_ended
        ):
            sides = alg.partition.sides
            if moved:
                split = None
                for comp in alg.tracker.component_set():
                    mem = comp.members
                    s0 = sides[mem[0]]
                    if any(sides[m] != s0 for m in mem):
                        split = comp.cid
                        break
                self._check("preservation", split is None, t,
                            f"component {split} straddles the cut")
            else:
                # nothing moved, so only the freshly merged component (the
                # one now holding u) could straddle an already-checked cut
                mem = alg.tracker.members_of(alg.tracker.component_of(u))
                s0 = sides[mem[0]]
                ok = not any(sides[m] != s0 for m in mem)
                self._check("preservation", ok, t,
                            f"component of element {u} straddles the cut")

        if self.icb_armed:
            self._observe_icb(t, stage_before, g_prev, out)
        if out.epoch_ended:
            self._reset_epoch_state()

    def _observe_icb(self, t: int, stage_before: str, g_prev, out) -> None:
        alg = self.alg
        g_now = alg.g
        in_first = stage_before == FIRST and out.stage_after == FIRST

        if not out.epoch_ended:
            self._check("estimate_chain", ext_divides(g_prev, g_now), t,
                        f"estimate moved {g_prev} -> {g_now}")
        if out.pivotal:
            self._epoch_pivots += 1
            self._check("pivotal_budget",
                        self._epoch_pivots <= self._pivot_budget, t,
                        f"{self._epoch_pivots} pivotal steps, "
                        f"budget {self._pivot_budget}")
        if out.merged and in_first and out.classification == IRREGULAR:
            self._epoch_irregular += 1
            # count <= q^2 w + n/q, kept in integers as count*q <= q^3 w + n
            self._check("irregular_budget",
                        self._epoch_irregular * self.q
                        <= self.q**3 * self.w + self.n, t,
                        f"{self._epoch_irregular} off-ladder merges, budget "
                        f"{self.q**2 * self.w} + {self.n}/{self.q}")
        if (
            out.merged and in_first
            and out.classification == REGULAR
            and len(self._g_hist) >= 2
            and self._g_hist[-1] == self._g_hist[-2]
        ):
            self._check("regular_switching",
                        out.switching <= self._regular_bound, t,
                        f"switching {out.switching} exceeds {self._regular_bound}")

        self._gap_sum += 1 + out.switching
        if out.rebalancing > 0:
            if self._last_rebalance_g == g_now:
                # sum >= d/2, kept in integers as 2*sum >= d
                self._check("rebalancing_gap", 2 * self._gap_sum >= self.d, t,
                            f"only {self._gap_sum} switching mass since the "
                            f"last rebalance at the same estimate")
            self._last_rebalance_g = g_now
            self._gap_sum = 0

        if out.merged and in_first and not out.epoch_ended:
            if "ladder_membership" in self.enabled:
                rset = self._rset(g_now)
                per_side = [0, 0]
                sides = alg.partition.sides
                for comp in alg.tracker.component_set():
                    if comp.size in rset:
                        per_side[sides[comp.members[0]]] += 1
                self._check(
                    "ladder_membership",
                    is_finite(g_now) and min(per_side) >= self.d, t,
                    f"on-ladder components per cluster {per_side}, need {self.d}",
                )

        if not out.epoch_ended:
            self._g_hist.append(g_now)

    def verdicts(self) -> dict[str, str]:
        out = {}
        for name in sorted(self.enabled):
            if self._failed.get(name):
                out[name] = "fail"
            elif self._fired.get(name):
                out[name] = "pass"
            else:
                out[name] = "skipped"
        return out


# ---------------------------------------------------------------------------
# the simulation loop
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RunReport:
    """Aggregated ledger of one run."""

    algorithm: str
    n: int
    T: int
    backend: str
    seed: Optional[int]
    total_cost: int
    service_cost: int
    switching_cost: int
    rebalancing_cost: int
    epochs_finished: int
    per_epoch: tuple
    monitor_verdicts: Mapping[str, str]
    failures: tuple = ()

    @property
    def empirical_ratio(self) -> Fraction:
        return Fraction(self.total_cost, max(1, self.epochs_finished))

    def to_json_dict(self) -> dict:
        d = {
            "algorithm": self.algorithm,
            "n": self.n,
            "T": self.T,
            "backend": self.backend,
            "seed": self.seed,
            "total_cost": self.total_cost,
            "service_cost": self.service_cost,
            "switching_cost": self.switching_cost,
            "rebalancing_cost": self.rebalancing_cost,
            "epochs_finished": self.epochs_finished,
            "empirical_ratio": str(self.empirical_ratio),
            "per_epoch": list(self.per_epoch),
            "monitor_verdicts": dict(self.monitor_verdicts),
            "failures": list(self.failures),
        }
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, indent=2) + "\n"


def run(
    algorithm: OnlineBisection,
    instance: Instance,
    monitors: Optional[Iterable[str]] = None,
    strict: bool = False,
    csv_path: Optional[str] = None,
    trace_path: Optional[str] = None,
) -> RunReport:
    """Drive one algorithm over one instance with monitors attached.

    Writes the per-step CSV ledger and the JSON-lines trace when paths are
    given; both are byte-deterministic for a fixed (instance, seed).
    """
    if algorithm.n != instance.n:
        raise ValueError(
            f"algorithm n={algorithm.n} does not match instance n={instance.n}"
        )
    if algorithm.requests_seen:
        raise ValueError("run() needs a fresh algorithm instance")
    mon = LemmaMonitors(algorithm, monitors, strict)
    is_icb = isinstance(algorithm, IcbAlgorithm)

    totals = Counter()
    cur_epoch = 0
    epoch_acc = Counter()
    per_epoch: list[dict] = []
    csv_rows: list[list] = []
    trace_rows: list[dict] = []

    def close_epoch(ended: bool) -> None:
        nonlocal epoch_acc
        per_epoch.append({
            "epoch": len(per_epoch),
            "steps": epoch_acc["steps"],
            "merges": epoch_acc["merges"],
            "service": epoch_acc["service"],
            "switching": epoch_acc["switching"],
            "rebalancing": epoch_acc["rebalancing"],
            "ended": ended,
        })
        epoch_acc = Counter()

    for t, (u, v) in enumerate(instance.requests, start=1):
        stage_before = algorithm.stage if is_icb else FIRST
        g_prev = algorithm.g if is_icb else None
        out = algorithm.step(u, v)
        mon.observe(t, u, stage_before, g_prev, out)

        totals["service"] += out.service
        totals["switching"] += out.switching
        totals["rebalancing"] += out.rebalancing
        epoch_acc["steps"] += 1
        epoch_acc["merges"] += 1 if out.merged else 0
        epoch_acc["service"] += out.service
        epoch_acc["switching"] += out.switching
        epoch_acc["rebalancing"] += out.rebalancing

        g_str = ""
        if is_icb:
            g_str = "inf" if not is_finite(algorithm.g) else str(algorithm.g)
        csv_rows.append([
            t, cur_epoch, out.stage_after, out.service, out.switching,
            out.rebalancing, g_str,
            "" if out.classification is None else int(out.classification == REGULAR),
            int(out.pivotal), int(out.rebalancing > 0),
            algorithm.components_live, algorithm.epochs_finished,
        ])
        trace_rows.append({
            "t": t, "u": u, "v": v, "crossed": bool(out.service),
            "merged": out.merged, "epoch": cur_epoch,
            "stage": out.stage_after, "ended": out.epoch_ended,
        })
        if out.epoch_ended:
            close_epoch(True)
            cur_epoch += 1
    if epoch_acc["steps"]:
        close_epoch(False)

    total = totals["service"] + totals["switching"] + totals["rebalancing"]
    report = RunReport(
        algorithm=algorithm.name,
        n=algorithm.n,
        T=len(instance.requests),
        backend=algorithm.backend.name,
        seed=getattr(algorithm, "seed", None),
        total_cost=total,
        service_cost=totals["service"],
        switching_cost=totals["switching"],
        rebalancing_cost=totals["rebalancing"],
        epochs_finished=cur_epoch,
        per_epoch=tuple(per_epoch),
        monitor_verdicts=mon.verdicts(),
        failures=tuple(mon.failures),
    )
    if csv_path is not None:
        with open(csv_path, "w", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(CSV_COLUMNS)
            writer.writerows(csv_rows)
    if trace_path is not None:
        with open(trace_path, "w") as f:
            for row in trace_rows:
                f.write(json.dumps(row, sort_keys=True) + "\n")
    return report
