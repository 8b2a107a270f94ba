"""Ground-truth cost references for small instances.

`exact_opt` runs a layered shortest-path over *all* balanced partitions,
so it is exponential in n and guarded by a state cap; `epoch_lower_bound`
is the complementary cheap bound that works at any scale: the optimum pays
at least 1 per finished epoch, because within a finished epoch every
partition — including the one the optimum sits on — eventually has a
component straddling it.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .core import Partition

__all__ = ["CapacityExceeded", "Instance", "exact_opt", "epoch_lower_bound"]

DEFAULT_STATE_CAP = 12870  # C(16, 8): n <= 16 by default

_BIG = 1 << 40  # unreachable-state marker; sums stay far below 2**63


class CapacityExceeded(ValueError):
    """The balanced-partition state space is larger than the cap."""


@dataclass(frozen=True)
class Instance:
    """A fixed request sequence with its starting partition."""

    n: int
    p0: Partition
    requests: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.p0.n != self.n:
            raise ValueError(f"p0 is over {self.p0.n} elements, expected {self.n}")
        object.__setattr__(
            self, "requests", tuple((int(u), int(v)) for u, v in self.requests)
        )
        for u, v in self.requests:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"request ({u}, {v}) outside 0..{self.n - 1}")
            if u == v:
                raise ValueError(f"request ({u}, {v}) joins an element to itself")

    def prefix(self, t: int) -> "Instance":
        return Instance(self.n, self.p0, self.requests[:t])


def _balanced_masks(n: int) -> np.ndarray:
    """All subsets of 0..n-1 of size n/2, encoded as bitmask integers."""
    half = n // 2
    out = np.fromiter(
        (
            sum(1 << i for i in combo)
            for combo in itertools.combinations(range(n), half)
        ),
        dtype=np.int64,
        count=math.comb(n, half),
    )
    return out


def exact_opt(inst: Instance, cap: int = DEFAULT_STATE_CAP) -> int:
    """Minimum total cost over every sequence of balanced partitions.

    Service for request t is charged against the partition held *before*
    any move, and an arbitrary move is allowed after every request.  The
    state space is every balanced partition (side-0 element sets as
    bitmasks); each request performs one min-plus relaxation over it.

    Raises :class:`CapacityExceeded` when C(n, n/2) exceeds ``cap``.
    """
    n = inst.n
    count = math.comb(n, n // 2)
    if count > cap:
        raise CapacityExceeded(
            f"{count} balanced partitions at n={n} exceeds the cap of {cap}"
        )
    masks = _balanced_masks(n)
    mask0 = sum(1 << i for i in range(n) if inst.p0.side(i) == 0)
    f = np.full(count, _BIG, dtype=np.int64)
    f[int(np.nonzero(masks == mask0)[0][0])] = 0

    T = len(inst.requests)
    for t, (u, v) in enumerate(inst.requests, start=1):
        split = ((masks >> u) & 1) != ((masks >> v) & 1)
        served = f + split.astype(np.int64)
        # Moving more than 2 elements per remaining request can never pay
        # for itself (staying put costs at most 1 per remaining request),
        # so transitions beyond that radius are pruned.
        bound = 2 * (T - t)
        f = _relax(served, masks, bound)
    return int(f.min())


def _relax(served: np.ndarray, masks: np.ndarray, bound: int) -> np.ndarray:
    """One min-plus step: out[j] = min_i served[i] + dist(i, j), dist <= bound."""
    out = served.copy()  # dist-0 transition: stay where you are
    if bound <= 0:
        return out
    chunk = max(1, (1 << 22) // len(masks))  # keep temporaries ~tens of MB
    for i0 in range(0, len(masks), chunk):
        src = masks[i0 : i0 + chunk]
        dd = np.bitwise_count(src[:, None] ^ masks[None, :]).astype(np.int64)
        np.putmask(dd, dd > bound, _BIG)
        dd += served[i0 : i0 + chunk, None]
        np.minimum(out, dd.min(axis=0), out=out)
    return out


def epoch_lower_bound(trace: Iterable) -> int:
    """Number of finished epochs in a trace: a cost floor for any strategy.

    Accepts trace rows as mappings or objects; each row must expose an
    ``ended`` flag marking the steps that closed an epoch.  The epoch in
    progress at the end of the trace never emitted the flag, so it is
    excluded — it may genuinely be free.
    """
    total = 0
    for row in trace:
        ended = row["ended"] if isinstance(row, Mapping) else row.ended
        if ended:
            total += 1
    return total
