"""Core data model: balanced partitions, components, and the request tracker.

Elements are integers ``0..n-1`` with ``n`` even.  A partition maps every
element to cluster 0 or 1 with both clusters exactly ``n/2`` strong.
Requests are element pairs; the tracker folds them into connected
components (an epoch-scoped union-find).  Requests inside an existing
component change nothing and are invisible to the algorithms; requests
joining two components produce a :class:`MergeEvent`.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, Iterator, Mapping, Optional, Sequence

ElementId = int
ComponentId = int


def _check_n(n: int) -> None:
    if n < 2 or n % 2 != 0:
        raise ValueError(f"n must be even and >= 2, got {n}")


class Partition:
    """Immutable balanced 2-partition of ``0..n-1``.

    Stored as one byte per element (0 or 1); both clusters must have
    exactly ``n/2`` elements — unbalanced inputs are rejected.
    """

    __slots__ = ("_sides", "_packed")

    def __init__(self, sides: Iterable[int]):
        data = bytes(sides)
        _check_n(len(data))
        ones = data.count(1)
        if ones + data.count(0) != len(data):
            raise ValueError("sides must be 0 or 1")
        if ones * 2 != len(data):
            raise ValueError(
                f"partition is not balanced: {ones} of {len(data)} in cluster 1"
            )
        object.__setattr__(self, "_sides", data)
        # one bit per element; distance is then a single xor + popcount
        object.__setattr__(self, "_packed", int.from_bytes(data, "little"))

    def __setattr__(self, *a):  # immutability
        raise AttributeError("Partition is immutable")

    @classmethod
    def default(cls, n: int) -> "Partition":
        """First half in cluster 0, second half in cluster 1."""
        _check_n(n)
        return cls(bytes([0] * (n // 2) + [1] * (n // 2)))

    @property
    def n(self) -> int:
        return len(self._sides)

    @property
    def sides(self) -> bytes:
        return self._sides

    def side(self, v: ElementId) -> int:
        return self._sides[v]

    def crosses(self, u: ElementId, v: ElementId) -> bool:
        """True when ``u`` and ``v`` sit in different clusters."""
        return self._sides[u] != self._sides[v]

    def cluster(self, side: int) -> tuple[ElementId, ...]:
        return tuple(v for v, b in enumerate(self._sides) if b == side)

    def dist(self, other: "Partition") -> int:
        return dist(self, other)

    def __eq__(self, other) -> bool:
        return isinstance(other, Partition) and self._sides == other._sides

    def __hash__(self) -> int:
        return hash(self._sides)

    def __repr__(self) -> str:
        return f"Partition({list(self._sides)!r})"


def dist(p: Partition, q: Partition) -> int:
    """Number of elements whose cluster differs between ``p`` and ``q``.

    This is the reorganization cost of moving from ``p`` to ``q``; it is
    always even for balanced partitions.
    """
    if p.n != q.n:
        raise ValueError("partitions over different ground sets")
    return (p._packed ^ q._packed).bit_count()


@dataclass(frozen=True)
class MergeEvent:
    """Two components joined by a request.

    ``step`` is the 1-based index of the request within the run (intra-
    component requests advance it too).  ``crossed`` records whether the
    request endpoints sat in different clusters when served; it is None
    when the merge was ingested without partition context.
    """

    step: int
    a: ComponentId
    b: ComponentId
    merged: ComponentId
    size_a: int
    size_b: int
    crossed: Optional[bool] = None

    @property
    def size(self) -> int:
        return self.size_a + self.size_b


class Component:
    """One connected component: an id and its member elements.

    Treat instances as immutable records; ``size`` is fixed at creation.
    """

    __slots__ = ("cid", "members", "size")

    def __init__(self, cid: ComponentId, members: tuple[ElementId, ...]):
        self.cid = cid
        self.members = members
        self.size = len(members)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Component)
            and self.cid == other.cid
            and self.members == other.members
        )

    def __hash__(self) -> int:
        return hash((self.cid, self.members))

    def __repr__(self) -> str:
        return f"Component({self.cid!r}, {self.members!r})"


class ComponentSet:
    """Immutable snapshot of the current components."""

    __slots__ = ("_comps", "_n", "_canon")

    def __init__(self, comps: Sequence[Component]):
        self._comps = {c.cid: c for c in comps}
        self._n = sum(c.size for c in comps)
        self._canon: Optional[list[Component]] = None

    @classmethod
    def _of(cls, comps: Sequence[Component], n: int) -> "ComponentSet":
        """Internal fast path for trusted callers that already know n."""
        cs = object.__new__(cls)
        cs._comps = {c.cid: c for c in comps}
        cs._n = n
        cs._canon = None
        return cs

    @property
    def n(self) -> int:
        return self._n

    def __len__(self) -> int:
        return len(self._comps)

    def __iter__(self) -> Iterator[Component]:
        return iter(self._comps.values())

    def __getitem__(self, cid: ComponentId) -> Component:
        return self._comps[cid]

    def ids(self) -> list[ComponentId]:
        return sorted(self._comps)

    def sizes(self) -> list[int]:
        """Component sizes, sorted descending (multiset view)."""
        return sorted((c.size for c in self._comps.values()), reverse=True)

    def size_counts(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for c in self._comps.values():
            out[c.size] = out.get(c.size, 0) + 1
        return out

    @classmethod
    def singletons(cls, n: int) -> "ComponentSet":
        _check_n(n)
        return cls([Component(v, (v,)) for v in range(n)])

    @classmethod
    def from_sizes(cls, sizes: Sequence[int]) -> "ComponentSet":
        """Build a component set with the given sizes over ``0..sum-1``
        (members assigned consecutively; handy for oracle queries)."""
        comps = []
        v = 0
        for cid, s in enumerate(sizes):
            comps.append(Component(cid, tuple(range(v, v + s))))
            v += s
        return cls(comps)


class ComponentTracker:
    """Epoch-scoped union-find over ``0..n-1`` with merge reporting.

    Singleton components carry their element id as component id; merged
    components get fresh ids from a counter that never repeats within a
    run, so merge events are unambiguous.  ``reset_epoch`` drops all edges.
    """

    def __init__(self, n: int):
        _check_n(n)
        self.n = n
        self._next_cid = n
        self.requests_seen = 0
        self.reset_epoch()

    def reset_epoch(self) -> None:
        """Forget all requests: every element is its own component again."""
        n = self.n
        self._parent = list(range(n))
        self._rank = [0] * n
        self._root_cid = list(range(n))  # root element -> component id
        self._members: dict[ComponentId, list[ElementId]] = {
            v: [v] for v in range(n)
        }
        self._size_counts: dict[int, int] = {1: n}
        self.component_count = n
        # memoized Component per live cid; a cid's member list never
        # changes while the cid is live (merges mint a fresh id), so
        # entries only ever need dropping, never refreshing
        self._comp_cache: dict[ComponentId, Component] = {}
        self._set_cache: Optional[ComponentSet] = None

    def _find(self, v: ElementId) -> ElementId:
        parent = self._parent
        root = v
        while parent[root] != root:
            root = parent[root]
        while parent[v] != root:  # path compression
            parent[v], v = root, parent[v]
        return root

    def component_of(self, v: ElementId) -> ComponentId:
        return self._root_cid[self._find(v)]

    def size_of_component(self, cid: ComponentId) -> int:
        return len(self._members[cid])

    def members_of(self, cid: ComponentId) -> Sequence[ElementId]:
        """Live member list; treat as read-only."""
        return self._members[cid]

    def size_counts(self) -> Mapping[int, int]:
        """Live mapping size -> number of components of that size."""
        return self._size_counts

    def ingest(self, u: ElementId, v: ElementId) -> Optional[MergeEvent]:
        """Fold one request; returns the merge event, or None when ``u`` and
        ``v`` already share a component."""
        if u == v:
            raise ValueError("request endpoints must differ")
        self.requests_seen += 1
        ru, rv = self._find(u), self._find(v)
        if ru == rv:
            return None
        cu, cv = self._root_cid[ru], self._root_cid[rv]
        mu, mv = self._members[cu], self._members[cv]
        size_u, size_v = len(mu), len(mv)
        if self._rank[ru] < self._rank[rv]:
            ru, rv = rv, ru
        self._parent[rv] = ru
        if self._rank[ru] == self._rank[rv]:
            self._rank[ru] += 1
        cid = self._next_cid
        self._next_cid += 1
        if size_u >= size_v:
            mu.extend(mv)
            merged = mu
        else:
            mv.extend(mu)
            merged = mv
        del self._members[cu], self._members[cv]
        self._members[cid] = merged
        self._root_cid[ru] = cid
        self._comp_cache.pop(cu, None)
        self._comp_cache.pop(cv, None)
        self._set_cache = None
        sc = self._size_counts
        for s in (size_u, size_v):
            sc[s] -= 1
            if sc[s] == 0:
                del sc[s]
        sc[size_u + size_v] = sc.get(size_u + size_v, 0) + 1
        self.component_count -= 1
        return MergeEvent(self.requests_seen, cu, cv, cid, size_u, size_v)

    def component_set(self) -> ComponentSet:
        """Immutable snapshot of the live components."""
        if self._set_cache is not None:
            return self._set_cache
        cache = self._comp_cache
        comps = []
        for cid, m in self._members.items():
            c = cache.get(cid)
            if c is None:
                c = Component(cid, tuple(m))
                cache[cid] = c
            comps.append(c)
        snap = ComponentSet._of(comps, self.n)
        self._set_cache = snap
        return snap

    def items(self) -> Iterable[tuple[ComponentId, list[ElementId]]]:
        return self._members.items()


def ingest_request(
    tracker: ComponentTracker, u: ElementId, v: ElementId, p_prev: Partition
) -> tuple[int, Optional[MergeEvent]]:
    """Serve one request against ``p_prev`` and fold it into the tracker.

    Returns ``(service_cost, merge_event)``: service cost is 1 exactly
    when the endpoints straddle the cut of ``p_prev``.  Intra-component
    requests produce no event (and cost 0 under any component-preserving
    partition).
    """
    crossed = p_prev.crosses(u, v)
    event = tracker.ingest(u, v)
    if event is not None:
        event = replace(event, crossed=crossed)
    return (1 if crossed else 0), event
