"""Persistent clique partitions via complete linkage, with tie-safe variant.

Standard complete linkage merges a cluster pair the moment the edge stream
saturates their cross-pair count.  With tied distances the result depends on
the processing order.  The conservative variant defers: after every batch of
equal-distance edges it merges a connected component of the cluster graph
only when the component is a clique (all pairs saturated), repeating until no
component merges.  That keeps every block's diameter bounded by the current
scale and makes the partition independent of vertex labelling.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import IO, Iterable, Iterator, NamedTuple

import numpy as np

from qrips.metric import DistanceMatrix, Edge, SortedEdgeList, format_float

#: Components at most this large use the direct all-pairs clique test; larger
#: ones fall back to the adjacency-degree count (equivalent, linear in the
#: component's saturated adjacency).
DEFAULT_CLIQUE_PAIRWISE_CAP = 10_000


class UnionFind:
    """Disjoint sets with path compression and caller-directed unions.

    The merge algorithms pick the surviving root themselves, so there is no
    union-by-rank; compression keeps finds cheap regardless.
    """

    def __init__(self, n: int) -> None:
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        parent = self.parent
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union_into(self, loser: int, winner: int) -> None:
        """Point loser's root at winner's root (winner stays the root)."""
        rl, rw = self.find(loser), self.find(winner)
        if rl == rw:
            raise ValueError("union of a class with itself")
        self.parent[rl] = rw


class MergeEvent(NamedTuple):
    winner: int
    loser: int
    dist: float


@dataclass(frozen=True)
class MergeHistory:
    """Sequence of merges with nondecreasing distances over n points."""

    n: int
    events: tuple[MergeEvent, ...]


@dataclass(frozen=True)
class Partition:
    """Disjoint nonempty blocks covering range(n), in canonical order.

    Blocks are sorted tuples ordered by their minimum element, so two equal
    partitions compare equal and index positions are reproducible.
    """

    n: int
    blocks: tuple[tuple[int, ...], ...]

    @staticmethod
    def from_blocks(n: int, blocks: Iterable[Iterable[int]]) -> Partition:
        canon = sorted(tuple(sorted(set(b))) for b in blocks)
        seen: set[int] = set()
        for b in canon:
            if not b:
                raise ValueError("partition contains an empty block")
            if seen & set(b):
                raise ValueError("partition blocks are not disjoint")
            seen.update(b)
        if seen != set(range(n)):
            raise ValueError("partition does not cover range(n)")
        return Partition(n, tuple(canon))

    def block_of(self) -> list[int]:
        """Element -> block index lookup table."""
        out = [0] * self.n
        for bi, block in enumerate(self.blocks):
            for x in block:
                out[x] = bi
        return out

    def as_sets(self) -> tuple[frozenset[int], ...]:
        return tuple(frozenset(b) for b in self.blocks)


def singleton_partition(n: int) -> Partition:
    return Partition(n, tuple((i,) for i in range(n)))


def _check_endpoint(x: int, n: int) -> None:
    if not 0 <= x < n:
        raise ValueError(f"edge endpoint {x} out of range for {n} points")


def complete_linkage(n: int, e: SortedEdgeList) -> MergeHistory:
    """Standard (greedy) complete linkage over a sorted edge stream.

    A pair of clusters merges exactly when the edge just processed saturates
    their inter-cluster edge count; the surviving root is the one with more
    distinct cluster neighbors (ties to the lower index).
    """
    uf = UnionFind(n)
    size = [1] * n
    edges: list[dict[int, int]] = [dict() for _ in range(n)]
    events: list[MergeEvent] = []
    for u, v, d in e.edges:
        _check_endpoint(u, n)
        _check_endpoint(v, n)
        ru, rv = uf.find(u), uf.find(v)
        if ru == rv:
            continue
        count = edges[ru].get(rv, 0) + 1
        edges[ru][rv] = count
        edges[rv][ru] = count
        if count != size[ru] * size[rv]:
            continue
        if len(edges[ru]) != len(edges[rv]):
            w, l = (ru, rv) if len(edges[ru]) > len(edges[rv]) else (rv, ru)
        else:
            w, l = (ru, rv) if ru < rv else (rv, ru)
        uf.union_into(l, w)
        size[w] += size[l]
        del edges[w][l]
        del edges[l][w]
        for nbr, cnt in edges[l].items():
            edges[w][nbr] = edges[w].get(nbr, 0) + cnt
            edges[nbr][w] = edges[w][nbr]
            del edges[nbr][l]
        edges[l] = {}
        events.append(MergeEvent(w, l, d))
    return MergeHistory(n, tuple(events))


class ConservativeLinkage:
    """Streaming engine for conservative complete linkage.

    Feed edges in nondecreasing distance order; call :meth:`contractions`
    once per batch of equal distances.  It yields ``(winner, loser, dist)``
    merge events, iterating until no clique component remains, and records
    them in :attr:`events`.
    """

    def __init__(self, n: int, clique_pairwise_cap: int = DEFAULT_CLIQUE_PAIRWISE_CAP) -> None:
        self.n = n
        self.uf = UnionFind(n)
        self.size = [1] * n
        # edges[r]: neighbor root -> cross-pair count; sat[r]: saturated neighbors
        self.edges: list[dict[int, int]] = [dict() for _ in range(n)]
        self.sat: list[set[int]] = [set() for _ in range(n)]
        self._pending: set[int] = set()
        self.events: list[MergeEvent] = []
        self.clique_pairwise_cap = clique_pairwise_cap

    def add_edge(self, u: int, v: int, d: float) -> None:
        _check_endpoint(u, self.n)
        _check_endpoint(v, self.n)
        ru, rv = self.uf.find(u), self.uf.find(v)
        if ru == rv:
            return
        count = self.edges[ru].get(rv, 0) + 1
        self.edges[ru][rv] = count
        self.edges[rv][ru] = count
        if count == self.size[ru] * self.size[rv]:
            self.sat[ru].add(rv)
            self.sat[rv].add(ru)
            self._pending.add(ru)
            self._pending.add(rv)

    def contractions(self, d: float) -> Iterator[MergeEvent]:
        """Merge every clique component of the cluster graph, to fixpoint.

        Only roots whose saturated adjacency changed since the last call can
        belong to a component whose clique status changed, so the scan is
        restricted to those; the output equals a full rebuild of the graph.
        """
        while self._pending:
            candidates = sorted(self._pending)
            self._pending.clear()
            merged = False
            seen: set[int] = set()
            for root in candidates:
                root = self.uf.find(root)
                if root in seen:
                    continue
                if not self.sat[root]:
                    seen.add(root)
                    continue
                component = self._component(root)
                seen |= component
                if self._is_clique(component):
                    yield from self._merge_component(component, d)
                    merged = True
            if not merged:
                break

    def partition(self) -> Partition:
        blocks: dict[int, list[int]] = {}
        for x in range(self.n):
            blocks.setdefault(self.uf.find(x), []).append(x)
        return Partition.from_blocks(self.n, blocks.values())

    def _component(self, root: int) -> set[int]:
        component = {root}
        stack = [root]
        while stack:
            a = stack.pop()
            for b in self.sat[a]:
                if b not in component:
                    component.add(b)
                    stack.append(b)
        return component

    def _is_clique(self, component: set[int]) -> bool:
        m = len(component)
        if m <= self.clique_pairwise_cap:
            members = sorted(component)
            for i, a in enumerate(members):
                sat_a = self.sat[a]
                for b in members[i + 1 :]:
                    if b not in sat_a:
                        return False
            return True
        # degree count over saturated adjacency: a component is a clique iff
        # the saturated degrees sum to m * (m - 1)
        return sum(len(self.sat[a]) for a in component) == m * (m - 1)

    def _merge_component(self, component: set[int], d: float) -> Iterator[MergeEvent]:
        members = sorted(component)
        best = max(self.size[a] for a in members)
        winner = next(a for a in members if self.size[a] == best)
        for loser in members:
            if loser == winner:
                continue
            event = MergeEvent(winner, loser, d)
            self.events.append(event)
            self._absorb(winner, loser)
            yield event

    def _absorb(self, w: int, l: int) -> None:
        edges, sat, size = self.edges, self.sat, self.size
        self.uf.union_into(l, w)
        edges[l].pop(w, None)
        edges[w].pop(l, None)
        sat[w].discard(l)
        for nbr, cnt in edges[l].items():
            if nbr in sat[l]:
                sat[nbr].discard(l)
                self._pending.add(nbr)
            del edges[nbr][l]
            total = edges[w].get(nbr, 0) + cnt
            edges[w][nbr] = total
            edges[nbr][w] = total
        edges[l] = {}
        sat[l] = set()
        size[w] += size[l]
        # cluster sizes changed, so every pair at w needs its saturation redone
        for nbr, cnt in edges[w].items():
            now = cnt == size[w] * size[nbr]
            was = nbr in sat[w]
            if now and not was:
                sat[w].add(nbr)
                sat[nbr].add(w)
                self._pending.add(w)
                self._pending.add(nbr)
            elif was and not now:
                sat[w].discard(nbr)
                sat[nbr].discard(w)
                self._pending.add(w)
                self._pending.add(nbr)


def conservative_complete_linkage(n: int, e: SortedEdgeList) -> MergeHistory:
    """Tie-safe complete linkage: merge clique components per distance batch."""
    engine = ConservativeLinkage(n)
    edges = e.edges
    for i, (u, v, d) in enumerate(edges):
        engine.add_edge(u, v, d)
        if i + 1 == len(edges) or edges[i + 1].dist != d:
            for _ in engine.contractions(d):
                pass
    return MergeHistory(n, tuple(engine.events))


def partition_at(h: MergeHistory, r: float) -> Partition:
    """Blocks of the merge forest restricted to events with dist <= r."""
    uf = UnionFind(h.n)
    for w, l, d in h.events:
        if d <= r:
            if uf.find(w) != uf.find(l):
                uf.union_into(l, w)
    blocks: dict[int, list[int]] = {}
    for x in range(h.n):
        blocks.setdefault(uf.find(x), []).append(x)
    return Partition.from_blocks(h.n, blocks.values())


def block_diameter(b: Iterable[int], dm: DistanceMatrix) -> float:
    """Max pairwise distance within a block; 0 for singletons."""
    idx = np.fromiter(b, dtype=np.intp)
    if idx.size == 0:
        raise ValueError("block is empty")
    if idx.size == 1:
        return 0.0
    return float(dm.values[np.ix_(idx, idx)].max())


def write_merge_history(h: MergeHistory, sink: IO[str]) -> None:
    """Text lines "winner loser dist" in event order."""
    sink.write(f"n {h.n}\n")
    for w, l, d in h.events:
        sink.write(f"{w} {l} {format_float(d)}\n")


def read_merge_history(source: IO[str] | str) -> MergeHistory:
    text = source if isinstance(source, str) else source.read()
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("n "):
        raise ValueError("merge history must start with an 'n <count>' header")
    n = int(lines[0].split()[1])
    events = []
    for ln in lines[1:]:
        w, l, d = ln.split()
        events.append(MergeEvent(int(w), int(l), float(d)))
    return MergeHistory(n, tuple(events))
