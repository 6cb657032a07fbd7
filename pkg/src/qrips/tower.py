"""Filtered 1-skeletons: replace cluster contractions by cone edges.

The sequence of quotient complexes forms a tower (inclusions interleaved with
vertex contractions).  Because every complex involved is a flag complex, the
whole tower is captured by a weighted graph: each contraction is replaced by
coning the smaller active star into the survivor, which preserves barcodes.
The output graph is the 1-skeleton of an honest filtration.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import IO

from qrips.linkage import ConservativeLinkage, UnionFind
from qrips.metric import SortedEdgeList, format_float


@dataclass(frozen=True)
class FilteredGraph:
    """Weighted graph of edge birth times over the original vertex set.

    Vertices all have birth 0; deactivated vertices stay in the vertex set
    (their stars were coned, the flag persistence handles the domination).
    Edges are listed in recording order with nondecreasing births and no
    duplicate pairs: the first birth wins.
    """

    n: int
    edges: tuple[tuple[int, int, float], ...]


class Skeleton:
    """Mutable 1-skeleton under edge insertions and vertex contractions.

    Edge births must arrive in nondecreasing order.  Insertions between
    vertices already identified are dropped; re-insertions keep the original
    birth time.
    """

    def __init__(self, n: int) -> None:
        self.n = n
        self.uf = UnionFind(n)
        self.active: set[int] = set(range(n))
        self.adj: list[dict[int, float]] = [dict() for _ in range(n)]
        self.recorded: list[tuple[int, int, float]] = []

    def add_edge(self, u: int, v: int, d: float) -> None:
        if not (0 <= u < self.n and 0 <= v < self.n):
            raise ValueError(f"edge ({u}, {v}) out of range for {self.n} vertices")
        ru, rv = self.uf.find(u), self.uf.find(v)
        if ru == rv:
            return
        self._record(ru, rv, d)

    def _record(self, a: int, b: int, d: float) -> None:
        if b in self.adj[a]:
            return  # births are nondecreasing, the existing one is earlier
        self.adj[a][b] = d
        self.adj[b][a] = d
        self.recorded.append((min(a, b), max(a, b), d))

    def contract(self, u: int, v: int, d: float) -> None:
        """Identify the classes of u and v, coning the smaller active star.

        Every active neighbor of the losing representative gets an edge to
        the survivor born at the contraction distance unless an earlier edge
        exists.  On star-size ties the lower index survives.
        """
        ru, rv = self.uf.find(u), self.uf.find(v)
        if ru == rv:
            raise ValueError(f"contraction of ({u}, {v}) collapses a single class")
        if ru not in self.active or rv not in self.active:
            raise ValueError(f"contraction of inactive representative ({ru}, {rv})")
        star_u = {w for w in self.adj[ru] if w in self.active}
        star_v = {w for w in self.adj[rv] if w in self.active}
        if len(star_u) > len(star_v):
            survivor, loser, star = ru, rv, star_v
        elif len(star_v) > len(star_u):
            survivor, loser, star = rv, ru, star_u
        elif ru < rv:
            survivor, loser, star = ru, rv, star_v
        else:
            survivor, loser, star = rv, ru, star_u
        for w in sorted(star):
            if w != survivor:
                self._record(survivor, w, d)
        self.active.remove(loser)
        self.uf.union_into(loser, survivor)

    def graph(self) -> FilteredGraph:
        return FilteredGraph(self.n, tuple(self.recorded))


def build_filtered_skeleton(n: int, e: SortedEdgeList) -> FilteredGraph:
    """Run the full tower-to-filtration pipeline over a sorted edge stream.

    Each edge feeds both the conservative-linkage state and the skeleton; at
    the end of every batch of equal distances the linkage's merges are applied
    as skeleton contractions at the batch distance.
    """
    linkage = ConservativeLinkage(n)
    skeleton = Skeleton(n)
    edges = e.edges
    for i, (u, v, d) in enumerate(edges):
        linkage.add_edge(u, v, d)
        skeleton.add_edge(u, v, d)
        if i + 1 == len(edges) or edges[i + 1].dist != d:
            for winner, loser, dc in linkage.contractions(d):
                skeleton.contract(winner, loser, dc)
    return skeleton.graph()


def write_filtered_graph(g: FilteredGraph, sink: IO[str]) -> None:
    """Header "n <count>" then "u v birth" lines in recording order."""
    sink.write(f"n {g.n}\n")
    for u, v, birth in g.edges:
        sink.write(f"{u} {v} {format_float(birth)}\n")


def read_filtered_graph(source: IO[str] | str) -> FilteredGraph:
    text = source if isinstance(source, str) else source.read()
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("n "):
        raise ValueError("filtered graph must start with an 'n <count>' header")
    n = int(lines[0].split()[1])
    edges = []
    for ln in lines[1:]:
        u, v, birth = ln.split()
        edges.append((int(u), int(v), float(birth)))
    return FilteredGraph(n, tuple(edges))


def write_sparse_distances(g: FilteredGraph, sink: IO[str]) -> None:
    """Whitespace "i j d" lines, 0-based; the sparse flag-complex input format."""
    for u, v, birth in g.edges:
        sink.write(f"{u} {v} {format_float(birth)}\n")
