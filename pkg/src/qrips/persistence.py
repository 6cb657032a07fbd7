"""Z/2 persistent homology of flag filtrations, Betti numbers, bottleneck.

The reducer is the standard column algorithm with the clearing optimization,
columns packed into Python integers per dimension.  It is deliberately
desk-scale: the pipeline's whole point is that the quotient skeleton it
receives is small.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import IO, Iterable, Sequence

import numpy as np

from qrips.covers import SimplicialComplex
from qrips.metric import DistanceMatrix, format_float
from qrips.tower import FilteredGraph

INF = math.inf


class FiltrationError(ValueError):
    """A simplex appears before one of its faces."""


@dataclass(frozen=True)
class FilteredComplex:
    """Simplices as (vertices, birth, dim), sorted by (birth, dim, lex)."""

    simplices: tuple[tuple[tuple[int, ...], float, int], ...]

    @staticmethod
    def from_simplices(items: Iterable[tuple[tuple[int, ...], float]]) -> FilteredComplex:
        triples = [(tuple(v), float(b), len(v) - 1) for v, b in items]
        triples.sort(key=lambda t: (t[1], t[2], t[0]))
        return FilteredComplex(tuple(triples))

    def counts(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for _, _, dim in self.simplices:
            out[dim] = out.get(dim, 0) + 1
        return out


@dataclass(frozen=True)
class Barcode:
    """Multiset of (degree, birth, death) with death possibly infinite."""

    intervals: tuple[tuple[int, float, float], ...]

    def in_degree(self, k: int) -> tuple[tuple[float, float], ...]:
        return tuple((b, d) for deg, b, d in self.intervals if deg == k)

    def degrees(self) -> tuple[int, ...]:
        return tuple(sorted(set(deg for deg, _, _ in self.intervals)))

    def restrict(self, max_degree: int) -> Barcode:
        return Barcode(tuple(iv for iv in self.intervals if iv[0] <= max_degree))


def _flag_expand(
    n: int,
    adj: Sequence[dict[int, float]],
    max_dim: int,
) -> list[tuple[tuple[int, ...], float]]:
    """All cliques up to max_dim+1 vertices with birth = max edge weight."""
    out: list[tuple[tuple[int, ...], float]] = [((v,), 0.0) for v in range(n)]
    if max_dim == 0:
        return out

    def grow(verts: tuple[int, ...], cands: list[int], birth: float) -> None:
        for idx, w in enumerate(cands):
            row = adj[w]
            b = birth
            for x in verts:
                dxw = row[x]
                if dxw > b:
                    b = dxw
            clique = verts + (w,)
            out.append((clique, b))
            if len(clique) <= max_dim:
                deeper = [y for y in cands[idx + 1 :] if y in row]
                if deeper:
                    grow(clique, deeper, b)

    for v in range(n):
        nbrs = sorted(w for w in adj[v] if w > v)
        if nbrs:
            grow((v,), nbrs, 0.0)
    return out


def flag_filtration(g: FilteredGraph, max_dim: int) -> FilteredComplex:
    """Flag complex of a filtered graph: vertices at 0, cliques at max birth."""
    if max_dim < 0:
        raise ValueError("max_dim must be nonnegative")
    adj: list[dict[int, float]] = [dict() for _ in range(g.n)]
    for u, v, birth in g.edges:
        if v not in adj[u]:  # first birth wins
            adj[u][v] = birth
            adj[v][u] = birth
    return FilteredComplex.from_simplices(_flag_expand(g.n, adj, max_dim))


def rips_filtration(dm: DistanceMatrix, threshold: float, max_dim: int, cap: int = 2_000) -> FilteredComplex:
    """Vietoris-Rips filtration: simplex birth = diameter, capped at threshold."""
    if dm.n > cap:
        raise ValueError(f"{dm.n} points exceed the exact Vietoris-Rips cap {cap}")
    vals = dm.values
    adj: list[dict[int, float]] = [dict() for _ in range(dm.n)]
    for i in range(dm.n):
        for j in range(i + 1, dm.n):
            if vals[i, j] <= threshold:
                adj[i][j] = float(vals[i, j])
                adj[j][i] = float(vals[i, j])
    return FilteredComplex.from_simplices(_flag_expand(dm.n, adj, max_dim))


def compute_persistence(fc: FilteredComplex, keep_zero_bars: bool = False) -> Barcode:
    """Barcode of a filtered complex over Z/2.

    One infinite degree-0 bar per final connected component; zero-length bars
    are dropped unless requested.  Raises :class:`FiltrationError` naming the
    first simplex that precedes one of its faces.
    """
    sims = fc.simplices
    index: dict[tuple[int, ...], int] = {}
    for i, (verts, _, _) in enumerate(sims):
        if verts in index:
            raise FiltrationError(f"duplicate simplex {verts}")
        index[verts] = i
    by_dim: dict[int, list[int]] = {}
    for i, (verts, birth, dim) in enumerate(sims):
        by_dim.setdefault(dim, []).append(i)
        if dim > 0:
            for facet in combinations(verts, dim):
                pos = index.get(facet)
                if pos is None or pos >= i:
                    raise FiltrationError(
                        f"simplex {verts} at position {i} precedes its face {facet}"
                    )
    if not sims:
        return Barcode(())
    maxdim = max(by_dim)
    # local row index within the (d-1)-dimensional slice, per dimension
    local: dict[int, dict[tuple[int, ...], int]] = {}
    for d, idxs in by_dim.items():
        local[d] = {sims[i][0]: pos for pos, i in enumerate(idxs)}

    pairs: list[tuple[int, int]] = []  # (row global idx, column global idx)
    killed: set[int] = set()
    negative: set[int] = set()
    for d in range(maxdim, 0, -1):
        rows = by_dim.get(d - 1, [])
        row_of = local[d - 1]
        pivot_col: dict[int, int] = {}
        for j in by_dim.get(d, []):
            if j in killed:
                continue  # cleared: this simplex is a pivot of dimension d+1
            verts = sims[j][0]
            col = 0
            for facet in combinations(verts, d):
                col ^= 1 << row_of[facet]
            while col:
                low = col.bit_length() - 1
                other = pivot_col.get(low)
                if other is None:
                    pivot_col[low] = col
                    break
                col ^= other
            if col:
                negative.add(j)
                low = col.bit_length() - 1
                row_global = rows[low]
                killed.add(row_global)
                pairs.append((row_global, j))
    intervals: list[tuple[int, float, float]] = []
    for i, j in pairs:
        birth = sims[i][1]
        death = sims[j][1]
        if birth != death or keep_zero_bars:
            intervals.append((sims[i][2], birth, death))
    for i, (verts, birth, dim) in enumerate(sims):
        if i not in killed and i not in negative:
            intervals.append((dim, birth, INF))
    intervals.sort(key=lambda iv: (iv[0], iv[1], iv[2]))
    return Barcode(tuple(intervals))


def _gf2_rank(columns: list[int]) -> int:
    pivots: dict[int, int] = {}
    rank = 0
    for col in columns:
        while col:
            low = col.bit_length() - 1
            other = pivots.get(low)
            if other is None:
                pivots[low] = col
                rank += 1
                break
            col ^= other
    return rank


def betti(k: SimplicialComplex) -> tuple[int, ...]:
    """Z/2 Betti numbers via boundary ranks, degrees 0..dim(k)."""
    dim = k.dimension()
    if dim < 0:
        return ()
    by_dim: list[list[tuple[int, ...]]] = [k.in_dim(d) for d in range(dim + 1)]
    pos: list[dict[tuple[int, ...], int]] = [
        {s: i for i, s in enumerate(level)} for level in by_dim
    ]
    ranks = [0] * (dim + 2)  # rank of boundary_d for d in 1..dim
    for d in range(1, dim + 1):
        cols = []
        row_of = pos[d - 1]
        for s in by_dim[d]:
            col = 0
            for facet in combinations(s, d):
                col ^= 1 << row_of[facet]
            cols.append(col)
        ranks[d] = _gf2_rank(cols)
    out = []
    for d in range(dim + 1):
        out.append(len(by_dim[d]) - ranks[d] - ranks[d + 1])
    return tuple(out)


def _abs_diff(x: float, y: float) -> float:
    if x == y:
        return 0.0  # covers matched infinities of the same sign
    if math.isinf(x) or math.isinf(y):
        return INF
    return abs(x - y)


def _match_cost(p: tuple[float, float], q: tuple[float, float]) -> float:
    return max(_abs_diff(p[0], q[0]), _abs_diff(p[1], q[1]))


def _matching_feasible(
    na: int,
    nb: int,
    costs: list[list[float]],
    diag_a: list[float],
    diag_b: list[float],
    c: float,
) -> bool:
    """Perfect matching in the diagonal-augmented bipartite graph at cost c.

    Left = a-bars then nb ghost rows; right = b-bars then na diagonal slots.
    Ghost rows match b-bars with small half-gap or any diagonal slot.
    """
    total = na + nb

    def neighbors(left: int) -> list[int]:
        if left < na:
            out = [j for j in range(nb) if costs[left][j] <= c]
            if diag_a[left] <= c:
                out.extend(range(nb, total))
            return out
        out = [j for j in range(nb) if diag_b[j] <= c]
        out.extend(range(nb, total))
        return out

    match_right: list[int] = [-1] * total

    def try_augment(left: int, seen: list[bool]) -> bool:
        for right in neighbors(left):
            if not seen[right]:
                seen[right] = True
                if match_right[right] == -1 or try_augment(match_right[right], seen):
                    match_right[right] = left
                    return True
        return False

    matched = 0
    for left in range(total):
        if try_augment(left, [False] * total):
            matched += 1
        else:
            return False
    return matched == total


def _bottleneck_points(
    pts_a: list[tuple[float, float]],
    pts_b: list[tuple[float, float]],
    diag_cost,
) -> float:
    """Exact bottleneck between transformed diagrams with a diagonal rule.

    Infinite-death points must pair with each other (sorted by birth, the
    minimax-optimal order on a line); finite points are matched by binary
    search over candidate costs with matching feasibility tests.
    """
    inf_a = sorted(p[0] for p in pts_a if math.isinf(p[1]))
    inf_b = sorted(p[0] for p in pts_b if math.isinf(p[1]))
    if len(inf_a) != len(inf_b):
        return INF
    essential = 0.0
    for x, y in zip(inf_a, inf_b):
        essential = max(essential, _abs_diff(x, y))
    fin_a = [p for p in pts_a if not math.isinf(p[1])]
    fin_b = [p for p in pts_b if not math.isinf(p[1])]
    na, nb = len(fin_a), len(fin_b)
    if na == 0 and nb == 0:
        return essential
    costs = [[_match_cost(p, q) for q in fin_b] for p in fin_a]
    diag_a = [diag_cost(p) for p in fin_a]
    diag_b = [diag_cost(q) for q in fin_b]
    candidates = {0.0}
    candidates.update(v for row in costs for v in row if math.isfinite(v))
    candidates.update(v for v in diag_a if math.isfinite(v))
    candidates.update(v for v in diag_b if math.isfinite(v))
    ordered = sorted(candidates)
    lo, hi = 0, len(ordered) - 1
    if not _matching_feasible(na, nb, costs, diag_a, diag_b, ordered[hi]):
        return INF
    while lo < hi:
        mid = (lo + hi) // 2
        if _matching_feasible(na, nb, costs, diag_a, diag_b, ordered[mid]):
            hi = mid
        else:
            lo = mid + 1
    return max(essential, ordered[lo])


def bottleneck(a: Barcode, b: Barcode, degree: int) -> float:
    """Exact additive bottleneck distance between two barcodes in a degree."""
    pts_a = list(a.in_degree(degree))
    pts_b = list(b.in_degree(degree))

    def diag(p: tuple[float, float]) -> float:
        return (p[1] - p[0]) / 2.0

    return _bottleneck_points(pts_a, pts_b, diag)


def _log_point(p: tuple[float, float]) -> tuple[float, float]:
    b, d = p
    if b < 0 or d < 0:
        raise ValueError("multiplicative comparison needs nonnegative endpoints")
    lb = -INF if b == 0 else math.log(b)
    ld = INF if math.isinf(d) else (-INF if d == 0 else math.log(d))
    return lb, ld


def multiplicative_bottleneck(a: Barcode, b: Barcode, degree: int) -> float:
    """Smallest ratio c such that log-rescaled barcodes are (log c)-matched.

    Endpoints equal to 0 on both sides cost nothing; a 0 against a positive
    endpoint is an infinite ratio; a bar matched to the diagonal costs half
    its log-length.
    """
    pts_a = [_log_point(p) for p in a.in_degree(degree)]
    pts_b = [_log_point(p) for p in b.in_degree(degree)]

    def diag(p: tuple[float, float]) -> float:
        lb, ld = p
        if lb == ld:
            return 0.0
        if math.isinf(lb) or math.isinf(ld):
            return INF
        return (ld - lb) / 2.0

    value = _bottleneck_points(pts_a, pts_b, diag)
    if not math.isfinite(value) or value > 700.0:
        return INF
    return math.exp(value)


def clique_counts(n: int, edges: Iterable[tuple[int, int, float]]) -> tuple[int, int, int]:
    """(vertex, edge, triangle) counts of a graph, via neighbor bitmasks."""
    masks = [0] * n
    edge_count = 0
    for u, v, _ in edges:
        if u == v:
            continue
        if not (masks[u] >> v) & 1:
            masks[u] |= 1 << v
            masks[v] |= 1 << u
            edge_count += 1
    triangles = 0
    for u in range(n):
        mu = masks[u]
        v_bits = mu >> (u + 1)
        v = u + 1
        while v_bits:
            if v_bits & 1:
                # common neighbors of u and v above v, once per triangle
                triangles += ((mu & masks[v]) >> (v + 1)).bit_count()
            v_bits >>= 1
            v += 1
    return n, edge_count, triangles


def write_barcode(bc: Barcode, sink: IO[str]) -> None:
    """Lines "degree birth death" with "inf" for essential classes."""
    for deg, b, d in bc.intervals:
        sink.write(f"{deg} {format_float(b)} {format_float(d)}\n")


def read_barcode(source: IO[str] | str) -> Barcode:
    text = source if isinstance(source, str) else source.read()
    intervals = []
    for ln in text.splitlines():
        if not ln.strip():
            continue
        deg, b, d = ln.split()
        intervals.append((int(deg), float(b), float(d)))
    return Barcode(tuple(intervals))


def euler_characteristic(counts: Iterable[int]) -> int:
    return sum((-1) ** d * c for d, c in enumerate(counts))


def relabel_distance_matrix(dm: DistanceMatrix, perm: Sequence[int]) -> DistanceMatrix:
    """Conjugate the matrix by a vertex permutation (new[i][j] = old[p i][p j])."""
    p = np.asarray(perm, dtype=np.intp)
    return DistanceMatrix(dm.values[np.ix_(p, p)])
