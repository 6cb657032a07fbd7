"""Small-instance cover lab: nerves, co-nerves, quotients, refinements.

Everything here is exhaustive by design and capped to small universes; the
module exists to check interleaving-by-refinement facts exactly, not to run
in the pipeline.  Complexes are stored as explicit downward-closed simplex
sets so equality of constructions is literal set equality.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import IO, Iterable

from qrips.linkage import Partition
from qrips.metric import DistanceMatrix

DEFAULT_SMALL_CAP = 15


class SmallInstanceLimit(ValueError):
    """Raised when an exhaustive construction exceeds the configured cap."""


@dataclass(frozen=True)
class Cover:
    """Indexed family of nonempty subsets of range(universe_size), union = all."""

    universe_size: int
    sets: tuple[frozenset[int], ...]

    def __post_init__(self) -> None:
        covered: set[int] = set()
        for s in self.sets:
            if not s:
                raise ValueError("cover contains an empty set")
            if min(s) < 0 or max(s) >= self.universe_size:
                raise ValueError("cover set exceeds the universe")
            covered |= s
        if covered != set(range(self.universe_size)):
            raise ValueError("cover does not cover the universe")


@dataclass(frozen=True)
class BinaryRelation:
    """Subset of range(nx) x range(ny) as an explicit pair set."""

    nx: int
    ny: int
    pairs: frozenset[tuple[int, int]]


@dataclass(frozen=True)
class SimplicialComplex:
    """Downward-closed set of sorted vertex tuples, tracked up to max_dim."""

    vertex_count: int
    max_dim: int
    simplices: frozenset[tuple[int, ...]]

    def in_dim(self, d: int) -> list[tuple[int, ...]]:
        return sorted(s for s in self.simplices if len(s) == d + 1)

    def counts(self) -> list[int]:
        out = [0] * (self.max_dim + 1)
        for s in self.simplices:
            out[len(s) - 1] += 1
        return out

    def dimension(self) -> int:
        return max((len(s) - 1 for s in self.simplices), default=-1)


@dataclass(frozen=True)
class RefinementMap:
    """assignment[j] = index of a containing coarse set for fine set j."""

    assignment: tuple[int, ...]


def _close_downward(faces: Iterable[tuple[int, ...]], max_dim: int) -> frozenset[tuple[int, ...]]:
    closed: set[tuple[int, ...]] = set()
    stack = [s for s in faces if len(s) - 1 <= max_dim]
    while stack:
        s = stack.pop()
        if s in closed or not s:
            continue
        closed.add(s)
        if len(s) > 1:
            stack.extend(combinations(s, len(s) - 1))
    return frozenset(closed)


def _cap_check(*sizes: int, cap: int) -> None:
    for s in sizes:
        if s > cap:
            raise SmallInstanceLimit(
                f"instance size {s} exceeds the small-instance cap {cap}"
            )


def nerve(c: Cover, max_dim: int | None = None, cap: int = DEFAULT_SMALL_CAP) -> SimplicialComplex:
    """Index subsets whose member sets share a common point."""
    _cap_check(c.universe_size, len(c.sets), cap=cap)
    k = len(c.sets)
    if max_dim is None:
        max_dim = k - 1
    simplices: set[tuple[int, ...]] = set()
    for size in range(1, min(max_dim + 1, k) + 1):
        for idxs in combinations(range(k), size):
            common = frozenset.intersection(*(c.sets[i] for i in idxs))
            if common:
                simplices.add(idxs)
    return SimplicialComplex(k, max_dim, frozenset(simplices))


def conerve(c: Cover, max_dim: int | None = None, cap: int = DEFAULT_SMALL_CAP) -> SimplicialComplex:
    """Subsets of the universe contained in at least one cover set."""
    _cap_check(c.universe_size, len(c.sets), cap=cap)
    if max_dim is None:
        max_dim = c.universe_size - 1
    simplices: set[tuple[int, ...]] = set()
    for s in c.sets:
        members = sorted(s)
        for size in range(1, min(max_dim + 1, len(members)) + 1):
            simplices.update(combinations(members, size))
    return SimplicialComplex(c.universe_size, max_dim, frozenset(simplices))


def dowker_pair(
    r: BinaryRelation, max_dim: int | None = None, cap: int = DEFAULT_SMALL_CAP
) -> tuple[SimplicialComplex, SimplicialComplex]:
    """The two complexes of a relation: witnessed subsets of X and of Y."""
    _cap_check(r.nx, r.ny, cap=cap)
    rows = [frozenset(y for x2, y in r.pairs if x2 == x) for x in range(r.nx)]
    cols = [frozenset(x for x, y2 in r.pairs if y2 == y) for y in range(r.ny)]
    dim_x = r.nx - 1 if max_dim is None else max_dim
    dim_y = r.ny - 1 if max_dim is None else max_dim
    cx: set[tuple[int, ...]] = set()
    for y in range(r.ny):
        members = sorted(cols[y])
        for size in range(1, min(dim_x + 1, len(members)) + 1):
            cx.update(combinations(members, size))
    cy: set[tuple[int, ...]] = set()
    for x in range(r.nx):
        members = sorted(rows[x])
        for size in range(1, min(dim_y + 1, len(members)) + 1):
            cy.update(combinations(members, size))
    return (
        SimplicialComplex(r.nx, dim_x, frozenset(cx)),
        SimplicialComplex(r.ny, dim_y, frozenset(cy)),
    )


def inclusion_relation(c: Cover) -> BinaryRelation:
    """(x, i) related iff x lies in the i-th cover set."""
    pairs = frozenset(
        (x, i) for i, s in enumerate(c.sets) for x in s
    )
    return BinaryRelation(c.universe_size, len(c.sets), pairs)


def ball_cover(dm: DistanceMatrix, r: float) -> Cover:
    """One set per center: all points within distance r of it."""
    if r < 0:
        raise ValueError("radius must be nonnegative")
    vals = dm.values
    sets = tuple(
        frozenset(int(y) for y in range(dm.n) if vals[x, y] <= r) for x in range(dm.n)
    )
    return Cover(dm.n, sets)


def maximal_clique_cover(dm: DistanceMatrix, r: float, cap: int = DEFAULT_SMALL_CAP) -> Cover:
    """Maximal cliques of the distance-threshold graph (= maximal diameter-r sets).

    Enumeration is branch-and-bound with pivoting, so isolated vertices come
    out as singleton cliques and the result is a genuine cover.
    """
    _cap_check(dm.n, cap=cap)
    n = dm.n
    vals = dm.values
    adj = [set() for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if vals[i, j] <= r:
                adj[i].add(j)
                adj[j].add(i)
    cliques: list[frozenset[int]] = []

    def expand(current: set[int], candidates: set[int], excluded: set[int]) -> None:
        if not candidates and not excluded:
            cliques.append(frozenset(current))
            return
        pivot = max(candidates | excluded, key=lambda p: len(adj[p] & candidates))
        for v in sorted(candidates - adj[pivot]):
            expand(current | {v}, candidates & adj[v], excluded & adj[v])
            candidates = candidates - {v}
            excluded = excluded | {v}

    expand(set(), set(range(n)), set())
    return Cover(n, tuple(sorted(cliques, key=sorted)))


def quotient_cover_space(c: Cover, p: Partition) -> Cover:
    """Cover of the block set: each set becomes the blocks it meets."""
    if p.n != c.universe_size:
        raise ValueError("partition does not match the cover universe")
    block_of = p.block_of()
    sets = tuple(frozenset(block_of[x] for x in s) for s in c.sets)
    return Cover(len(p.blocks), sets)


def quotient_cover_index(c: Cover, p: Partition) -> Cover:
    """Union the cover sets over each index block; one set per block."""
    if p.n != len(c.sets):
        raise ValueError("index partition does not match the cover's index set")
    sets = tuple(
        frozenset().union(*(c.sets[i] for i in block)) for block in p.blocks
    )
    return Cover(c.universe_size, sets)


def pullback_cover(c_on_quotient: Cover, p: Partition) -> Cover:
    """Replace each block id by its members; index set unchanged."""
    if c_on_quotient.universe_size != len(p.blocks):
        raise ValueError("cover universe does not match the partition's block count")
    sets = tuple(
        frozenset(x for b in s for x in p.blocks[b]) for s in c_on_quotient.sets
    )
    return Cover(p.n, sets)


def saturate_cover(c: Cover, p: Partition) -> Cover:
    """Union of all blocks meeting each set (pullback of the space quotient)."""
    return pullback_cover(quotient_cover_space(c, p), p)


def quotient_complex(k: SimplicialComplex, p: Partition) -> SimplicialComplex:
    """Image of every simplex under the block projection (vertices collapse)."""
    if p.n != k.vertex_count:
        raise ValueError("partition does not match the complex's vertex set")
    block_of = p.block_of()
    simplices = frozenset(
        tuple(sorted(set(block_of[v] for v in s))) for s in k.simplices
    )
    return SimplicialComplex(len(p.blocks), k.max_dim, simplices)


def find_refinement(v: Cover, u: Cover) -> RefinementMap | None:
    """Witness that v refines u: lowest-index container per set, or None.

    Any two refinement maps between the same covers are contiguous, so the
    tie-break is immaterial for every homology-level consequence.
    """
    if v.universe_size != u.universe_size:
        raise ValueError("covers live on different universes")
    assignment = []
    for vj in v.sets:
        for i, ui in enumerate(u.sets):
            if vj <= ui:
                assignment.append(i)
                break
        else:
            return None
    return RefinementMap(tuple(assignment))


def is_refinement(f: RefinementMap, v: Cover, u: Cover) -> bool:
    return len(f.assignment) == len(v.sets) and all(
        vj <= u.sets[f.assignment[j]] for j, vj in enumerate(v.sets)
    )


def contiguous(f: RefinementMap, g: RefinementMap, u: Cover) -> bool:
    """True iff the assigned coarse sets intersect pairwise per index."""
    if len(f.assignment) != len(g.assignment):
        raise ValueError("refinement maps have different sources")
    return all(
        bool(u.sets[fi] & u.sets[gi])
        for fi, gi in zip(f.assignment, g.assignment)
    )


def write_cover(c: Cover, sink: IO[str]) -> None:
    """Golden-test serialization: one set per line, sorted indices and lines."""
    lines = sorted(" ".join(str(x) for x in sorted(s)) for s in c.sets)
    sink.write(f"universe {c.universe_size}\n")
    for line in lines:
        sink.write(line + "\n")


def write_complex(k: SimplicialComplex, sink: IO[str]) -> None:
    lines = sorted(" ".join(str(v) for v in s) for s in k.simplices)
    sink.write(f"vertices {k.vertex_count}\n")
    for line in lines:
        sink.write(line + "\n")
