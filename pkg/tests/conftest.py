import math
from itertools import combinations

import numpy as np
import pytest

from qrips.linkage import Partition
from qrips.metric import (
    DistanceMatrix,
    PointCloud,
    load_point_cloud,
    pairwise_distances,
)


@pytest.fixture
def l3() -> DistanceMatrix:
    """Three collinear points at 0, 1, 2: the canonical tie example."""
    return pairwise_distances(load_point_cloud("0\n1\n2\n"))


@pytest.fixture
def sq4() -> DistanceMatrix:
    """Unit-square corners: sides 1, diagonals sqrt(2)."""
    return pairwise_distances(load_point_cloud("0,0\n1,0\n1,1\n0,1\n"))


def random_metric(rng: np.random.Generator, n: int, dim: int) -> DistanceMatrix:
    pts = rng.uniform(0.0, 1.0, size=(n, dim))
    return pairwise_distances(PointCloud(pts))


def grid_metric(rows: int, cols: int) -> DistanceMatrix:
    """Integer grid: heavy exact ties among pairwise distances."""
    pts = np.array([(i, j) for i in range(rows) for j in range(cols)], dtype=float)
    return pairwise_distances(PointCloud(pts))


def critical_scales(dm: DistanceMatrix) -> list[float]:
    vals = dm.values
    out = sorted({float(vals[i, j]) for i in range(dm.n) for j in range(i + 1, dm.n)})
    return out


def random_partition(rng: np.random.Generator, n: int) -> Partition:
    k = int(rng.integers(1, n + 1))
    labels = rng.integers(0, k, size=n)
    blocks: dict[int, list[int]] = {}
    for x, lbl in enumerate(labels):
        blocks.setdefault(int(lbl), []).append(x)
    return Partition.from_blocks(n, blocks.values())


def brute_diameter(block, dm: DistanceMatrix) -> float:
    members = sorted(block)
    best = 0.0
    for i, a in enumerate(members):
        for b in members[i + 1 :]:
            best = max(best, float(dm.values[a, b]))
    return best


def brute_rips_simplices(dm: DistanceMatrix, threshold: float, max_dim: int):
    """Independent oracle: all subsets with diameter <= threshold, by definition."""
    out = {}
    for size in range(1, max_dim + 2):
        for verts in combinations(range(dm.n), size):
            diam = brute_diameter(verts, dm)
            if diam <= threshold:
                out[verts] = diam
    return out


def blocks_as_sets(p: Partition) -> set[frozenset[int]]:
    return {frozenset(b) for b in p.blocks}


def single_linkage_blocks(dm: DistanceMatrix, r: float) -> set[frozenset[int]]:
    """Connected components of the distance-threshold graph (test oracle)."""
    n = dm.n
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i in range(n):
        for j in range(i + 1, n):
            if dm.values[i, j] <= r:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[ri] = rj
    comps: dict[int, set[int]] = {}
    for x in range(n):
        comps.setdefault(find(x), set()).add(x)
    return {frozenset(c) for c in comps.values()}


def assert_barcodes_equal(a, b):
    assert sorted(a.intervals) == sorted(b.intervals)


def naive_reduction_barcode(fc, keep_zero_bars=False):
    """Left-to-right column reduction with no optimizations (test oracle)."""
    sims = fc.simplices
    index = {verts: i for i, (verts, _, _) in enumerate(sims)}
    m = len(sims)
    cols = []
    for verts, _, dim in sims:
        col = 0
        if dim > 0:
            for facet in combinations(verts, dim):
                col ^= 1 << index[facet]
        cols.append(col)
    low_owner: dict[int, int] = {}
    pairs = []
    for j in range(m):
        col = cols[j]
        while col:
            low = col.bit_length() - 1
            if low in low_owner:
                col ^= cols[low_owner[low]]
            else:
                low_owner[low] = j
                pairs.append((low, j))
                break
        cols[j] = col
    killed = {i for i, _ in pairs}
    negative = {j for _, j in pairs}
    intervals = []
    for i, j in pairs:
        (vi, bi, di), (vj, bj, dj) = sims[i], sims[j]
        if bi != bj or keep_zero_bars:
            intervals.append((di, bi, bj))
    for i, (verts, birth, dim) in enumerate(sims):
        if i not in killed and i not in negative:
            intervals.append((dim, birth, math.inf))
    intervals.sort(key=lambda iv: (iv[0], iv[1], iv[2]))
    return intervals
