import io
import math

import numpy as np
import pytest

from qrips.linkage import (
    ConservativeLinkage,
    MergeEvent,
    block_diameter,
    complete_linkage,
    conservative_complete_linkage,
    partition_at,
    read_merge_history,
    singleton_partition,
    write_merge_history,
)
from qrips.metric import (
    DistanceMatrix,
    PointCloud,
    SortedEdgeList,
    edges_from_pairs,
    pairwise_distances,
    sorted_edges,
)

from conftest import (
    blocks_as_sets,
    brute_diameter,
    critical_scales,
    grid_metric,
    random_metric,
    single_linkage_blocks,
)

SQRT2 = math.sqrt(2.0)


def test_complete_linkage_line(l3):
    h = complete_linkage(3, sorted_edges(l3))
    assert [e.dist for e in h.events] == [1.0, 2.0]
    first = h.events[0]
    assert {first.winner, first.loser} == {0, 1}


def test_complete_linkage_trivial():
    h = complete_linkage(1, SortedEdgeList(()))
    assert h.events == ()


def test_complete_linkage_square(sq4):
    h = complete_linkage(4, sorted_edges(sq4))
    assert [e.dist for e in h.events] == [1.0, 1.0, SQRT2]
    merged_pairs = [{e.winner, e.loser} for e in h.events[:2]]
    assert {0, 1} in merged_pairs and {2, 3} in merged_pairs


def test_conservative_line_postpones(l3):
    h = conservative_complete_linkage(3, sorted_edges(l3))
    assert all(e.dist == 2.0 for e in h.events)
    assert len(h.events) == 2
    assert blocks_as_sets(partition_at(h, 1.0)) == {frozenset({0}), frozenset({1}), frozenset({2})}
    assert blocks_as_sets(partition_at(h, 2.0)) == {frozenset({0, 1, 2})}


def test_conservative_two_far_pairs():
    dm = pairwise_distances(PointCloud(np.array([[0.0], [0.5], [10.0], [10.5]])))
    h = conservative_complete_linkage(4, sorted_edges(dm))
    at_half = [e for e in h.events if e.dist == 0.5]
    assert len(at_half) == 2
    assert blocks_as_sets(partition_at(h, 0.5)) == {frozenset({0, 1}), frozenset({2, 3})}


def test_conservative_agrees_without_ties():
    rng = np.random.default_rng(21)
    for _ in range(15):
        dm = random_metric(rng, int(rng.integers(4, 20)), 3)
        e = sorted_edges(dm)
        dists = [d for _, _, d in e.edges]
        assert len(set(dists)) == len(dists)  # generic points: no exact ties
        h_std = complete_linkage(dm.n, e)
        h_con = conservative_complete_linkage(dm.n, e)
        for r in critical_scales(dm):
            assert blocks_as_sets(partition_at(h_std, r)) == blocks_as_sets(
                partition_at(h_con, r)
            )


def test_partition_below_first_event(l3):
    h = conservative_complete_linkage(3, sorted_edges(l3))
    assert partition_at(h, 0.5) == singleton_partition(3)


def test_block_diameter(l3, sq4):
    assert block_diameter({0, 1, 2}, l3) == 2.0
    assert block_diameter({1}, l3) == 0.0
    assert block_diameter({0, 2}, sq4) == SQRT2
    with pytest.raises(ValueError):
        block_diameter(set(), l3)


def test_endpoint_out_of_range():
    with pytest.raises(ValueError):
        complete_linkage(2, edges_from_pairs([(0, 5, 1.0)]))
    with pytest.raises(ValueError):
        conservative_complete_linkage(2, edges_from_pairs([(0, 5, 1.0)]))


def test_duplicates_merge_at_zero():
    dm = pairwise_distances(PointCloud(np.array([[0.0], [0.0], [4.0]])))
    h = conservative_complete_linkage(3, sorted_edges(dm))
    assert h.events[0].dist == 0.0
    assert blocks_as_sets(partition_at(h, 0.0)) == {frozenset({0, 1}), frozenset({2})}


def test_diameter_bound_random_and_grids():
    rng = np.random.default_rng(22)
    cases = [random_metric(rng, int(rng.integers(5, 26)), int(rng.integers(2, 5))) for _ in range(20)]
    cases += [grid_metric(3, 4), grid_metric(4, 4), grid_metric(2, 6)]
    for dm in cases:
        h = conservative_complete_linkage(dm.n, sorted_edges(dm))
        for r in sorted({e.dist for e in h.events}):
            for block in partition_at(h, r).blocks:
                assert block_diameter(block, dm) <= r


def test_refinement_across_scales():
    rng = np.random.default_rng(23)
    dm = random_metric(rng, 18, 3)
    h = conservative_complete_linkage(dm.n, sorted_edges(dm))
    scales = sorted({e.dist for e in h.events})
    for r, s in zip(scales, scales[1:]):
        coarse = partition_at(h, s).as_sets()
        for block in partition_at(h, r).blocks:
            assert any(set(block) <= c for c in coarse)


def test_order_independence_on_ties():
    rng = np.random.default_rng(24)
    dm = grid_metric(3, 4)
    base = conservative_complete_linkage(dm.n, sorted_edges(dm))
    base_scales = sorted({e.dist for e in base.events})
    for _ in range(4):
        perm = rng.permutation(dm.n)
        relabeled = DistanceMatrix(dm.values[np.ix_(perm, perm)])
        h = conservative_complete_linkage(dm.n, sorted_edges(relabeled))
        assert sorted({e.dist for e in h.events}) == base_scales
        for r in base_scales:
            mapped = {
                frozenset(int(perm[x]) for x in block)
                for block in partition_at(h, r).blocks
            }
            assert mapped == blocks_as_sets(partition_at(base, r))


def test_single_linkage_violates_diameter_bound(l3):
    # negative regression: transitive merging breaks the diameter bound at r=1
    comps = single_linkage_blocks(l3, 1.0)
    assert comps == {frozenset({0, 1, 2})}
    assert brute_diameter({0, 1, 2}, l3) == 2.0 > 1.0
    h = conservative_complete_linkage(3, sorted_edges(l3))
    for block in partition_at(h, 1.0).blocks:
        assert block_diameter(block, l3) <= 1.0


def test_saturation_invariant_holds_after_each_edge():
    dm = grid_metric(3, 3)
    e = sorted_edges(dm)
    engine = ConservativeLinkage(dm.n)
    edges = e.edges
    for i, (u, v, d) in enumerate(edges):
        engine.add_edge(u, v, d)
        roots = {engine.uf.find(x) for x in range(dm.n)}
        members = {r: [x for x in range(dm.n) if engine.uf.find(x) == r] for r in roots}
        batch_done = i + 1 == len(edges) or edges[i + 1].dist != d
        for a in roots:
            for b, count in engine.edges[a].items():
                cap = engine.size[a] * engine.size[b]
                assert 0 <= count <= cap
                if batch_done:
                    # with the batch complete, saturation == all cross pairs in range
                    all_within = all(
                        dm.values[x, y] <= d for x in members[a] for y in members[b]
                    )
                    assert (count == cap) == all_within
        if batch_done:
            for _ in engine.contractions(d):
                pass


def test_clique_cap_degree_path_matches():
    dm = grid_metric(4, 3)
    e = sorted_edges(dm)
    default = conservative_complete_linkage(dm.n, e)
    forced = ConservativeLinkage(dm.n, clique_pairwise_cap=0)
    edges = e.edges
    for i, (u, v, d) in enumerate(edges):
        forced.add_edge(u, v, d)
        if i + 1 == len(edges) or edges[i + 1].dist != d:
            for _ in forced.contractions(d):
                pass
    assert tuple(forced.events) == default.events


def test_history_distances_nondecreasing():
    rng = np.random.default_rng(26)
    dm = random_metric(rng, 20, 2)
    for h in (
        complete_linkage(dm.n, sorted_edges(dm)),
        conservative_complete_linkage(dm.n, sorted_edges(dm)),
    ):
        dists = [e.dist for e in h.events]
        assert dists == sorted(dists)
        assert len(h.events) <= dm.n - 1


def test_merge_history_round_trip(l3):
    h = conservative_complete_linkage(3, sorted_edges(l3))
    buf = io.StringIO()
    write_merge_history(h, buf)
    back = read_merge_history(buf.getvalue())
    assert back == h


def naive_conservative_partitions(n, edge_list):
    """Full cluster-graph rebuild per fixpoint iteration (reference oracle).

    Returns {event distance} and the partition block-sets at each of them.
    """
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    size = {x: 1 for x in range(n)}
    counts: dict[tuple[int, int], int] = {}
    snapshots = {}
    edges = edge_list.edges
    i = 0
    while i < len(edges):
        d = edges[i].dist
        while i < len(edges) and edges[i].dist == d:
            u, v, _ = edges[i]
            ru, rv = find(u), find(v)
            if ru != rv:
                key = (min(ru, rv), max(ru, rv))
                counts[key] = counts.get(key, 0) + 1
            i += 1
        while True:
            roots = sorted({find(x) for x in range(n)})
            sat = {r: set() for r in roots}
            for (a, b), c in counts.items():
                if find(a) == a and find(b) == b and c == size[a] * size[b]:
                    sat[a].add(b)
                    sat[b].add(a)
            merged = False
            visited = set()
            for r in roots:
                if r in visited:
                    continue
                comp = {r}
                stack = [r]
                while stack:
                    x = stack.pop()
                    for y in sat[x]:
                        if y not in comp:
                            comp.add(y)
                            stack.append(y)
                visited |= comp
                members = sorted(comp)
                is_clique = all(
                    b in sat[a] for k, a in enumerate(members) for b in members[k + 1 :]
                )
                if len(comp) > 1 and is_clique:
                    best = max(size[m] for m in members)
                    w = next(m for m in members if size[m] == best)
                    for l in members:
                        if l == w:
                            continue
                        parent[l] = w
                        size[w] += size[l]
                    stale = [key for key in counts if find(key[0]) == find(key[1])]
                    for key in stale:
                        del counts[key]
                    remap: dict[tuple[int, int], int] = {}
                    for (a, b), c in counts.items():
                        ra, rb = find(a), find(b)
                        key = (min(ra, rb), max(ra, rb))
                        remap[key] = remap.get(key, 0) + c
                    counts = remap
                    merged = True
            if not merged:
                break
        blocks: dict[int, set[int]] = {}
        for x in range(n):
            blocks.setdefault(find(x), set()).add(x)
        snapshots[d] = {frozenset(b) for b in blocks.values()}
    return snapshots


def test_incremental_engine_matches_full_rebuild():
    rng = np.random.default_rng(27)
    cases = [grid_metric(3, 4), grid_metric(4, 4), grid_metric(2, 5)]
    for _ in range(8):
        cases.append(random_metric(rng, int(rng.integers(4, 15)), 2))
    cases.append(pairwise_distances(PointCloud(np.array([[0.0], [0.0], [0.0], [2.0], [2.0]]))))
    for dm in cases:
        e = sorted_edges(dm)
        h = conservative_complete_linkage(dm.n, e)
        reference = naive_conservative_partitions(dm.n, e)
        for d, expected_blocks in reference.items():
            assert blocks_as_sets(partition_at(h, d)) == expected_blocks
        assert {ev.dist for ev in h.events} <= set(reference)


def test_winner_has_larger_neighbor_map():
    # 5 points: 0-1 merge first while 0 has strictly more cluster neighbors
    pairs = [
        (0, 1, 1.0),
        (0, 2, 2.0),
        (0, 3, 3.0),
        (1, 4, 4.0),
    ]
    h = complete_linkage(5, edges_from_pairs(pairs + [(2, 3, 9.0), (2, 4, 9.0), (3, 4, 9.0), (1, 2, 9.0), (1, 3, 9.0), (0, 4, 9.0)]))
    # at d=1.0 both endpoints are singletons with equal map size -> lower index wins
    assert h.events[0] == MergeEvent(0, 1, 1.0)
