"""Quotient Vietoris-Rips filtrations for finite metric spaces.

The pipeline turns any finite metric space into a small weighted graph (the
1-skeleton of a filtration) whose flag-complex persistence multiplicatively
approximates the full Vietoris-Rips persistence within a factor of 3.  The
package also ships a small-instance cover lab (nerves, co-nerves, quotients,
refinements) used to verify the interleaving machinery, and a Z/2 persistence
engine with additive and multiplicative bottleneck distances.
"""

from qrips.metric import (
    DistanceMatrix,
    Edge,
    ParseError,
    PointCloud,
    SortedEdgeList,
    enclosing_radius,
    load_point_cloud,
    pairwise_distances,
    quotient_metric,
    read_lower_triangular,
    sorted_edges,
    validate_distance_matrix,
    write_lower_triangular,
)
from qrips.linkage import (
    MergeEvent,
    MergeHistory,
    Partition,
    UnionFind,
    block_diameter,
    complete_linkage,
    conservative_complete_linkage,
    partition_at,
    singleton_partition,
)
from qrips.tower import (
    FilteredGraph,
    Skeleton,
    build_filtered_skeleton,
    read_filtered_graph,
    write_filtered_graph,
    write_sparse_distances,
)
from qrips.covers import (
    BinaryRelation,
    Cover,
    RefinementMap,
    SimplicialComplex,
    ball_cover,
    conerve,
    contiguous,
    dowker_pair,
    find_refinement,
    maximal_clique_cover,
    nerve,
    pullback_cover,
    quotient_complex,
    quotient_cover_index,
    quotient_cover_space,
    saturate_cover,
)
from qrips.persistence import (
    Barcode,
    FilteredComplex,
    betti,
    bottleneck,
    compute_persistence,
    flag_filtration,
    multiplicative_bottleneck,
    read_barcode,
    rips_filtration,
    write_barcode,
)

__version__ = "0.1.0"

__all__ = [
    "Barcode",
    "BinaryRelation",
    "Cover",
    "DistanceMatrix",
    "Edge",
    "FilteredComplex",
    "FilteredGraph",
    "MergeEvent",
    "MergeHistory",
    "ParseError",
    "Partition",
    "PointCloud",
    "RefinementMap",
    "SimplicialComplex",
    "Skeleton",
    "SortedEdgeList",
    "UnionFind",
    "ball_cover",
    "betti",
    "block_diameter",
    "bottleneck",
    "build_filtered_skeleton",
    "complete_linkage",
    "compute_persistence",
    "conerve",
    "conservative_complete_linkage",
    "contiguous",
    "dowker_pair",
    "enclosing_radius",
    "find_refinement",
    "flag_filtration",
    "load_point_cloud",
    "maximal_clique_cover",
    "multiplicative_bottleneck",
    "nerve",
    "pairwise_distances",
    "partition_at",
    "pullback_cover",
    "quotient_complex",
    "quotient_cover_index",
    "quotient_cover_space",
    "quotient_metric",
    "read_barcode",
    "read_filtered_graph",
    "read_lower_triangular",
    "rips_filtration",
    "saturate_cover",
    "singleton_partition",
    "sorted_edges",
    "validate_distance_matrix",
    "write_barcode",
    "write_filtered_graph",
    "write_lower_triangular",
    "write_sparse_distances",
]
