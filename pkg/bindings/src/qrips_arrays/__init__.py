"""Array-facing bindings for the quotient-filtration pipeline.

Two functions, no incremental state: one call runs one pipeline.  Inputs are
plain numeric arrays, outputs are per-degree ``(birth, death)`` arrays with
``inf`` marking essential classes.  Values agree bit-for-bit with the
``qrips`` command line on the same data.
"""

from __future__ import annotations

from typing import Mapping

import numpy as np

from qrips.metric import (
    DistanceMatrix,
    PointCloud,
    enclosing_radius,
    pairwise_distances,
    sorted_edges,
    validate_distance_matrix,
)
from qrips.persistence import (
    Barcode,
    bottleneck as _bottleneck,
    compute_persistence,
    flag_filtration,
    multiplicative_bottleneck as _multiplicative_bottleneck,
)
from qrips.tower import build_filtered_skeleton

__version__ = "0.1.0"

__all__ = ["build_and_persist", "bottleneck_distance"]

BoundBarcode = dict[int, np.ndarray]


def _as_distance_matrix(data: np.ndarray, kind: str) -> DistanceMatrix:
    if kind == "points":
        return pairwise_distances(PointCloud(data))
    if kind == "distances":
        if data.ndim != 2 or data.shape[0] != data.shape[1]:
            raise ValueError("distance input must be a square 2-d array")
        report = validate_distance_matrix(data, strict=True, check_triangle=False)
        assert report.ok
        return DistanceMatrix(data)
    raise ValueError(f"kind must be 'auto', 'points' or 'distances', got {kind!r}")


def _looks_like_distances(data: np.ndarray) -> bool:
    return (
        data.ndim == 2
        and data.shape[0] == data.shape[1]
        and bool(np.all(data == data.T))
        and bool(np.all(np.diag(data) == 0.0))
        and bool(np.all(data >= 0.0))
    )


def build_and_persist(
    data,
    threshold: float | None = None,
    max_dim: int = 1,
    kind: str = "auto",
) -> BoundBarcode:
    """Full pipeline: array -> quotient filtration -> per-degree barcode arrays.

    ``data`` is either an (n, d) point array or an (n, n) symmetric distance
    matrix; ``kind='auto'`` treats exactly-symmetric square arrays with zero
    diagonal as distances.  ``threshold=None`` uses the minimum enclosing
    radius.  Returns ``{degree: array of (birth, death) rows}`` for degrees
    0..max_dim, deaths ``inf`` for essential classes.
    """
    arr = np.asarray(data, dtype=np.float64)
    if arr.size == 0:
        raise ValueError("input array is empty")
    if arr.ndim != 2:
        raise ValueError("input must be a 2-d array")
    if max_dim < 0:
        raise ValueError("max_dim must be nonnegative")
    if kind == "auto":
        kind = "distances" if _looks_like_distances(arr) else "points"
    dm = _as_distance_matrix(arr, kind)
    if threshold is None:
        threshold = enclosing_radius(dm)
    graph = build_filtered_skeleton(dm.n, sorted_edges(dm, float(threshold)))
    barcode = compute_persistence(flag_filtration(graph, max_dim + 1))
    out: BoundBarcode = {}
    for degree in range(max_dim + 1):
        pairs = barcode.in_degree(degree)
        out[degree] = (
            np.array(pairs, dtype=np.float64)
            if pairs
            else np.empty((0, 2), dtype=np.float64)
        )
    return out


def _coerce_pairs(bars, degree: int) -> Barcode:
    if isinstance(bars, Mapping):
        bars = bars.get(degree, ())
    arr = np.asarray(bars, dtype=np.float64)
    if arr.size == 0:
        return Barcode(())
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("barcode input must be an array of (birth, death) pairs")
    return Barcode(tuple((degree, float(b), float(d)) for b, d in arr))


def bottleneck_distance(a, b, degree: int = 0, multiplicative: bool = False) -> float:
    """Bottleneck distance between two per-degree bar arrays.

    ``a`` and ``b`` are (k, 2) arrays of (birth, death) pairs, or mappings
    degree -> pairs as returned by :func:`build_and_persist`.  Multiplicative
    mode compares log-rescaled endpoints and returns a ratio (identical
    inputs give 1); it rejects negative endpoints.
    """
    bar_a = _coerce_pairs(a, degree)
    bar_b = _coerce_pairs(b, degree)
    if multiplicative:
        return _multiplicative_bottleneck(bar_a, bar_b, degree)
    return _bottleneck(bar_a, bar_b, degree)
