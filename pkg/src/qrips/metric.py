"""Finite metric spaces: point clouds, distance matrices, sorted edge lists.

Distances are plain floats.  Ties between equal distances are meaningful to
the downstream clustering (batches are cut on exact float equality), so no
epsilon snapping happens anywhere in this module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import IO, TYPE_CHECKING, Iterable, NamedTuple

import numpy as np

if TYPE_CHECKING:  # pragma: no cover
    from qrips.linkage import Partition

#: Dense-matrix safety cap; quadratic pipelines refuse above this without an
#: explicit override.
DEFAULT_POINT_CAP = 20_000


class ParseError(ValueError):
    """Malformed textual input (CSV point cloud or distance file)."""


@dataclass(frozen=True)
class PointCloud:
    """n points in a common Euclidean space, row per point."""

    points: np.ndarray

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise ValueError("point cloud must be a nonempty 2-d array")
        if not np.all(np.isfinite(pts)):
            raise ValueError("point cloud contains non-finite coordinates")
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class DistanceMatrix:
    """Dense symmetric nonnegative matrix with zero diagonal.

    The triangle inequality is deliberately not required: quotient metrics
    obtained by min-linkage between blocks may violate it.
    """

    values: np.ndarray

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.ndim != 2 or vals.shape[0] != vals.shape[1]:
            raise ValueError("distance matrix must be square")
        object.__setattr__(self, "values", vals)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def __getitem__(self, ij: tuple[int, int]) -> float:
        return float(self.values[ij])


class Edge(NamedTuple):
    u: int
    v: int
    dist: float


@dataclass(frozen=True)
class SortedEdgeList:
    """All pairs within the threshold, ascending by distance.

    Ties are broken by (u, v) lexicographic order, which pins the byte-level
    output of everything downstream.
    """

    edges: tuple[Edge, ...]
    threshold: float = math.inf


@dataclass
class ValidationReport:
    """Structural findings for a candidate distance matrix."""

    symmetry: list[tuple[int, int]] = field(default_factory=list)
    diagonal: list[int] = field(default_factory=list)
    negative: list[tuple[int, int]] = field(default_factory=list)
    nonfinite: list[tuple[int, int]] = field(default_factory=list)
    triangle: list[tuple[int, int, int]] = field(default_factory=list)
    triangle_checked: bool = False

    @property
    def hard_errors(self) -> bool:
        return bool(self.symmetry or self.diagonal or self.negative or self.nonfinite)

    @property
    def ok(self) -> bool:
        return not self.hard_errors

    def is_empty(self) -> bool:
        return self.ok and not self.triangle


def load_point_cloud(source: IO[str] | str, fmt: str = "csv") -> PointCloud:
    """Parse a CSV point cloud: one point per line, comma-separated reals.

    Headers are rejected (strict numeric).  Raises :class:`ParseError` naming
    the offending row for ragged input and the (row, column) position for a
    non-numeric token.
    """
    if fmt != "csv":
        raise ValueError(f"unsupported point-cloud format: {fmt!r}")
    text = source if isinstance(source, str) else source.read()
    rows: list[list[float]] = []
    width: int | None = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        if line.strip() == "":
            if rows and lineno > len(rows):
                continue  # tolerate trailing blank line only
            raise ParseError(f"row {lineno}: empty line in point cloud")
        tokens = line.split(",")
        if width is None:
            width = len(tokens)
        elif len(tokens) != width:
            raise ParseError(
                f"row {lineno}: ragged row ({len(tokens)} values, expected {width})"
            )
        parsed = []
        for col, tok in enumerate(tokens, start=1):
            try:
                parsed.append(float(tok))
            except ValueError:
                raise ParseError(
                    f"row {lineno}, column {col}: non-numeric token {tok.strip()!r}"
                ) from None
            if not math.isfinite(parsed[-1]):
                raise ParseError(f"row {lineno}, column {col}: non-finite coordinate")
        rows.append(parsed)
    if not rows:
        raise ParseError("point cloud is empty")
    return PointCloud(np.array(rows, dtype=np.float64))


def pairwise_distances(pc: PointCloud) -> DistanceMatrix:
    """Euclidean distance matrix of a point cloud.

    The per-entry accumulation order over coordinates is fixed, so repeated
    runs are bit-identical and the result is exactly symmetric.
    """
    pts = pc.points
    diff = pts[:, None, :] - pts[None, :, :]
    sq = np.einsum("ijk,ijk->ij", diff, diff)
    return DistanceMatrix(np.sqrt(sq))


def validate_distance_matrix(
    dm: DistanceMatrix | np.ndarray,
    *,
    strict: bool = False,
    check_triangle: bool | None = None,
) -> ValidationReport:
    """Scan a square matrix for metric-structure violations.

    Asymmetry, nonzero diagonal, negative or non-finite entries are hard
    findings (raised in strict mode); triangle-inequality failures are
    warnings only.  ``check_triangle=None`` runs the cubic scan when n <= 200.
    """
    vals = dm.values if isinstance(dm, DistanceMatrix) else np.asarray(dm, dtype=np.float64)
    if vals.ndim != 2 or vals.shape[0] != vals.shape[1]:
        raise ValueError("distance matrix must be square")
    n = vals.shape[0]
    report = ValidationReport()
    for i in range(n):
        if vals[i, i] != 0.0:
            report.diagonal.append(i)
    finite_mask = np.isfinite(vals)
    bad = np.argwhere(~finite_mask)
    report.nonfinite.extend((int(i), int(j)) for i, j in bad if i <= j)
    finite = np.where(finite_mask, vals, 0.0)
    neg = np.argwhere(finite < 0.0)
    report.negative.extend((int(i), int(j)) for i, j in neg if i <= j)
    both_nan = np.isnan(vals) & np.isnan(vals.T)
    asym = np.argwhere((vals != vals.T) & ~both_nan)
    report.symmetry.extend((int(i), int(j)) for i, j in asym if i < j)
    if check_triangle is None:
        check_triangle = n <= 200
    if check_triangle and not report.hard_errors:
        report.triangle_checked = True
        for i in range(n):
            for k in range(i + 1, n):
                # violation: d(i,k) > d(i,j) + d(j,k) for some intermediate j
                slack = vals[i, :] + vals[:, k]
                for j in np.nonzero(vals[i, k] > slack)[0]:
                    if j != i and j != k:
                        report.triangle.append((i, int(j), k))
    if strict and report.hard_errors:
        raise ValueError(f"invalid distance matrix: {_summarize(report)}")
    return report


def _summarize(report: ValidationReport) -> str:
    parts = []
    if report.symmetry:
        parts.append(f"asymmetric at {report.symmetry[:3]}")
    if report.diagonal:
        parts.append(f"nonzero diagonal at rows {report.diagonal[:3]}")
    if report.negative:
        parts.append(f"negative entries at {report.negative[:3]}")
    if report.nonfinite:
        parts.append(f"non-finite entries at {report.nonfinite[:3]}")
    return "; ".join(parts) or "ok"


def sorted_edges(dm: DistanceMatrix, threshold: float = math.inf) -> SortedEdgeList:
    """All unordered pairs with distance <= threshold, sorted ascending.

    Equal distances keep (u, v) lexicographic order.
    """
    n = dm.n
    vals = dm.values
    iu, ju = np.triu_indices(n, k=1)
    dists = vals[iu, ju]
    if math.isfinite(threshold):
        keep = dists <= threshold
        iu, ju, dists = iu[keep], ju[keep], dists[keep]
    order = np.lexsort((ju, iu, dists))
    edges = tuple(
        Edge(int(iu[k]), int(ju[k]), float(dists[k])) for k in order
    )
    return SortedEdgeList(edges, threshold)


def enclosing_radius(dm: DistanceMatrix) -> float:
    """min over x of max over y of d(x, y); 0 for a single point."""
    if dm.n == 1:
        return 0.0
    return float(dm.values.max(axis=1).min())


def quotient_metric(dm: DistanceMatrix, p: "Partition") -> DistanceMatrix:
    """Metric on partition blocks: minimum cross-block distance.

    Distances can only shrink under this quotient; the result may violate the
    triangle inequality, which downstream consumers tolerate.
    """
    blocks = p.blocks
    if any(len(b) == 0 for b in blocks):
        raise ValueError("partition contains an empty block")
    k = len(blocks)
    out = np.zeros((k, k), dtype=np.float64)
    vals = dm.values
    idx = [np.fromiter(b, dtype=np.intp) for b in blocks]
    for a in range(k):
        for b in range(a + 1, k):
            d = float(vals[np.ix_(idx[a], idx[b])].min())
            out[a, b] = d
            out[b, a] = d
    return DistanceMatrix(out)


def read_lower_triangular(source: IO[str] | str) -> DistanceMatrix:
    """Read the lower-triangular distance text format.

    Line k carries ``d[k][0..k-1]`` comma-separated.  Row 0 has no entries, so
    the file either starts with an empty line or directly at row 1.  An empty
    file denotes a single point.
    """
    text = source if isinstance(source, str) else source.read()
    lines = text.splitlines()
    while lines and lines[-1].strip() == "":
        lines.pop()
    if not lines:
        return DistanceMatrix(np.zeros((1, 1), dtype=np.float64))
    start_row = 0 if lines[0].strip() == "" else 1
    n = len(lines) + start_row
    vals = np.zeros((n, n), dtype=np.float64)
    for offset, line in enumerate(lines):
        row = offset + start_row
        if row == 0:
            continue
        tokens = [] if line.strip() == "" else line.split(",")
        if len(tokens) != row:
            raise ParseError(
                f"row {row}: expected {row} entries, found {len(tokens)}"
            )
        for col, tok in enumerate(tokens):
            try:
                d = float(tok)
            except ValueError:
                raise ParseError(
                    f"row {row}, column {col + 1}: non-numeric token {tok.strip()!r}"
                ) from None
            vals[row, col] = d
            vals[col, row] = d
    return DistanceMatrix(vals)


def write_lower_triangular(dm: DistanceMatrix, sink: IO[str]) -> None:
    """Write the lower-triangular format (starts at row 1, value-exact)."""
    vals = dm.values
    for row in range(1, dm.n):
        sink.write(",".join(format_float(vals[row, col]) for col in range(row)))
        sink.write("\n")


def format_float(x: float) -> str:
    """17 significant digits; parses back to the identical double."""
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(float(x), ".17g")


def edges_from_pairs(pairs: Iterable[tuple[int, int, float]], threshold: float = math.inf) -> SortedEdgeList:
    """Build a SortedEdgeList from raw (u, v, d) triples (re-sorted, u < v)."""
    norm = [Edge(min(u, v), max(u, v), float(d)) for u, v, d in pairs]
    norm.sort(key=lambda e: (e.dist, e.u, e.v))
    return SortedEdgeList(tuple(norm), threshold)
