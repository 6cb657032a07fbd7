"""Command-line pipeline: build, persistence, compare, stats.

Identical inputs and flags produce byte-identical stdout; wall-clock timings
go to stderr so they never perturb the data stream.
"""

from __future__ import annotations

import argparse
import math
import sys
import time
from dataclasses import dataclass, field

from qrips import samples
from qrips.metric import (
    DEFAULT_POINT_CAP,
    DistanceMatrix,
    ParseError,
    enclosing_radius,
    format_float,
    load_point_cloud,
    pairwise_distances,
    read_lower_triangular,
    sorted_edges,
    validate_distance_matrix,
)
from qrips.persistence import (
    Barcode,
    clique_counts,
    compute_persistence,
    flag_filtration,
    multiplicative_bottleneck,
    rips_filtration,
    write_barcode,
)
from qrips.tower import build_filtered_skeleton, write_filtered_graph, write_sparse_distances

DEFAULT_VR_CAP = 60
RATIO_BOUND = 3.0


@dataclass
class RunConfig:
    """Resolved invocation: datasets plus thresholds and mode flags."""

    inputs: list[str] = field(default_factory=list)
    fmt: str = "points"
    synthetic: str | None = None
    counts: list[int] = field(default_factory=list)
    seed: int = 0
    ambient_dim: int = 2
    threshold: float | None = None  # None = minimum enclosing radius
    max_dim: int = 1
    vr: bool = False
    sparse_out: str | None = None
    barcode_out: str | None = None
    point_cap: int = DEFAULT_POINT_CAP
    vr_cap: int = DEFAULT_VR_CAP

    def __post_init__(self) -> None:
        if self.threshold is not None and not self.threshold > 0:
            raise ValueError("explicit threshold must be positive")
        if self.max_dim < 0:
            raise ValueError("max_dim must be nonnegative")


class CliError(Exception):
    def __init__(self, message: str, code: int = 1) -> None:
        super().__init__(message)
        self.code = code


def _load_dataset(cfg: RunConfig, which: int = 0) -> DistanceMatrix:
    if cfg.synthetic is not None:
        gen = samples.GENERATORS.get(cfg.synthetic)
        if gen is None:
            raise CliError(f"unknown synthetic generator {cfg.synthetic!r}")
        if which >= len(cfg.counts):
            raise CliError("missing --count for the requested synthetic dataset")
        n = cfg.counts[which]
        if cfg.synthetic == "sphere":
            pc = gen(n, cfg.seed + which, dim=cfg.ambient_dim)
        else:
            pc = gen(n, cfg.seed + which)
        dm = pairwise_distances(pc)
    else:
        if which >= len(cfg.inputs):
            raise CliError("missing --input for the requested dataset")
        path = cfg.inputs[which]
        try:
            with open(path, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise CliError(f"cannot open {path}: {exc.strerror}", code=2) from exc
        try:
            if cfg.fmt == "points":
                dm = pairwise_distances(load_point_cloud(text))
            elif cfg.fmt == "lower-distance":
                dm = read_lower_triangular(text)
            else:
                raise CliError(f"unknown input format {cfg.fmt!r}")
        except ParseError as exc:
            raise CliError(f"{path}: {exc}") from exc
    if dm.n > cfg.point_cap:
        raise CliError(
            f"{dm.n} points exceed the dense cap {cfg.point_cap}; "
            "the pipeline is quadratic by design, raise --max-points deliberately"
        )
    report = validate_distance_matrix(dm, check_triangle=False)
    if not report.ok:
        raise CliError(f"invalid distance matrix: {report.symmetry or report.negative or report.nonfinite or report.diagonal}")
    return dm


def _resolve_threshold(cfg: RunConfig, dm: DistanceMatrix) -> float:
    if cfg.threshold is not None:
        return cfg.threshold
    return enclosing_radius(dm)


def _quotient_barcode(dm: DistanceMatrix, threshold: float, max_dim: int) -> Barcode:
    graph = build_filtered_skeleton(dm.n, sorted_edges(dm, threshold))
    fc = flag_filtration(graph, max_dim + 1)
    return compute_persistence(fc).restrict(max_dim)


def _vr_barcode(dm: DistanceMatrix, threshold: float, max_dim: int, cap: int) -> Barcode:
    if dm.n > cap:
        raise CliError(
            f"{dm.n} points exceed the exact Vietoris-Rips cap {cap}; "
            "sample the input down before comparing"
        )
    fc = rips_filtration(dm, threshold, max_dim + 1, cap=cap)
    return compute_persistence(fc).restrict(max_dim)


def cmd_build(cfg: RunConfig, out=None) -> int:
    out = out if out is not None else sys.stdout
    dm = _load_dataset(cfg)
    threshold = _resolve_threshold(cfg, dm)
    graph = build_filtered_skeleton(dm.n, sorted_edges(dm, threshold))
    write_filtered_graph(graph, out)
    if cfg.sparse_out:
        with open(cfg.sparse_out, "w", encoding="utf-8") as fh:
            write_sparse_distances(graph, fh)
    return 0


def cmd_persistence(cfg: RunConfig, out=None) -> int:
    out = out if out is not None else sys.stdout
    dm = _load_dataset(cfg)
    threshold = _resolve_threshold(cfg, dm)
    if cfg.vr:
        barcode = _vr_barcode(dm, threshold, cfg.max_dim, cfg.vr_cap)
    else:
        barcode = _quotient_barcode(dm, threshold, cfg.max_dim)
    write_barcode(barcode, out)
    if cfg.barcode_out:
        with open(cfg.barcode_out, "w", encoding="utf-8") as fh:
            write_barcode(barcode, fh)
    return 0


def cmd_compare(cfg: RunConfig, out=None) -> int:
    out = out if out is not None else sys.stdout
    dm = _load_dataset(cfg)
    threshold = _resolve_threshold(cfg, dm)
    quotient = _quotient_barcode(dm, threshold, cfg.max_dim)
    exact = _vr_barcode(dm, threshold, cfg.max_dim, cfg.vr_cap)
    worst = 1.0
    for degree in range(cfg.max_dim + 1):
        ratio = multiplicative_bottleneck(quotient, exact, degree)
        worst = max(worst, ratio)
        verdict = "ok" if ratio <= RATIO_BOUND else "EXCEEDS-3"
        out.write(f"degree {degree} ratio {format_float(ratio)} {verdict}\n")
    out.write(f"max ratio {format_float(worst)}\n")
    return 0


def _filtration_sizes(n: int, edges, label: str, out) -> int:
    v, e, t = clique_counts(n, edges)
    total = v + e + t
    out.write(f"  {label}: dim0={v} dim1={e} dim2={t} total={total}\n")
    return total


def cmd_stats(cfg: RunConfig, out=None, err=None) -> int:
    out = out if out is not None else sys.stdout
    err = err if err is not None else sys.stderr
    dataset_count = len(cfg.counts) if cfg.synthetic else len(cfg.inputs)
    if dataset_count == 0:
        raise CliError("stats needs at least one dataset")
    if dataset_count > 2:
        raise CliError("stats accepts one or two datasets")
    sizes: list[tuple[int, int, int]] = []  # (n, quotient total, vr total)
    for k in range(dataset_count):
        dm = _load_dataset(cfg, which=k)
        threshold = _resolve_threshold(cfg, dm)
        t0 = time.perf_counter()
        edge_list = sorted_edges(dm, threshold)
        graph = build_filtered_skeleton(dm.n, edge_list)
        t1 = time.perf_counter()
        out.write(f"dataset {k + 1}: n={dm.n} threshold={format_float(threshold)}\n")
        q_total = _filtration_sizes(dm.n, graph.edges, "quotient", out)
        vr_total = 0
        if cfg.vr:
            vr_total = _filtration_sizes(dm.n, edge_list.edges, "vr", out)
        t2 = time.perf_counter()
        sizes.append((dm.n, q_total, vr_total))
        err.write(f"# dataset {k + 1} build {t1 - t0:.3f}s count {t2 - t1:.3f}s\n")
    if dataset_count == 2:
        (n1, q1, v1), (n2, q2, v2) = sizes
        if n1 == n2:
            raise CliError("growth exponent undefined: the two datasets have equal point counts")
        denom = math.log(n2) - math.log(n1)
        out.write(f"growth exponent quotient {format_float((math.log(q2) - math.log(q1)) / denom)}\n")
        if cfg.vr:
            out.write(f"growth exponent vr {format_float((math.log(v2) - math.log(v1)) / denom)}\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qrips",
        description="Quotient Vietoris-Rips filtrations: build skeletons, compute "
        "and compare barcodes, report filtration sizes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in [
        ("build", "write the filtered 1-skeleton of the quotient filtration"),
        ("persistence", "compute a barcode (quotient by default, --vr for exact)"),
        ("compare", "multiplicative bottleneck between quotient and exact barcodes"),
        ("stats", "simplex counts up to dimension 2 and growth exponents"),
    ]:
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--input", action="append", default=[], help="input file (repeat for stats)")
        p.add_argument(
            "--format",
            choices=["points", "lower-distance"],
            default="points",
            help="points csv or lower-triangular distance text",
        )
        p.add_argument(
            "--synthetic",
            choices=sorted(samples.GENERATORS),
            help="generate the input instead of reading a file",
        )
        p.add_argument("--count", action="append", type=int, default=[], help="synthetic sample size (repeat for stats)")
        p.add_argument("--seed", type=int, default=0, help="seed for synthetic generators")
        p.add_argument("--ambient-dim", type=int, default=2, help="sphere dimension for --synthetic sphere")
        group = p.add_mutually_exclusive_group()
        group.add_argument("--threshold", type=float, help="explicit distance threshold")
        group.add_argument(
            "--enclosing",
            action="store_true",
            help="threshold = minimum enclosing radius (the default)",
        )
        p.add_argument("--max-dim", type=int, default=1, help="top homology degree reported")
        p.add_argument("--vr", action="store_true", help="use the exact Vietoris-Rips filtration")
        p.add_argument("--sparse-out", help="also write the sparse 'i j d' edge file")
        p.add_argument("--barcode-out", help="also write the barcode to this path")
        p.add_argument("--max-points", type=int, default=DEFAULT_POINT_CAP, help="dense-matrix safety cap")
        p.add_argument("--vr-cap", type=int, default=DEFAULT_VR_CAP, help="exact Vietoris-Rips size cap")
    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        inputs=args.input,
        fmt=args.format,
        synthetic=args.synthetic,
        counts=args.count,
        seed=args.seed,
        ambient_dim=args.ambient_dim,
        threshold=args.threshold,
        max_dim=args.max_dim,
        vr=args.vr,
        sparse_out=args.sparse_out,
        barcode_out=args.barcode_out,
        point_cap=args.max_points,
        vr_cap=args.vr_cap,
    )


COMMANDS = {
    "build": cmd_build,
    "persistence": cmd_persistence,
    "compare": cmd_compare,
    "stats": cmd_stats,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config_from_args(args)
        return COMMANDS[args.command](cfg)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:  # console-script shim
    raise SystemExit(main())
