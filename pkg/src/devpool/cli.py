"""Command-line interface.

Exit codes: 0 success, 1 runtime or data error, 2 usage error.
"""

import argparse
import json
import logging
import math
import sys

from . import bench
from .errors import DevpoolError
from .evaluation import evaluate_dataset, read_manifest
from .pooling import MCT, PoolingSpec, Strategy
from .registry import (MapKind, Polarity, builtin_indices, get_index, load_index_file,
                       score_pair, with_overrides)

# Dataset sizes used as weights for the cross-dataset average in the
# published comparison: LIVE, CSIQ, TID2008.
TABLE_WEIGHTS = {"live": 779, "csiq": 886, "tid2008": 1700}

_CLI_POOLINGS = [s.value for s in Strategy if s is not Strategy.WEIGHTED_MEAN]


class UsageError(Exception):
    pass


def _add_index_args(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--index", default="gmsd",
                   help="built-in index name (default: gmsd); one of "
                        + ", ".join(s.name for s in builtin_indices()))
    g.add_argument("--index-file", help="JSON index definition")
    p.add_argument("--pooling", choices=_CLI_POOLINGS, help="override the pooling strategy")
    p.add_argument("--alpha", type=float, help="DD blend weight in [0, 1]")
    p.add_argument("--rho", type=float, help="Minkowski deviation order (>= 1)")
    p.add_argument("--mct", choices=[m.value for m in MCT], help="Minkowski central tendency")
    p.add_argument("--c", dest="gms_c", type=float, help="GMS stability constant")
    p.add_argument("--no-downsample", action="store_true", help="skip 2x2 downsampling")


def _resolve_index(args):
    """Build the effective IndexSpec; raises UsageError on bad combinations."""
    if args.index_file:
        try:
            spec = load_index_file(args.index_file)
        except OSError as exc:
            raise DevpoolError(str(exc)) from exc
    else:
        try:
            spec = get_index(args.index)
        except KeyError as exc:
            raise UsageError(exc.args[0]) from exc

    base = spec.pooling
    strategy = Strategy(args.pooling) if args.pooling else base.strategy
    if args.alpha is not None and strategy is not Strategy.DD:
        raise UsageError(f"--alpha only applies to dd pooling, not {strategy.value}")
    if (args.rho is not None or args.mct is not None) and strategy is not Strategy.MINKOWSKI:
        raise UsageError(f"--rho/--mct only apply to minkowski pooling, not {strategy.value}")
    if args.gms_c is not None and spec.map_kind is not MapKind.GMS:
        raise UsageError("--c only applies to GMS-based indices")

    pooling = None
    if args.pooling or args.alpha is not None or args.rho is not None or args.mct is not None:
        try:
            pooling = PoolingSpec(
                strategy,
                alpha=base.alpha if args.alpha is None else args.alpha,
                rho=base.rho if args.rho is None else args.rho,
                mct=base.mct if args.mct is None else args.mct)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
    try:
        return with_overrides(spec, pooling=pooling, gms_c=args.gms_c,
                              downsample=False if args.no_downsample else None)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def cmd_score(args):
    spec = _resolve_index(args)
    q = score_pair(args.ref, args.dist, spec)
    print(f"{spec.name}\t{q.value!r}\t{spec.polarity.value}")
    return 0


def _fmt(v):
    return "NA" if v is None else f"{v:.4f}"


def cmd_evaluate(args):
    spec = _resolve_index(args)
    manifest = read_manifest(args.manifest, args.mos_polarity)
    report = evaluate_dataset(manifest, spec, workers=args.workers)
    report.write_json(args.output)
    if args.csv:
        report.write_csv(args.csv)
    for ex in report.exclusions:
        print(f"excluded row {ex['row']}: {ex['reason']}", file=sys.stderr)
    print(f"{spec.name}\tn={len(report.entries)}\texcluded={len(report.exclusions)}\t"
          f"src={_fmt(report.src)}\tpcc={_fmt(report.pcc)}\trmse={_fmt(report.rmse)}")
    return 0


def cmd_bench(args):
    if args.runs < bench.MIN_RUNS:
        raise UsageError(f"--runs must be >= {bench.MIN_RUNS}")
    if min(args.sizes) < 1:
        raise UsageError("--sizes must all be >= 1")
    rows = bench.run_bench(args.sizes, args.runs, seed=args.seed)
    if args.output:
        with open(args.output, "w", newline="", encoding="utf-8") as fh:
            bench.write_csv(rows, fh)
    else:
        bench.write_csv(rows, sys.stdout)
    return 0


def _parse_weighted(item):
    path, sep, w = item.rpartition(":")
    if sep and path:
        try:
            weight = float(w)
        except ValueError:
            return item, 1.0
        if not (math.isfinite(weight) and weight > 0):
            raise UsageError(f"weight must be positive: {item!r}")
        return path, weight
    return item, 1.0


def weighted_average(pairs):
    """
    Weighted SRC and PCC across evaluation reports.

    `pairs` is a sequence of ``(report_dict, weight)``. The published
    comparison weights datasets by their distorted-image counts (see
    ``TABLE_WEIGHTS``). A statistic that is null in any report averages
    to None.
    """
    out = {}
    total = sum(w for _, w in pairs)
    for key in ("src", "pcc"):
        vals = [(r[key], w) for r, w in pairs]
        if any(v is None for v, _ in vals):
            out[key] = None
        else:
            out[key] = sum(v * w for v, w in vals) / total
    return out


def cmd_weighted_avg(args):
    pairs = []
    for item in args.reports:
        path, weight = _parse_weighted(item)
        try:
            with open(path, encoding="utf-8") as fh:
                report = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise DevpoolError(f"{path}: {exc}") from exc
        missing = [k for k in ("src", "pcc") if k not in report]
        if missing:
            raise DevpoolError(f"{path}: report lacks field(s) {missing}")
        pairs.append((report, weight))
    avg = weighted_average(pairs)
    print(f"src\t{_fmt(avg['src'])}")
    print(f"pcc\t{_fmt(avg['pcc'])}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="devpool", description="Full-reference IQA with deviation pooling")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("score", help="score one reference/distorted pair")
    p.add_argument("ref")
    p.add_argument("dist")
    _add_index_args(p)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("evaluate", help="evaluate an index on a manifest")
    p.add_argument("manifest", help="CSV with columns ref,dist,mos[,tag]")
    p.add_argument("-o", "--output", required=True, help="JSON report path")
    p.add_argument("--csv", help="optional per-entry CSV path")
    p.add_argument("--mos-polarity", choices=[x.value for x in Polarity],
                   default=Polarity.HIGHER_IS_BETTER.value,
                   help="whether higher subjective scores mean better quality (MOS) or worse (DMOS)")
    p.add_argument("--workers", type=int, default=1)
    _add_index_args(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("bench", help="time pooling strategies versus LS size")
    p.add_argument("--sizes", type=int, nargs="+", default=list(bench.DEFAULT_SIZES))
    p.add_argument("--runs", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", help="CSV path (default: stdout)")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser(
        "weighted-avg", help="weighted SRC/PCC across reports",
        epilog="Weights are usually dataset sizes, e.g. live.json:779 csiq.json:886 "
               "tid2008.json:1700.")
    p.add_argument("reports", nargs="+", metavar="REPORT[:WEIGHT]")
    p.set_defaults(func=cmd_weighted_avg)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except DevpoolError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
