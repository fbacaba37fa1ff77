"""Command-line entry point: ``sorlayout {layout,bench,compare,gen,rate}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from . import bench
from .convergence import analyze_rate
from .errors import InvalidSize, LayoutError
from .formats import (
    format_table,
    write_edge_list,
    write_placement_tsv,
    write_report_json,
    write_svg,
    write_trace_json,
)
from .graph import generate
from .layout import (
    DEFAULT_CANDIDATES,
    DEFAULT_DISTRIBUTION,
    Enumerating,
    Fixed,
    LayoutConfig,
    NonSOR,
    Probabilistic,
    run_layout,
)

RATE_MAX_N = 100


def _emit(text: str, path: Optional[str]) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _floats(text: str) -> List[float]:
    return [float(t) for t in text.split(",") if t.strip()]


def strategy_from_args(args):
    if args.strategy == "none":
        return NonSOR()
    if args.strategy == "fixed":
        return Fixed(1.5 if args.omega is None else args.omega)
    if args.strategy == "enum":
        return Enumerating(tuple(_floats(args.candidates)) if args.candidates else DEFAULT_CANDIDATES)
    return Probabilistic(bench.parse_distribution(args.dist) if args.dist else DEFAULT_DISTRIBUTION)


def config_from_args(args, rel_err_default: float = 1e-6) -> LayoutConfig:
    return LayoutConfig(
        dim=args.dim,
        rel_err=args.rel_err if args.rel_err is not None else rel_err_default,
        max_iter=args.max_iter,
        seed=args.seed,
        strategy=strategy_from_args(args),
        weight_exponent=args.weight_exp,
        solver=args.solver,
    )


def _add_layout_flags(p: argparse.ArgumentParser, strategy: bool = True) -> None:
    if strategy:
        p.add_argument("--strategy", choices=["none", "fixed", "enum", "prob"], default="fixed")
        p.add_argument("--omega", type=float, default=None, help="relax factor for --strategy fixed")
        p.add_argument("--candidates", default=None, help="comma list for --strategy enum")
        p.add_argument("--dist", default=None, help="omega:prob pairs for --strategy prob")
    p.add_argument("--rel-err", type=float, default=None)
    p.add_argument("--max-iter", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--weight-exp", type=float, default=-2.0)
    p.add_argument("--solver", choices=["auto", "direct", "cg"], default="auto")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sorlayout", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("layout", help="lay out one graph")
    p.add_argument("input", help="edge-list path or generator spec such as band-46")
    _add_layout_flags(p)
    p.add_argument("--out", default=None, help="placement TSV (default stdout)")
    p.add_argument("--svg", default=None)
    p.add_argument("--trace", default=None, help="per-iteration trace JSON")
    p.set_defaults(func=cmd_layout)

    p = sub.add_parser("bench", help="multi-seed benchmark over datasets and strategies")
    p.add_argument("datasets", nargs="+", help="generator specs or edge-list paths, optional @REL_ERR")
    p.add_argument("--strategies", default="none,fixed=0.5,fixed=1.0,fixed=1.5,prob,enum",
                   help="labels separated by ';' or ',' e.g. none,fixed=1.5,prob,enum")
    p.add_argument("--seeds", type=int, default=20)
    _add_layout_flags(p, strategy=False)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default=None, help="report JSON path")
    p.add_argument("--table", default="-", help="plain-text table path (default stdout)")
    p.add_argument("--no-timings", action="store_true", help="omit wall-clock fields from JSON")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("compare", help="stress-vs-iteration/time curves")
    p.add_argument("dataset")
    p.add_argument("--strategies", default="none,fixed=0.5,fixed=1.0,fixed=1.5,prob,enum")
    p.add_argument("--seeds", type=int, default=20)
    p.add_argument("--targets", default=None, help="comma list of target stresses")
    _add_layout_flags(p, strategy=False)
    p.add_argument("--out", default=None, help="curve CSV (default stdout)")
    p.add_argument("--reach", default=None, help="iterations-to-reach CSV")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("gen", help="write a generated benchmark graph")
    p.add_argument("family", choices=["band", "grid"])
    p.add_argument("n", type=int)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("rate", help="convergence-rate report for a small graph")
    p.add_argument("input")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--rel-err", type=float, default=1e-10)
    p.add_argument("--weight-exp", type=float, default=-2.0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_rate)
    return parser


def parse_strategy_list(text: str):
    # 'fixed=1.5' is accepted so that ',' can separate labels
    labels = [t.strip().replace("=", ":") for t in text.replace(";", ",").split(",") if t.strip()]
    return [bench.parse_strategy(label) for label in labels]


def cmd_layout(args) -> int:
    ds = bench.resolve_dataset(args.input)
    cfg = config_from_args(args, rel_err_default=ds.rel_err)
    trace = run_layout(ds.graph, cfg)
    _emit(write_placement_tsv(trace), args.out)
    if args.svg:
        Path(args.svg).write_text(write_svg(trace.placement, ds.graph), encoding="utf-8")
    if args.trace:
        Path(args.trace).write_text(write_trace_json(trace, cfg.echo()), encoding="utf-8")
    logging.info("%s: %d iterations, stress %.6g (%s)", ds.name, trace.iterations,
                 trace.final_stress, trace.reason)
    return 0


def cmd_bench(args) -> int:
    strategies = parse_strategy_list(args.strategies)
    datasets = [bench.resolve_dataset(s, args.rel_err) for s in args.datasets]
    base = LayoutConfig(dim=args.dim, max_iter=args.max_iter, weight_exponent=args.weight_exp,
                        solver=args.solver)
    report = bench.run_bench(datasets, strategies, range(1, args.seeds + 1), base, jobs=args.jobs)
    if args.out:
        Path(args.out).write_text(write_report_json(report, timings=not args.no_timings), encoding="utf-8")
    _emit(format_table(report), args.table)
    failed = sum(1 for r in report.runs if not r.ok)
    if failed:
        logging.warning("%d of %d runs failed", failed, len(report.runs))
    return 0


def cmd_compare(args) -> int:
    strategies = parse_strategy_list(args.strategies)
    ds = bench.resolve_dataset(args.dataset, args.rel_err)
    base = LayoutConfig(dim=args.dim, max_iter=args.max_iter, weight_exponent=args.weight_exp,
                        solver=args.solver)
    targets = _floats(args.targets) if args.targets else None
    result = bench.run_compare(ds, strategies, range(1, args.seeds + 1), targets, base)
    _emit(bench.write_csv(result.curves), args.out)
    if args.reach:
        Path(args.reach).write_text(bench.write_csv(result.reach), encoding="utf-8")
    return 0


def cmd_gen(args) -> int:
    g = generate(args.family, args.n)
    _emit(write_edge_list(g), args.out)
    return 0


def cmd_rate(args) -> int:
    ds = bench.resolve_dataset(args.input)
    if ds.graph.n > RATE_MAX_N:
        raise InvalidSize(f"rate analysis is limited to n <= {RATE_MAX_N}, got {ds.graph.n}")
    report = analyze_rate(ds.graph, dim=args.dim, seed=args.seed, rel_err=args.rel_err,
                          weight_exponent=args.weight_exp)
    out = {"dataset": ds.name, **report.to_dict(), "clean_fit": report.clean}
    _emit(json.dumps(out, indent=2) + "\n", args.out)
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (LayoutError, ValueError, OSError) as exc:
        print(f"sorlayout: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
