"""Multi-seed benchmark harness: every (dataset, strategy, seed) cell is one layout run."""

from __future__ import annotations

import csv
import functools
import io
import logging
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .formats import BenchReport, RunRecord, aggregate_runs, parse_edge_list
from .graph import Graph, generate, shortest_path_distances
from .layout import (
    Enumerating,
    Fixed,
    IterationTrace,
    LayoutConfig,
    NonSOR,
    Probabilistic,
    RelaxStrategy,
    run_layout,
)

log = logging.getLogger(__name__)

# termination thresholds for the reference benchmark sizes
REFERENCE_REL_ERR = {
    "band-46": 1e-6, "band-62": 1e-6, "band-86": 1e-6,
    "band-156": 1e-5, "band-303": 1e-5, "band-516": 1e-5,
    "grid-1109": 1e-4, "grid-1158": 1e-4,
}

TABLE_STRATEGIES = ("none", "fixed:0.5", "fixed:1.0", "fixed:1.5", "prob", "enum")


@dataclass(frozen=True)
class Dataset:
    name: str
    graph: Graph
    rel_err: float


def default_rel_err(n: int) -> float:
    if n < 150:
        return 1e-6
    if n < 1000:
        return 1e-5
    return 1e-4


_GEN_RE = re.compile(r"^(band|grid)[-:](\d+)$")


def resolve_dataset(spec: str, rel_err: Optional[float] = None) -> Dataset:
    """``band-156``, ``grid:100`` or a path to an edge-list file, optionally ``@REL_ERR``."""
    if "@" in spec:
        spec, _, tol = spec.rpartition("@")
        rel_err = float(tol)
    m = _GEN_RE.match(spec)
    if m:
        family, n = m.group(1), int(m.group(2))
        g = generate(family, n)
        name = f"{family}-{n}"
    else:
        path = Path(spec)
        g = parse_edge_list(path.read_text(encoding="utf-8"))
        name = path.stem
    if rel_err is None:
        rel_err = REFERENCE_REL_ERR.get(name, default_rel_err(g.n))
    return Dataset(name, g, rel_err)


def parse_strategy(label: str) -> RelaxStrategy:
    """Inverse of ``strategy.label``: ``none``, ``fixed:1.5``, ``enum``, ``prob``."""
    kind, _, arg = label.partition(":")
    if kind == "none":
        return NonSOR()
    if kind == "fixed":
        return Fixed(float(arg or 1.5))
    if kind == "enum":
        return Enumerating(tuple(float(c) for c in arg.split(",")) if arg else Enumerating().candidates)
    if kind == "prob":
        return Probabilistic(parse_distribution(arg) if arg else Probabilistic().distribution)
    raise ValueError(f"unknown strategy {label!r}")


def parse_distribution(text: str) -> Tuple[Tuple[float, float], ...]:
    pairs = []
    for item in text.split(","):
        omega, _, p = item.partition(":")
        pairs.append((float(omega), float(p)))
    return tuple(pairs)


@functools.lru_cache(maxsize=8)
def _distances(g: Graph) -> np.ndarray:
    return shortest_path_distances(g)


def run_cell(dataset: Dataset, strategy: RelaxStrategy, seed: int, base: LayoutConfig,
             keep_trace: bool = False):
    """One layout run; errors become a failed record instead of propagating."""
    cfg = replace(base, seed=seed, strategy=strategy, rel_err=dataset.rel_err)
    rec = RunRecord(dataset.name, dataset.graph.n, strategy.label, seed)
    trace = None
    try:
        trace = run_layout(dataset.graph, cfg, dist=_distances(dataset.graph))
        rec.iterations = trace.iterations
        rec.seconds = trace.total_seconds
        rec.loop_seconds = trace.loop_seconds
        rec.final_stress = trace.final_stress
        rec.reason = trace.reason
    except Exception as exc:  # harness isolation: one bad cell never aborts the bench
        log.warning("cell %s/%s/seed %d failed: %s", dataset.name, strategy.label, seed, exc)
        rec.error = f"{type(exc).__name__}: {exc}"
    return (rec, trace) if keep_trace else rec


def _cell_args(datasets, strategies, seeds):
    for ds in datasets:
        for st in strategies:
            for seed in seeds:
                yield ds, st, seed


def run_bench(
    datasets: Sequence[Dataset],
    strategies: Sequence[RelaxStrategy],
    seeds: Iterable[int],
    base: Optional[LayoutConfig] = None,
    jobs: int = 1,
) -> BenchReport:
    """Run every cell and aggregate means/ratios against each dataset's ``none`` row."""
    base = base or LayoutConfig()
    seeds = list(seeds)
    cells = list(_cell_args(datasets, strategies, seeds))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            runs = list(pool.map(_run_cell_tuple, [(ds, st, s, base) for ds, st, s in cells]))
    else:
        runs = [run_cell(ds, st, s, base) for ds, st, s in cells]
    config = {
        "seeds": seeds,
        "rel_err": {ds.name: ds.rel_err for ds in datasets},
        "strategies": [st.params() for st in strategies],
        "layout": {k: v for k, v in base.echo().items() if k not in ("seed", "strategy", "rel_err")},
    }
    return BenchReport(config=config, runs=runs, aggregates=aggregate_runs(runs))


def _run_cell_tuple(args):
    return run_cell(*args)


# -- stress curves ------------------------------------------------------------

@dataclass
class CurveSet:
    """Per-run stress curves plus iterations/time needed to reach target stresses."""

    curves: List[dict]
    reach: List[dict]


def run_compare(
    dataset: Dataset,
    strategies: Sequence[RelaxStrategy],
    seeds: Iterable[int],
    targets: Optional[Sequence[float]] = None,
    base: Optional[LayoutConfig] = None,
) -> CurveSet:
    base = base or LayoutConfig()
    seeds = list(seeds)
    traces: List[Tuple[str, int, IterationTrace]] = []
    for st in strategies:
        for seed in seeds:
            rec, trace = run_cell(dataset, st, seed, base, keep_trace=True)
            if trace is not None:
                traces.append((st.label, seed, trace))

    if targets is None:
        targets = default_targets([t for _, _, t in traces])
    curves = []
    for label, seed, trace in traces:
        elapsed = trace.setup_seconds
        curves.append(_curve_row(dataset.name, label, seed, 0, elapsed, trace.initial_stress, 0.0, False))
        for r in trace.records:
            elapsed += r.seconds
            curves.append(_curve_row(dataset.name, label, seed, r.iteration, elapsed, r.stress, r.omega, r.accepted))

    reach = []
    for st in strategies:
        mine = [t for label, _, t in traces if label == st.label]
        for target in targets:
            its, secs = [], []
            for t in mine:
                k, s = iterations_to_reach(t, target)
                if k is not None:
                    its.append(k)
                    secs.append(s)
            reach.append({
                "dataset": dataset.name,
                "strategy": st.label,
                "target_stress": target,
                "runs_reached": len(its),
                "runs": len(mine),
                "mean_iterations": float(np.mean(its)) if its else None,
                "mean_seconds": float(np.mean(secs)) if secs else None,
            })
    return CurveSet(curves, reach)


def _curve_row(dataset, strategy, seed, iteration, seconds, stress, omega, accepted):
    return {
        "dataset": dataset, "strategy": strategy, "seed": seed, "iteration": iteration,
        "seconds": seconds, "stress": stress, "omega": omega, "accepted": int(accepted),
    }


def iterations_to_reach(trace: IterationTrace, target: float):
    """First iteration (and cumulative loop time) whose stress is <= target."""
    if trace.initial_stress <= target:
        return 0, 0.0
    elapsed = 0.0
    for r in trace.records:
        elapsed += r.seconds
        if r.stress <= target:
            return r.iteration, elapsed
    return None, None


def default_targets(traces: Sequence[IterationTrace], count: int = 8) -> List[float]:
    """Geometric grid between the worst final stress and the best early stress."""
    finals = [t.final_stress for t in traces if t.records]
    firsts = [t.records[0].stress for t in traces if t.records]
    if not finals:
        return []
    hi, lo = min(firsts), max(finals) * (1 + 1e-3)
    if hi <= lo:
        return [lo]
    return [float(v) for v in np.geomspace(hi, lo, count)]


def write_csv(rows: List[dict]) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()
