"""Text formats: edge lists in, placements / SVG / traces / bench reports out."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional

import numpy as np

from .errors import DuplicateEdge, MissingHeader, ParseError, SelfLoop, UnsupportedDimension
from .graph import Graph
from .layout import IterationTrace


# -- edge lists -----------------------------------------------------------

def parse_edge_list(text: str) -> Graph:
    """Parse ``vertices N`` followed by ``u v [length]`` lines; ``#`` starts a comment."""
    n = None
    edges = []
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if n is None:
            if fields[0] != "vertices":
                raise MissingHeader(lineno)
            if len(fields) != 2:
                raise ParseError(lineno, "header must be 'vertices N'")
            try:
                n = int(fields[1])
            except ValueError:
                raise ParseError(lineno, f"bad vertex count {fields[1]!r}") from None
            if n < 1:
                raise ParseError(lineno, "vertex count must be positive")
            continue
        if len(fields) not in (2, 3):
            raise ParseError(lineno, f"expected 'u v [length]', got {line!r}")
        try:
            u, v = int(fields[0]), int(fields[1])
        except ValueError:
            raise ParseError(lineno, "vertex ids must be integers") from None
        length = None
        if len(fields) == 3:
            try:
                length = float(fields[2])
            except ValueError:
                raise ParseError(lineno, f"bad length {fields[2]!r}") from None
            if not (math.isfinite(length) and length > 0):
                raise ParseError(lineno, f"length must be finite and positive, got {fields[2]}")
        if not (0 <= u < n and 0 <= v < n):
            raise ParseError(lineno, f"vertex id out of range 0..{n - 1}")
        if u == v:
            raise SelfLoop(u, lineno)
        key = (min(u, v), max(u, v))
        if key in seen:
            raise DuplicateEdge(u, v, lineno)
        seen.add(key)
        edges.append((u, v, length))
    if n is None:
        raise MissingHeader(1)
    return Graph(n, tuple(edges))


def write_edge_list(g: Graph) -> str:
    lines = [f"vertices {g.n}"]
    for u, v, length in g.edges:
        lines.append(f"{u} {v}" if length is None else f"{u} {v} {length!r}")
    return "\n".join(lines) + "\n"


# -- placements -------------------------------------------------------------

def write_placement_tsv(placement) -> str:
    """Tab-separated coordinates, 10 significant digits. Accepts a trace or an array."""
    x = placement.placement if isinstance(placement, IterationTrace) else placement
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    header = "\t".join(["vertex"] + [f"x{j}" for j in range(x.shape[1])])
    rows = [header]
    for i, row in enumerate(x):
        rows.append("\t".join([str(i)] + [_fmt(c) for c in row]))
    return "\n".join(rows) + "\n"


def _fmt(c: float) -> str:
    c = float(c)
    if c == 0.0:
        return "0"
    return f"{c:.10g}"


def parse_placement_tsv(text: str) -> np.ndarray:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("vertex"):
        raise ParseError(1, "missing placement header")
    d = len(lines[0].split("\t")) - 1
    x = np.zeros((len(lines) - 1, d))
    for lineno, ln in enumerate(lines[1:], start=2):
        fields = ln.split("\t")
        if len(fields) != d + 1:
            raise ParseError(lineno, f"expected {d + 1} fields")
        x[int(fields[0])] = [float(f) for f in fields[1:]]
    return x


# -- SVG --------------------------------------------------------------------

@dataclass
class SvgOptions:
    width: float = 800.0
    vertex_radius: float = 4.0
    stroke_width: float = 1.0
    edge_color: str = "#888888"
    vertex_color: str = "#1f4e79"
    margin: float = 0.05


def write_svg(placement, g: Graph, options: Optional[SvgOptions] = None) -> str:
    """Edges as straight segments, vertices as circles, scaled to fit with a margin."""
    opts = options or SvgOptions()
    x = np.asarray(placement, dtype=float)
    if x.ndim != 2 or x.shape[1] != 2:
        raise UnsupportedDimension(f"SVG output needs a 2-D placement, got shape {x.shape}")
    lo, hi = x.min(axis=0), x.max(axis=0)
    extent = float(max(hi[0] - lo[0], hi[1] - lo[1]))
    if extent == 0.0:
        extent = 1.0
    pad = opts.margin * extent
    span_x = (hi[0] - lo[0]) + 2 * pad
    span_y = (hi[1] - lo[1]) + 2 * pad
    scale = opts.width / max(span_x, span_y)
    width, height = span_x * scale, span_y * scale

    def px(p):
        # SVG y grows downward
        return (p[0] - lo[0] + pad) * scale, (hi[1] + pad - p[1]) * scale

    pts = [px(p) for p in x]
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width:.3f}" '
        f'height="{height:.3f}" viewBox="0 0 {width:.3f} {height:.3f}">',
        f'<g stroke="{opts.edge_color}" stroke-width="{opts.stroke_width:g}">',
    ]
    for u, v, _ in g.edges:
        (x1, y1), (x2, y2) = pts[u], pts[v]
        out.append(f'<line x1="{x1:.3f}" y1="{y1:.3f}" x2="{x2:.3f}" y2="{y2:.3f}"/>')
    out.append("</g>")
    out.append(f'<g fill="{opts.vertex_color}">')
    for i, (cx, cy) in enumerate(pts):
        out.append(f'<circle id="v{i}" cx="{cx:.3f}" cy="{cy:.3f}" r="{opts.vertex_radius:g}"/>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


# -- traces -----------------------------------------------------------------

def trace_to_dict(trace: IterationTrace, config: Optional[dict] = None) -> dict:
    return {
        "config": config or {},
        "reason": trace.reason,
        "iterations": trace.iterations,
        "initial_stress": trace.initial_stress,
        "final_stress": trace.final_stress,
        "setup_seconds": trace.setup_seconds,
        "records": [asdict(r) for r in trace.records],
    }


def write_trace_json(trace: IterationTrace, config: Optional[dict] = None) -> str:
    return json.dumps(trace_to_dict(trace, config), indent=2) + "\n"


# -- bench reports -----------------------------------------------------------

TIMING_FIELDS = ("seconds", "loop_seconds", "mean_seconds", "mean_iteration_seconds", "time_ratio")


@dataclass
class RunRecord:
    dataset: str
    n: int
    strategy: str
    seed: int
    iterations: Optional[int] = None
    seconds: Optional[float] = None
    loop_seconds: Optional[float] = None
    final_stress: Optional[float] = None
    reason: Optional[str] = None
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass
class Aggregate:
    dataset: str
    n: int
    strategy: str
    runs: int
    failures: int
    mean_iterations: Optional[float]
    mean_seconds: Optional[float]
    mean_iteration_seconds: Optional[float]
    mean_final_stress: Optional[float]
    iteration_ratio: Optional[float]
    time_ratio: Optional[float]


@dataclass
class BenchReport:
    config: Dict = field(default_factory=dict)
    runs: List[RunRecord] = field(default_factory=list)
    aggregates: List[Aggregate] = field(default_factory=list)

    def aggregate(self, dataset: str, strategy: str) -> Aggregate:
        for a in self.aggregates:
            if a.dataset == dataset and a.strategy == strategy:
                return a
        raise KeyError((dataset, strategy))


def _mean(values):
    values = list(values)
    return math.fsum(values) / len(values) if values else None


def aggregate_runs(runs: List[RunRecord], baseline: str = "none") -> List[Aggregate]:
    """Per (dataset, strategy) means and ratios against the dataset's baseline row.

    Failed runs are counted but excluded from every mean.
    """
    order: Dict[tuple, List[RunRecord]] = {}
    for r in runs:
        order.setdefault((r.dataset, r.strategy), []).append(r)
    rows = []
    for (dataset, strategy), cell in order.items():
        good = [r for r in cell if r.ok]
        rows.append(Aggregate(
            dataset=dataset,
            n=cell[0].n,
            strategy=strategy,
            runs=len(cell),
            failures=len(cell) - len(good),
            mean_iterations=_mean(r.iterations for r in good),
            mean_seconds=_mean(r.seconds for r in good),
            mean_iteration_seconds=_mean(r.loop_seconds / r.iterations for r in good if r.iterations),
            mean_final_stress=_mean(r.final_stress for r in good),
            iteration_ratio=None,
            time_ratio=None,
        ))
    base = {a.dataset: a for a in rows if a.strategy == baseline}
    for a in rows:
        b = base.get(a.dataset)
        if b is None:
            continue
        if a.mean_iterations is not None and b.mean_iterations:
            a.iteration_ratio = a.mean_iterations / b.mean_iterations
        if a.mean_seconds is not None and b.mean_seconds:
            a.time_ratio = a.mean_seconds / b.mean_seconds
    return rows


def report_to_dict(report: BenchReport, timings: bool = True) -> dict:
    def strip(d):
        return {k: v for k, v in d.items() if timings or k not in TIMING_FIELDS}

    return {
        "config": report.config,
        "aggregates": [strip(asdict(a)) for a in report.aggregates],
        "runs": [strip(asdict(r)) for r in report.runs],
    }


def write_report_json(report: BenchReport, timings: bool = True) -> str:
    """Serialize a report; ``timings=False`` drops wall-clock fields for diffing."""
    return json.dumps(report_to_dict(report, timings), indent=2) + "\n"


def parse_report_json(text: str) -> BenchReport:
    data = json.loads(text)
    return BenchReport(
        config=data.get("config", {}),
        runs=[RunRecord(**r) for r in data.get("runs", [])],
        aggregates=[Aggregate(**a) for a in data.get("aggregates", [])],
    )


def format_table(report: BenchReport) -> str:
    """Plain-text results table: mean and ratio vs baseline per strategy."""
    datasets: List[str] = []
    strategies: List[str] = []
    for a in report.aggregates:
        if a.dataset not in datasets:
            datasets.append(a.dataset)
        if a.strategy not in strategies:
            strategies.append(a.strategy)
    header = ["data set", "#vertices", "rel err", ""] + strategies
    rows = [header]
    rel = report.config.get("rel_err", {})
    for ds in datasets:
        cells = {a.strategy: a for a in report.aggregates if a.dataset == ds}
        n = next(iter(cells.values())).n
        it_row = [ds, str(n), f"{rel.get(ds, '')}", "num of iter"]
        tm_row = ["", "", "", "running time"]
        for s in strategies:
            a = cells.get(s)
            if a is None or a.mean_iterations is None:
                it_row.append("-")
                tm_row.append("-")
                continue
            ir = f"{100 * a.iteration_ratio:.1f}%" if a.iteration_ratio is not None else "-"
            tr = f"{100 * a.time_ratio:.1f}%" if a.time_ratio is not None else "-"
            it_row.append(f"{a.mean_iterations:.1f}/{ir}")
            tm_row.append(f"{a.mean_seconds:.3f}/{tr}")
        rows += [it_row, tm_row]
    widths = [max(len(r[i]) for r in rows) for i in range(len(header))]
    return "\n".join("  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in rows) + "\n"
