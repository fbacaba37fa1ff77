"""Numerical check of the linear convergence rate of plain majorization.

The iteration map H (one majorization step, vertex 0 pinned) has Jacobian
``I - (2 L^W)^{-1} Hess f`` at a fixed point, which is self-adjoint in the
inner product induced by the reduced weight Laplacian. Its spectral radius
is estimated by power iteration on finite-difference Jacobian-vector
products and compared with the contraction factor fitted to an actual run.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass
from itertools import combinations
from typing import List, Optional, Sequence

import numpy as np
from scipy.linalg import orthogonal_procrustes

from .errors import InsufficientTail, NoConvergence
from .graph import Graph, shortest_path_distances
from .layout import IterationTrace, LayoutConfig, NonSOR, run_layout
from .solver import Majorizer
from .stress import default_weights

MIN_TAIL = 5
# RMS residual (natural-log units) below which a fitted tail counts as linear
CLEAN_FIT = 0.05


@dataclass
class RateReport:
    estimated_radius: float
    observed_rate: Optional[float]
    fit_quality: Optional[float]
    iterations_used: int
    n: int = 0
    dim: int = 0
    note: str = ""

    @property
    def clean(self) -> bool:
        return self.fit_quality is not None and self.fit_quality <= CLEAN_FIT

    def to_dict(self) -> dict:
        return asdict(self)


def _similarity_modes(x_star: np.ndarray) -> List[np.ndarray]:
    """Infinitesimal rotations of the pinned placement (none when d == 1)."""
    d = x_star.shape[1]
    modes = []
    for a, b in combinations(range(d), 2):
        gen = np.zeros((d, d))
        gen[a, b], gen[b, a] = -1.0, 1.0
        modes.append(x_star[1:] @ gen)
    return modes


def estimate_spectral_radius(
    g: Graph,
    cfg: LayoutConfig,
    x_star: np.ndarray,
    h: Optional[float] = None,
    dist: Optional[np.ndarray] = None,
    max_iter: int = 200,
    tol: float = 1e-4,
    seed: int = 0,
) -> float:
    """Spectral radius of the majorization map's Jacobian at ``x_star``.

    Power iteration on ``v -> (H(x* + h v) - H(x*)) / h`` over the free
    (non-pinned) coordinates, with rotation modes projected out for d >= 2.
    """
    if dist is None:
        dist = shortest_path_distances(g)
    x_star = np.asarray(x_star, dtype=float)
    if x_star.shape[0] < 2:
        return 0.0
    x_star = x_star - x_star[0]
    if h is None:
        h = 1e-5 * (1.0 + np.linalg.norm(x_star))
    if h <= 0:
        raise ValueError("h must be positive")

    w = default_weights(dist, cfg.weight_exponent)
    maj = Majorizer(w, dist, backend="direct")
    lap = maj.system.matrix

    def inner(u, v):
        return float(np.sum(u * (lap @ v)))

    basis = []
    for m in _similarity_modes(x_star):
        for b in basis:
            m = m - inner(b, m) * b
        norm = math.sqrt(max(inner(m, m), 0.0))
        if norm > 1e-12:
            basis.append(m / norm)

    def project(v):
        for b in basis:
            v = v - inner(b, v) * b
        return v

    base = maj.step(x_star)[1:]

    def jvp(v):
        x = x_star.copy()
        x[1:] += h * v
        return (maj.step(x)[1:] - base) / h

    rng = np.random.default_rng(seed)
    v = project(rng.standard_normal(x_star[1:].shape))
    v /= math.sqrt(inner(v, v))
    prev = None
    for it in range(1, max_iter + 1):
        u = project(jvp(v))
        est = math.sqrt(max(inner(u, u), 0.0))
        if est == 0.0:
            return 0.0
        if prev is not None and abs(est - prev) < tol:
            return est
        v, prev = u / est, est
    raise NoConvergence(max_iter, abs(est - prev), "power iteration did not settle")


def align(x: np.ndarray, ref: np.ndarray) -> np.ndarray:
    """Rotate/reflect ``x`` (pinned at vertex 0) onto ``ref``."""
    x = x - x[0]
    ref = ref - ref[0]
    rot, _ = orthogonal_procrustes(x, ref)
    return x @ rot


def rate_from_errors(errors: Sequence[float], floor: float = 0.0, window: Optional[int] = None):
    """Fit ``log e_k ~ a + k log(rate)`` over the tail of an error sequence.

    Points at or below ``floor`` are dropped. Returns ``(rate, rms_residual, points)``.
    """
    e = np.asarray(errors, dtype=float)
    k = np.arange(len(e))
    keep = e > floor
    k, e = k[keep], e[keep]
    if len(e) < MIN_TAIL:
        raise InsufficientTail(len(e), MIN_TAIL)
    if window is None:
        window = max(MIN_TAIL, len(e) // 2)
    k, e = k[-window:], e[-window:]
    y = np.log(e)
    slope, intercept = np.polyfit(k, y, 1)
    resid = y - (slope * k + intercept)
    rms = float(np.sqrt(np.mean(resid**2)))
    rate = float(math.exp(slope))
    if rate >= 1.0:
        warnings.warn(
            f"fitted rate {rate:.4f} >= 1 over a {len(k)}-point window: sequence is not contracting",
            RuntimeWarning,
            stacklevel=2,
        )
    return rate, rms, len(k)


def observed_rate(trace: IterationTrace, x_star: np.ndarray, floor: Optional[float] = None,
                  window: Optional[int] = None):
    """Per-iteration contraction factor of ``|X_k - x*|`` along a recorded trace.

    Returns ``(rate, fit_quality)``; the trace must have been run with
    ``record_placements=True``.
    """
    if floor is None:
        floor = noise_floor(x_star)
    rate, rms, _ = rate_from_errors(error_sequence(trace, x_star), floor, window)
    return rate, rms


def noise_floor(x_star: np.ndarray) -> float:
    return 1e-9 * (1.0 + np.linalg.norm(x_star))


def error_sequence(trace: IterationTrace, x_star: np.ndarray) -> np.ndarray:
    """``|align(X_k) - x*|`` for every recorded placement of ``trace``."""
    if trace.placements is None:
        raise ValueError("trace has no recorded placements")
    x_star = np.asarray(x_star, dtype=float)
    x_star = x_star - x_star[0]
    return np.array([np.linalg.norm(align(x, x_star) - x_star) for x in trace.placements])


def refine_fixed_point(g: Graph, cfg: LayoutConfig, x0: np.ndarray, dist: Optional[np.ndarray] = None,
                       max_iter: int = 20_000, tol: float = 1e-14) -> np.ndarray:
    """Keep iterating plain majorization until steps stall at round-off level."""
    if dist is None:
        dist = shortest_path_distances(g)
    w = default_weights(dist, cfg.weight_exponent)
    maj = Majorizer(w, dist, backend="direct")
    x = np.asarray(x0, dtype=float) - x0[0]
    scale = 1.0 + np.linalg.norm(x)
    for _ in range(max_iter):
        nxt = maj.step(x)
        if np.linalg.norm(nxt - x) <= tol * scale:
            return nxt
        x = nxt
    raise NoConvergence(max_iter, float(np.linalg.norm(nxt - x) / scale), "fixed point did not settle")


def analyze_rate(g: Graph, dim: int = 2, seed: int = 1, rel_err: float = 1e-10,
                 weight_exponent: float = -2.0, max_iter: int = 100_000) -> RateReport:
    """Converge plain majorization, then run both rate estimators.

    When the iterates reach the fixed point exactly within a few steps (the
    map is locally constant, as in one dimension) there is no linear tail to
    fit; the observed rate is then reported as 0 with ``fit_quality=None``.
    """
    dist = shortest_path_distances(g)
    cfg = LayoutConfig(dim=dim, rel_err=rel_err, seed=seed, strategy=NonSOR(),
                       weight_exponent=weight_exponent, solver="direct", max_iter=max_iter)
    trace = run_layout(g, cfg, dist=dist, record_placements=True)
    notes = []
    try:
        x_star = refine_fixed_point(g, cfg, trace.placement, dist)
    except NoConvergence:
        x_star = trace.placement
        notes.append("fixed point did not settle; convergence is sublinear")
    radius = estimate_spectral_radius(g, cfg, x_star, dist=dist)
    report = RateReport(radius, None, None, trace.iterations, g.n, dim)
    errors = error_sequence(trace, x_star)
    floor = noise_floor(x_star)
    try:
        report.observed_rate, report.fit_quality, _ = rate_from_errors(errors, floor)
    except InsufficientTail as exc:
        if errors[-1] <= floor:
            report.observed_rate = 0.0
            notes.append(f"finite convergence: error below noise floor after "
                         f"{int(np.argmax(errors <= floor))} iterations")
        else:
            notes.append(f"observed rate unavailable: {exc}")
    report.note = "; ".join(notes)
    return report
