"""Majorization layout loop with optional successive over-relaxation (SOR).

Each iteration takes a plain majorization step to ``X_next``, optionally forms
the relaxed point ``(1 + omega) X_next - omega X_prev`` and keeps it only if
its stress is not larger. The relax factor ``omega`` comes from a
:data:`RelaxStrategy`.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, NamedTuple, Optional, Tuple, Union

import numpy as np

from .errors import NonFiniteStress
from .graph import Graph, shortest_path_distances
from .solver import Majorizer
from .stress import DEFAULT_WEIGHT_EXPONENT, StressModel, as_placement, default_weights

DEFAULT_CANDIDATES: Tuple[float, ...] = tuple(0.5 * k for k in range(19))
DEFAULT_DISTRIBUTION: Tuple[Tuple[float, float], ...] = ((0.5, 0.3), (1.0, 0.3), (1.5, 0.2), (2.0, 0.2))


@dataclass(frozen=True)
class NonSOR:
    """Plain majorization, omega is always 0."""

    @property
    def label(self) -> str:
        return "none"

    def params(self) -> dict:
        return {"kind": "none"}


@dataclass(frozen=True)
class Fixed:
    omega: float

    def __post_init__(self):
        if not (math.isfinite(self.omega) and self.omega >= 0):
            raise ValueError(f"relax factor must be finite and >= 0, got {self.omega}")
        object.__setattr__(self, "omega", float(self.omega))

    @property
    def label(self) -> str:
        return f"fixed:{float(self.omega)!r}"

    def params(self) -> dict:
        return {"kind": "fixed", "omega": self.omega}


@dataclass(frozen=True)
class Enumerating:
    """Try every candidate each iteration and keep the one with least stress."""

    candidates: Tuple[float, ...] = DEFAULT_CANDIDATES

    def __post_init__(self):
        cands = tuple(sorted(float(c) for c in self.candidates))
        if not cands:
            raise ValueError("candidate set must be non-empty")
        if any(not math.isfinite(c) or c < 0 for c in cands):
            raise ValueError("candidates must be finite and >= 0")
        object.__setattr__(self, "candidates", cands)

    @property
    def label(self) -> str:
        return "enum"

    def params(self) -> dict:
        return {"kind": "enum", "candidates": list(self.candidates)}


@dataclass(frozen=True)
class Probabilistic:
    """Roulette draw of omega from a fixed prior, once per iteration."""

    distribution: Tuple[Tuple[float, float], ...] = DEFAULT_DISTRIBUTION

    def __post_init__(self):
        dist = tuple((float(o), float(p)) for o, p in self.distribution)
        if not dist:
            raise ValueError("distribution must be non-empty")
        for o, p in dist:
            if not math.isfinite(o) or o < 0:
                raise ValueError(f"omega must be finite and >= 0, got {o}")
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"probability {p} outside [0, 1]")
        if abs(math.fsum(p for _, p in dist) - 1.0) > 1e-12:
            raise ValueError("probabilities must sum to 1")
        object.__setattr__(self, "distribution", dist)

    @property
    def omegas(self) -> np.ndarray:
        return np.array([o for o, _ in self.distribution])

    @property
    def probabilities(self) -> np.ndarray:
        p = np.array([p for _, p in self.distribution])
        return p / p.sum()

    @property
    def label(self) -> str:
        return "prob"

    def params(self) -> dict:
        return {"kind": "prob", "distribution": [list(t) for t in self.distribution]}


RelaxStrategy = Union[NonSOR, Fixed, Enumerating, Probabilistic]


@dataclass(frozen=True)
class LayoutConfig:
    dim: int = 2
    rel_err: float = 1e-6
    max_iter: int = 10_000
    seed: int = 1
    strategy: RelaxStrategy = field(default_factory=lambda: Fixed(1.5))
    weight_exponent: float = DEFAULT_WEIGHT_EXPONENT
    solver: str = "auto"
    # CG tolerance; None means 0.01 * rel_err
    cg_tol: Optional[float] = None

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if not self.rel_err > 0:
            raise ValueError("rel_err must be > 0")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a non-negative 64-bit integer")
        if self.solver not in ("auto", "direct", "cg"):
            raise ValueError(f"unknown solver {self.solver!r}")

    @property
    def effective_cg_tol(self) -> float:
        return self.cg_tol if self.cg_tol is not None else 0.01 * self.rel_err

    def echo(self) -> dict:
        return {
            "dim": self.dim,
            "rel_err": self.rel_err,
            "max_iter": self.max_iter,
            "seed": self.seed,
            "strategy": self.strategy.params(),
            "weight_exponent": self.weight_exponent,
            "solver": self.solver,
        }


@dataclass
class IterationRecord:
    iteration: int
    stress: float
    omega: float
    accepted: bool
    seconds: float


@dataclass
class IterationTrace:
    records: List[IterationRecord]
    initial_stress: float
    placement: np.ndarray
    reason: str
    setup_seconds: float = 0.0
    placements: Optional[List[np.ndarray]] = None

    @property
    def iterations(self) -> int:
        return len(self.records)

    @property
    def stresses(self) -> np.ndarray:
        return np.array([r.stress for r in self.records])

    @property
    def final_stress(self) -> float:
        return self.records[-1].stress if self.records else self.initial_stress

    @property
    def loop_seconds(self) -> float:
        return math.fsum(r.seconds for r in self.records)

    @property
    def total_seconds(self) -> float:
        return self.setup_seconds + self.loop_seconds


class OmegaChoice(NamedTuple):
    omega: float
    evaluations: int


def init_placement(n: int, d: int, seed: int) -> np.ndarray:
    """Uniform random start on the unit (hyper)cube, shifted so vertex 0 is at the origin."""
    if n < 1 or d < 1:
        raise ValueError("need n >= 1 and d >= 1")
    x = np.random.default_rng(seed).random((n, d))
    return x - x[0]


def sor_combine(x_next: np.ndarray, x_prev: np.ndarray, omega: float) -> np.ndarray:
    if x_next.shape != x_prev.shape:
        raise ValueError(f"shape mismatch {x_next.shape} vs {x_prev.shape}")
    if omega == 0:
        return x_next.copy()
    return (1.0 + omega) * x_next - omega * x_prev


def choose_omega(
    strategy: RelaxStrategy,
    x_next: np.ndarray,
    x_prev: np.ndarray,
    stress_fn: Callable[[np.ndarray], float],
    rng: Optional[np.random.Generator] = None,
    cache: Optional[Dict[float, Tuple[np.ndarray, float]]] = None,
) -> OmegaChoice:
    """Pick the relax factor for this iteration.

    Only :class:`Enumerating` calls ``stress_fn``. When ``cache`` is given, each
    evaluated candidate is stored there as ``omega -> (placement, stress)``.
    """
    if isinstance(strategy, NonSOR):
        return OmegaChoice(0.0, 0)
    if isinstance(strategy, Fixed):
        return OmegaChoice(strategy.omega, 0)
    if isinstance(strategy, Probabilistic):
        if rng is None:
            raise ValueError("probabilistic strategy needs a random generator")
        return OmegaChoice(float(rng.choice(strategy.omegas, p=strategy.probabilities)), 0)
    if isinstance(strategy, Enumerating):
        best_omega, best_stress = None, math.inf
        for omega in strategy.candidates:
            cand = sor_combine(x_next, x_prev, omega)
            s = stress_fn(cand)
            if cache is not None:
                cache[omega] = (cand, s)
            # strict '<' with ascending candidates breaks ties toward smaller omega
            if s < best_stress or best_omega is None:
                best_omega, best_stress = omega, s
        return OmegaChoice(best_omega, len(strategy.candidates))
    raise TypeError(f"unknown strategy {strategy!r}")


def prepare(g: Graph, cfg: LayoutConfig, dist: Optional[np.ndarray] = None):
    """Distances, weights, stress model and majorizer for ``g`` under ``cfg``."""
    if dist is None:
        dist = shortest_path_distances(g)
    w = default_weights(dist, cfg.weight_exponent)
    model = StressModel(dist, w)
    majorizer = Majorizer(w, dist, backend=cfg.solver, cg_tol=cfg.effective_cg_tol, model=model)
    return dist, w, model, majorizer


def run_layout(
    g: Graph,
    cfg: LayoutConfig,
    dist: Optional[np.ndarray] = None,
    initial: Optional[np.ndarray] = None,
    record_placements: bool = False,
) -> IterationTrace:
    """Iterate majorization (+ SOR) from a seeded random start until the relative
    stress decrease drops below ``cfg.rel_err``, stress hits 0, or ``cfg.max_iter``.

    ``dist`` may carry precomputed shortest-path distances; ``initial``
    overrides the random start (it is shifted so vertex 0 sits at the origin).
    """
    t_setup = time.perf_counter()
    _, _, model, majorizer = prepare(g, cfg, dist)
    if initial is None:
        x = init_placement(g.n, cfg.dim, cfg.seed)
    else:
        x = as_placement(initial).copy()
        if x.shape != (g.n, cfg.dim):
            raise ValueError(f"initial placement has shape {x.shape}, expected {(g.n, cfg.dim)}")
        x -= x[0]
    rng = np.random.default_rng([cfg.seed, 1])
    r = model.pairwise(x)
    f = model.from_pairwise(r)
    setup = time.perf_counter() - t_setup

    records: List[IterationRecord] = []
    placements = [x.copy()] if record_placements else None
    trace = IterationTrace(records, f, x, "max_iter", setup, placements)
    if not math.isfinite(f):
        trace.reason = "non_finite"
        raise NonFiniteStress(0, trace)
    if f == 0.0:
        trace.reason = "zero_stress"
        return trace

    relax = not isinstance(cfg.strategy, NonSOR)
    for k in range(1, cfg.max_iter + 1):
        t0 = time.perf_counter()
        x_next = majorizer.step(x, r)
        r_next = model.pairwise(x_next)
        f_next = model.from_pairwise(r_next)
        omega, accepted = 0.0, False
        if relax:
            cache: Dict[float, Tuple[np.ndarray, float]] = {}
            omega, _ = choose_omega(cfg.strategy, x_next, x, model, rng, cache)
            if omega in cache:
                cand, f_cand = cache[omega]
                r_cand = None
            else:
                cand = sor_combine(x_next, x, omega)
                r_cand = model.pairwise(cand)
                f_cand = model.from_pairwise(r_cand)
            # raw '<=': ties accept the relaxed point
            if f_cand <= f_next:
                x_next, f_next = cand, f_cand
                r_next = r_cand if r_cand is not None else model.pairwise(cand)
                accepted = omega != 0.0
        seconds = time.perf_counter() - t0
        records.append(IterationRecord(k, f_next, omega, accepted, seconds))
        if record_placements:
            placements.append(x_next.copy())

        if not math.isfinite(f_next):
            trace.reason = "non_finite"
            trace.placement = x
            raise NonFiniteStress(k, trace)
        done = None
        if f_next == 0.0:
            done = "zero_stress"
        elif (f - f_next) / f < cfg.rel_err:
            done = "rel_err"
        x, r, f = x_next, r_next, f_next
        if done:
            trace.reason = done
            break
    trace.placement = x
    return trace
