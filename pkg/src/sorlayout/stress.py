"""Stress objective, pair weights and the two Laplacians of the majorizing quadratic.

All matrices are dense ``numpy`` arrays; with inverse-power weights every
vertex pair carries a nonzero weight, so there is no sparsity to exploit.
"""

from __future__ import annotations

import numpy as np
from scipy.spatial.distance import pdist, squareform

DEFAULT_WEIGHT_EXPONENT = -2.0


def as_placement(x) -> np.ndarray:
    """Coerce to a finite ``(n, d)`` float array; 1-D input is read as ``d = 1``."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2 or x.shape[1] < 1:
        raise ValueError(f"placement must be an (n, d) array with d >= 1, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("placement has non-finite coordinates")
    return x


def default_weights(dist: np.ndarray, exponent: float = DEFAULT_WEIGHT_EXPONENT) -> np.ndarray:
    """``w_ij = d_ij ** exponent`` off the diagonal, zero on it."""
    dist = np.asarray(dist, dtype=float)
    w = np.zeros_like(dist)
    off = ~np.eye(dist.shape[0], dtype=bool)
    w[off] = dist[off] ** exponent
    return w


def stress(x, dist: np.ndarray, w: np.ndarray) -> float:
    """Weighted raw stress ``sum_{i<j} w_ij (|x_i - x_j| - d_ij)^2``."""
    x = as_placement(x)
    iu = np.triu_indices(x.shape[0], 1)
    r = pdist(x)
    return float(np.sum(w[iu] * (r - dist[iu]) ** 2))


def weight_laplacian(w: np.ndarray) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    lap = -w.copy()
    np.fill_diagonal(lap, 0.0)
    np.fill_diagonal(lap, -lap.sum(axis=1))
    return lap


def iteration_laplacian(w: np.ndarray, dist: np.ndarray, y) -> np.ndarray:
    """Laplacian with off-diagonals ``-w_ij d_ij / |y_i - y_j|``.

    Pairs whose coordinates coincide exactly get 0 instead of a division by zero.
    """
    y = as_placement(y)
    r = squareform(pdist(y))
    with np.errstate(divide="ignore", invalid="ignore"):
        lap = np.where(r > 0, -w * dist / r, 0.0)
    np.fill_diagonal(lap, 0.0)
    np.fill_diagonal(lap, -lap.sum(axis=1))
    return lap


def dominant_value(x, y, w: np.ndarray, dist: np.ndarray) -> float:
    """The majorizing quadratic g(X, Y) = tr(X'L^W X) - 2 tr(X'L^Y Y) + C.

    Only used to check the bound g(X, Y) >= stress(X); the layout loop never calls it.
    """
    x = as_placement(x)
    y = as_placement(y)
    iu = np.triu_indices(x.shape[0], 1)
    const = float(np.sum(w[iu] * dist[iu] ** 2))
    lw = weight_laplacian(w)
    ly = iteration_laplacian(w, dist, y)
    return float(np.sum(x * (lw @ x)) - 2.0 * np.sum(x * (ly @ y)) + const)


class StressModel:
    """Precomputed condensed ideals/weights for repeated evaluation on one graph.

    ``pairwise`` distances of a placement can be computed once and shared by
    the stress value and the next iteration's right-hand side.
    """

    def __init__(self, dist: np.ndarray, w: np.ndarray):
        self.n = dist.shape[0]
        iu = np.triu_indices(self.n, 1)
        self.ideal = np.ascontiguousarray(dist[iu])
        self.weight = np.ascontiguousarray(w[iu])
        self.wd = self.weight * self.ideal

    def pairwise(self, x: np.ndarray) -> np.ndarray:
        return pdist(x)

    def from_pairwise(self, r: np.ndarray) -> float:
        diff = r - self.ideal
        return float(np.dot(self.weight, diff * diff))

    def __call__(self, x: np.ndarray) -> float:
        return self.from_pairwise(pdist(x))

    def ly_times(self, x: np.ndarray, r: np.ndarray | None = None) -> np.ndarray:
        """``L^Y Y`` for ``Y = x`` without forming the Laplacian explicitly."""
        if r is None:
            r = pdist(x)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(r > 0, self.wd / r, 0.0)
        full = squareform(ratio, checks=False)
        return full.sum(axis=1)[:, None] * x - full @ x
