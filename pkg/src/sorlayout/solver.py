"""Linear systems ``L^W X = L^Y Y`` with vertex 0 pinned at the origin.

Deleting row/column 0 of the weight Laplacian leaves a symmetric positive
definite ``(n-1) x (n-1)`` matrix. It does not depend on the placement, so it
is reduced and factored once per layout.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from .errors import NoConvergence, SingularSystem
from .stress import StressModel, as_placement, weight_laplacian

DIRECT_MAX_N = 2000


@dataclass(frozen=True, eq=False)
class ReducedSystem:
    matrix: np.ndarray
    factor: Optional[tuple] = field(default=None, repr=False)

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    @property
    def checksum(self) -> str:
        return hashlib.sha256(np.ascontiguousarray(self.matrix).tobytes()).hexdigest()

    def factored(self) -> "ReducedSystem":
        if self.factor is not None:
            return self
        return ReducedSystem(self.matrix, _factor(self.matrix))


def _factor(matrix: np.ndarray):
    if matrix.size == 0:
        return (matrix, False)
    try:
        return cho_factor(matrix, lower=False, check_finite=True)
    except LinAlgError as exc:
        raise SingularSystem(f"reduced weight Laplacian is not positive definite: {exc}") from exc


def reduce(lw: np.ndarray, factor: bool = True) -> ReducedSystem:
    """Drop row and column 0 of a weight Laplacian.

    With ``factor=True`` (the default) the Cholesky factor is computed right
    away, which doubles as the positive-definiteness check.
    """
    lw = np.asarray(lw, dtype=float)
    matrix = np.array(lw[1:, 1:], copy=True)
    matrix.setflags(write=False)
    return ReducedSystem(matrix, _factor(matrix) if factor else None)


def solve_direct(system: ReducedSystem, rhs) -> np.ndarray:
    rhs = np.asarray(rhs, dtype=float)
    if system.size == 0:
        return np.zeros_like(rhs)
    if system.factor is None:
        raise ValueError("system has no cached factorization; build it with reduce(..., factor=True)")
    return cho_solve(system.factor, rhs, check_finite=False)


def solve_cg(
    system: ReducedSystem,
    rhs,
    warm_start=None,
    tol: float = 1e-10,
    max_iter: Optional[int] = None,
    return_info: bool = False,
):
    """Jacobi-preconditioned conjugate gradient for one right-hand side.

    Stops once ``|r| <= tol * |rhs|``. ``max_iter`` defaults to ``10 * n``;
    hitting it raises :class:`NoConvergence`. With ``return_info`` the
    iteration count is returned alongside the solution.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    a = system.matrix
    b = np.asarray(rhs, dtype=float)
    n = b.shape[0]
    if max_iter is None:
        max_iter = 10 * max(n, 1)
    x = np.zeros(n) if warm_start is None else np.array(warm_start, dtype=float)

    b_norm = np.linalg.norm(b)
    if b_norm == 0.0:
        x = np.zeros(n)
        return (x, 0) if return_info else x
    threshold = tol * b_norm

    r = b - a @ x
    r_norm = np.linalg.norm(r)
    if r_norm <= threshold:
        return (x, 0) if return_info else x

    inv_diag = 1.0 / np.diag(a)
    z = inv_diag * r
    p = z.copy()
    rz = r @ z
    for it in range(1, max_iter + 1):
        ap = a @ p
        alpha = rz / (p @ ap)
        x += alpha * p
        r -= alpha * ap
        r_norm = np.linalg.norm(r)
        if r_norm <= threshold:
            return (x, it) if return_info else x
        z = inv_diag * r
        rz_new = r @ z
        p = z + (rz_new / rz) * p
        rz = rz_new
    raise NoConvergence(max_iter, float(r_norm / b_norm))


class Majorizer:
    """One majorization step ``X -> argmin_X g(X, X_prev)`` for a fixed graph.

    Holds the reduced system (factored once) and, for the CG backend, the
    previous solution used as warm start.
    """

    def __init__(self, w: np.ndarray, dist: np.ndarray, backend: str = "auto",
                 cg_tol: float = 1e-10, model: Optional[StressModel] = None):
        n = w.shape[0]
        if backend == "auto":
            backend = "direct" if n <= DIRECT_MAX_N else "cg"
        if backend not in ("direct", "cg"):
            raise ValueError(f"unknown solver backend {backend!r}")
        self.backend = backend
        self.cg_tol = cg_tol
        self.model = model if model is not None else StressModel(dist, w)
        self.system = reduce(weight_laplacian(w), factor=(backend == "direct"))
        self.checksum = self.system.checksum
        self.fallbacks = 0

    def _solve(self, rhs: np.ndarray, warm: np.ndarray) -> np.ndarray:
        if self.backend == "direct":
            return solve_direct(self.system, rhs)
        out = np.empty_like(rhs)
        for j in range(rhs.shape[1]):
            try:
                out[:, j] = solve_cg(self.system, rhs[:, j], warm[:, j], self.cg_tol)
            except NoConvergence:
                self.fallbacks += 1
                self.system = self.system.factored()
                out[:, j] = solve_direct(self.system, rhs[:, j])
        return out

    def step(self, x: np.ndarray, r: Optional[np.ndarray] = None) -> np.ndarray:
        """Next placement from ``x``; ``r`` are x's condensed pair distances if known."""
        b = self.model.ly_times(x, r)
        out = np.zeros_like(x)
        if x.shape[0] > 1:
            out[1:] = self._solve(b[1:], x[1:])
        return out


def majorize_step(x, w: np.ndarray, dist: np.ndarray, backend: str = "direct",
                  cg_tol: float = 1e-12) -> np.ndarray:
    """Single majorization step from placement ``x``; vertex 0 lands on the origin."""
    x = as_placement(x)
    return Majorizer(w, dist, backend=backend, cg_tol=cg_tol).step(x)
