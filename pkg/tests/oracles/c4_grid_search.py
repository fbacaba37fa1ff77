"""Brute-force grid search for the minimum stress of the 4-cycle in the plane.

Independent of the package: ideal distances and weights are hard-coded
(edges 1, diagonals 2, weights d**-2). Vertex 0 sits at the origin and
vertex 1 on the positive x-axis, which removes translation and rotation.
A coarse full grid is followed by successively finer grids centred on the
incumbent. Run with ``python tests/oracles/c4_grid_search.py``.
"""

import itertools

import numpy as np

PAIRS = [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (0, 3, 1.0), (0, 2, 2.0), (1, 3, 2.0)]


def stress_batch(p):
    # p: (m, 5) -> x1, x2, y2, x3, y3
    pts = np.zeros((p.shape[0], 4, 2))
    pts[:, 1, 0] = p[:, 0]
    pts[:, 2] = p[:, 1:3]
    pts[:, 3] = p[:, 3:5]
    total = np.zeros(p.shape[0])
    for i, j, d in PAIRS:
        r = np.linalg.norm(pts[:, i] - pts[:, j], axis=1)
        total += (r - d) ** 2 / d**2
    return total


def grid_min(centre, half_width, steps):
    axes = [np.linspace(c - h, c + h, steps) for c, h in zip(centre, half_width)]
    best_val, best_pt = np.inf, None
    for x1 in axes[0]:
        rest = np.array(list(itertools.product(*axes[1:])))
        pts = np.column_stack([np.full(len(rest), x1), rest])
        vals = stress_batch(pts)
        k = int(np.argmin(vals))
        if vals[k] < best_val:
            best_val, best_pt = float(vals[k]), pts[k]
    return best_val, best_pt


def main():
    centre = np.array([1.25, 0.0, 0.0, 0.0, 0.0])
    half = np.array([1.25, 2.5, 2.5, 2.5, 2.5])
    val, pt = grid_min(centre, half, 41)
    print(f"coarse: {val:.12f} at {pt}")
    for _ in range(40):
        half = half / 4
        val, pt = grid_min(pt, half, 9)
    print(f"refined: {val:.15f} at {pt}")


if __name__ == "__main__":
    main()
