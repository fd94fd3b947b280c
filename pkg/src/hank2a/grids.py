"""Asset grids with double-exponential spacing and a node cluster at a = 0."""

from __future__ import annotations

import numpy as np

__all__ = ["build_grid", "liquid_grid"]


def build_grid(xmin: float, xmax: float, n: int) -> np.ndarray:
    """Double-exponentially spaced grid: dense near xmin, endpoints exact."""
    if xmax <= xmin:
        raise ValueError(f"need xmax > xmin, got [{xmin}, {xmax}]")
    if n < 2:
        raise ValueError(f"need at least 2 nodes, got {n}")
    u_max = np.log(1.0 + np.log(1.0 + xmax - xmin))
    u = np.linspace(0.0, u_max, n)
    grid = xmin + np.exp(np.exp(u) - 1.0) - 1.0
    grid[0], grid[-1] = xmin, xmax
    return grid


def liquid_grid(a_min: float, a_max: float, n_base: int, n_extra: int = 5) -> np.ndarray:
    """Liquid grid containing a_min and exactly 0, with extra nodes hugging 0.

    The borrowing wedge kinks policies at a = 0; the cluster keeps the kink
    resolvable under linear interpolation.
    """
    base = build_grid(a_min, a_max, n_base)
    if a_min < 0.0 < a_max:
        i0 = int(np.argmin(np.abs(base)))
        i0 = min(max(i0, 1), n_base - 2)
        base[i0] = 0.0
        gap_lo = 0.0 - base[i0 - 1]
        gap_hi = base[i0 + 1] - 0.0
        extra = np.array([-gap_lo / 3.0, -gap_lo / 9.0, gap_hi / 9.0, gap_hi / 3.0, 2.0 * gap_hi / 3.0])
        extra = extra[: n_extra]
        grid = np.unique(np.concatenate([base, extra]))
    elif a_min == 0.0:
        grid = base
    else:
        grid = np.unique(np.concatenate([base, [0.0]])) if a_max > 0.0 else base
    if not np.all(np.diff(grid) > 0):
        raise RuntimeError("liquid grid is not strictly increasing")
    return grid
