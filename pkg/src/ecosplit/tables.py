"""Small interpolation utilities shared by the powertrain and emission maps."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import OutOfEnvelope


@dataclass(frozen=True)
class Grid2D:
    """Rectangular lookup table: values[i, j] at (x[i], y[j])."""

    x: np.ndarray
    y: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float))
        object.__setattr__(self, "y", np.asarray(self.y, dtype=float))
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if self.x.ndim != 1 or self.y.ndim != 1:
            raise ValueError("grid axes must be 1-D")
        if np.any(np.diff(self.x) <= 0) or np.any(np.diff(self.y) <= 0):
            raise ValueError("grid axes must be strictly increasing")
        if self.values.shape != (len(self.x), len(self.y)):
            raise ValueError("table shape must match the axes")


def bilinear(grid: Grid2D, x, y):
    """Bilinear interpolation on the grid; exact at the nodes.

    Accepts scalars or arrays (broadcast together).  Points outside the
    grid hull raise OutOfEnvelope.
    """
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    scalar = xa.ndim == 0 and ya.ndim == 0
    xa, ya = np.broadcast_arrays(np.atleast_1d(xa), np.atleast_1d(ya))
    gx, gy, t = grid.x, grid.y, grid.values
    if np.any(xa < gx[0] - 1e-9) or np.any(xa > gx[-1] + 1e-9):
        raise OutOfEnvelope("first axis outside table hull")
    if np.any(ya < gy[0] - 1e-9) or np.any(ya > gy[-1] + 1e-9):
        raise OutOfEnvelope("second axis outside table hull")
    i = np.clip(np.searchsorted(gx, xa, side="right") - 1, 0, len(gx) - 2)
    j = np.clip(np.searchsorted(gy, ya, side="right") - 1, 0, len(gy) - 2)
    fx = np.clip((xa - gx[i]) / (gx[i + 1] - gx[i]), 0.0, 1.0)
    fy = np.clip((ya - gy[j]) / (gy[j + 1] - gy[j]), 0.0, 1.0)
    v = (
        t[i, j] * (1 - fx) * (1 - fy)
        + t[i + 1, j] * fx * (1 - fy)
        + t[i, j + 1] * (1 - fx) * fy
        + t[i + 1, j + 1] * fx * fy
    )
    return float(v[0]) if scalar else v


def monotone_interp(xk, yk, x, *, name: str = "table"):
    """1-D linear interpolation that refuses to extrapolate."""
    xk = np.asarray(xk, dtype=float)
    xa = np.asarray(x, dtype=float)
    if np.any(xa < xk[0] - 1e-9) or np.any(xa > xk[-1] + 1e-9):
        raise OutOfEnvelope(f"point outside {name} span")
    return np.interp(x, xk, yk)
