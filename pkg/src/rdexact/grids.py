"""Verification grids: (x, t) products with a configurable default.

The default grid resolves kinks of width O(1) on x in [-10, 10] with 401
points and t in [0, 2] with 201 points. It can be overridden with the
RD_GRID_DEFAULT environment variable ("xmin,xmax,nx,tmin,tmax,nt").
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

_DEFAULT = (-10.0, 10.0, 401, 0.0, 2.0, 201)


@dataclass(frozen=True)
class GridSpec:
    xmin: float
    xmax: float
    nx: int
    tmin: float
    tmax: float
    nt: int

    def __post_init__(self):
        if self.nx < 2 or self.nt < 1:
            raise ValueError(f"degenerate grid {self}")
        if not (self.xmax > self.xmin) or self.tmax < self.tmin:
            raise ValueError(f"empty grid extents {self}")

    @property
    def xs(self) -> np.ndarray:
        return np.linspace(self.xmin, self.xmax, self.nx)

    @property
    def ts(self) -> np.ndarray:
        if self.nt == 1:
            return np.array([self.tmin])
        return np.linspace(self.tmin, self.tmax, self.nt)

    def mesh(self):
        """(X, T) arrays of shape (nt, nx)."""
        return np.meshgrid(self.xs, self.ts)

    def as_list(self):
        return [self.xmin, self.xmax, self.nx, self.tmin, self.tmax, self.nt]

    @classmethod
    def parse(cls, text: str) -> "GridSpec":
        parts = text.split(",")
        if len(parts) != 6:
            raise ValueError("grid spec must be xmin,xmax,nx,tmin,tmax,nt")
        return cls(float(parts[0]), float(parts[1]), int(parts[2]),
                   float(parts[3]), float(parts[4]), int(parts[5]))


def default_grid() -> GridSpec:
    env = os.environ.get("RD_GRID_DEFAULT")
    if env:
        return GridSpec.parse(env)
    return GridSpec(*_DEFAULT)
