"""Uniform sampling grids on boxes ``[-R, R]^d``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["GridSpec", "DEFAULT_R", "DEFAULT_N_1D", "DEFAULT_N_2D", "pair_grid"]

DEFAULT_R = 4.0
DEFAULT_N_1D = 257
DEFAULT_N_2D = 65


@dataclass(frozen=True)
class GridSpec:
    """``points`` nodes per axis, uniformly spaced on ``[-radius, radius]``."""

    radius: float = DEFAULT_R
    points: int = DEFAULT_N_1D

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("grid radius must be positive")
        if self.points < 3:
            raise ValueError("grid needs at least 3 points per axis")

    @property
    def h(self) -> float:
        return 2.0 * self.radius / (self.points - 1)

    def axis(self) -> np.ndarray:
        return np.linspace(-self.radius, self.radius, self.points)

    def nodes(self, dim: int) -> np.ndarray:
        """All grid nodes in R^dim, shape ``(points**dim, dim)``, C order."""
        ax = self.axis()
        mesh = np.meshgrid(*([ax] * dim), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def scaled(self, factor: float) -> "GridSpec":
        return GridSpec(self.radius * factor, self.points)

    def refined(self) -> "GridSpec":
        """Same box, half the spacing."""
        return GridSpec(self.radius, 2 * self.points - 1)

    def to_dict(self):
        return {"R": self.radius, "N": self.points}


def pair_grid(x_grid: GridSpec, xstar_grid: GridSpec, n: int):
    """Product grid over ``(x, x*)`` in R^n x R^n; returns ``(X, Xs)``."""
    X = x_grid.nodes(n)
    Xs = xstar_grid.nodes(n)
    ii, jj = np.meshgrid(np.arange(len(X)), np.arange(len(Xs)), indexing="ij")
    return X[ii.ravel()], Xs[jj.ravel()]
