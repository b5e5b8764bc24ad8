"""Uniform 1D meshes, the Dirichlet Laplacian stencil, quadrature and weighted norms."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np


@dataclass(frozen=True)
class Grid1D:
    """Uniform mesh on ``[-L, L]`` with ``N`` points, Dirichlet truncation.

    Points are stored as ``h * (i - (N-1)/2)`` so the mesh is exactly
    symmetric about the origin; the end points are pinned to ``-L`` and ``L``.
    """

    half_length: float
    n_points: int
    boundary: str = "dirichlet"

    def __post_init__(self):
        if not np.isfinite(self.half_length) or self.half_length <= 0:
            raise ValueError(f"half_length must be positive, got {self.half_length}")
        if int(self.n_points) != self.n_points or self.n_points < 3:
            raise ValueError(f"n_points must be an integer >= 3, got {self.n_points}")
        if self.boundary != "dirichlet":
            raise ValueError(f"unsupported boundary '{self.boundary}'")

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_length / (self.n_points - 1)

    @cached_property
    def points(self) -> np.ndarray:
        n = self.n_points
        x = self.spacing * (np.arange(n) - 0.5 * (n - 1))
        x[0], x[-1] = -self.half_length, self.half_length
        x.flags.writeable = False
        return x

    @cached_property
    def weights(self) -> np.ndarray:
        """Trapezoidal quadrature weights."""
        w = np.full(self.n_points, self.spacing)
        w[0] = w[-1] = 0.5 * self.spacing
        w.flags.writeable = False
        return w

    @property
    def center(self) -> int:
        """Index of ``x = 0`` (``N`` odd) or of the first point right of it."""
        return self.n_points // 2


def make_grid(half_length: float, n_points: int) -> Grid1D:
    """Build a validated :class:`Grid1D`."""
    return Grid1D(float(half_length), int(n_points))


def grid_with_spacing(half_length: float, spacing: float) -> Grid1D:
    """Grid on ``[-L, L]`` whose spacing is as close as possible to ``spacing``."""
    n = int(round(2.0 * half_length / spacing)) + 1
    return make_grid(half_length, n)


@dataclass(frozen=True)
class WeightedNorm:
    """Polynomial weight ``<x>^{-s}`` with ``<x> = sqrt(1 + x^2)``."""

    exponent: float
    weights: np.ndarray = field(repr=False)

    @classmethod
    def on(cls, grid: Grid1D, s: float) -> "WeightedNorm":
        w = (1.0 + grid.points**2) ** (-0.5 * s)
        return cls(float(s), w)

    def __call__(self, u: np.ndarray, grid: Grid1D) -> float:
        return float(np.sqrt(np.sum(grid.weights * self.weights**2 * np.abs(u) ** 2)))


def second_derivative(grid: Grid1D):
    """Matrix of ``-d^2/dx^2`` with homogeneous Dirichlet data outside the mesh.

    Returns a :class:`hamspec.linop.SymOperator` wrapping the tridiagonal
    matrix with ``2/h^2`` on the diagonal and ``-1/h^2`` off it.
    """
    from .linop import SymOperator

    n, h = grid.n_points, grid.spacing
    inv = 1.0 / h**2
    mat = np.zeros((n, n))
    idx = np.arange(n)
    mat[idx, idx] = 2.0 * inv
    mat[idx[:-1], idx[1:]] = -inv
    mat[idx[1:], idx[:-1]] = -inv
    return SymOperator(mat, grid, "-d2/dx2")


def inner_product(u: np.ndarray, v: np.ndarray, grid: Grid1D) -> complex:
    """Trapezoidal approximation of the integral of ``u * conj(v)``."""
    u = np.asarray(u)
    v = np.asarray(v)
    if u.shape != v.shape or u.shape[-1] != grid.n_points:
        raise ValueError(f"shape mismatch: {u.shape} vs {v.shape} on {grid.n_points} points")
    return complex(np.sum(grid.weights * u * np.conj(v)))


def weighted_norm(u: np.ndarray, s: float, grid: Grid1D) -> float:
    """Norm of ``u`` in ``L^2_{-s}``, i.e. with weight ``<x>^{-2s}``."""
    return WeightedNorm.on(grid, s)(np.asarray(u), grid)


def weighted_norm_stacked(u: np.ndarray, s: float, grid: Grid1D) -> float:
    """``L^2_{-s}`` norm of a vector made of stacked grid functions (e.g. ``C^2``-valued)."""
    u = np.asarray(u)
    blocks = u.reshape(-1, grid.n_points)
    return float(np.sqrt(sum(weighted_norm(b, s, grid) ** 2 for b in blocks)))
