"""Quadrature grids on (0, inf)^N and functions sampled on them."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

from .errors import GridMismatchError, ValidationError


@dataclass(frozen=True, eq=False)
class QuadGrid:
    """Nodes in (0, inf)^N with positive weights that already include x^alpha."""

    nodes: np.ndarray
    weights: np.ndarray
    description: str = ""

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        if nodes.ndim == 1:
            nodes = nodes[:, None]
        weights = np.asarray(self.weights, dtype=float)
        if nodes.shape[0] != weights.shape[0] or weights.ndim != 1:
            raise ValidationError("nodes and weights must have equal length")
        if nodes.shape[0] == 0:
            raise ValidationError("empty grid")
        if np.any(weights <= 0) or np.any(nodes <= 0):
            raise ValidationError("weights and nodes must be strictly positive")
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    @property
    def N(self) -> int:
        return self.nodes.shape[1]

    @property
    def size(self) -> int:
        return self.nodes.shape[0]

    def matches(self, other: "QuadGrid") -> bool:
        return self is other or (
            self.nodes.shape == other.nodes.shape
            and np.array_equal(self.nodes, other.nodes)
            and np.array_equal(self.weights, other.weights)
        )

    def integrate(self, values) -> complex:
        return np.sum(self.weights * np.asarray(values))


@dataclass(frozen=True, eq=False)
class GridFunction:
    grid: QuadGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.shape != (self.grid.size,):
            raise ValidationError("values length must equal node count")
        if np.any(np.isnan(values)):
            raise ValidationError("grid function contains NaN")
        object.__setattr__(self, "values", values)

    @classmethod
    def from_callable(cls, grid: QuadGrid, func) -> "GridFunction":
        """Sample ``func`` (called with the node array of shape (n, N)) on ``grid``."""
        return cls(grid, func(grid.nodes))

    def __add__(self, other: "GridFunction") -> "GridFunction":
        require_same_grid(self.grid, other.grid)
        return GridFunction(self.grid, self.values + other.values)

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        require_same_grid(self.grid, other.grid)
        return GridFunction(self.grid, self.values - other.values)

    def __mul__(self, s) -> "GridFunction":
        return GridFunction(self.grid, self.values * s)

    __rmul__ = __mul__

    def l2_norm(self) -> float:
        return float(np.sqrt(np.sum(self.grid.weights * np.abs(self.values) ** 2)))


def require_same_grid(a: QuadGrid, b: QuadGrid) -> None:
    if not a.matches(b):
        raise GridMismatchError("grid functions live on different grids")


@lru_cache(maxsize=64)
def _jacobi_rule(n: int, a: float, b: float):
    s, w = roots_jacobi(n, a, b)
    return s, w


@lru_cache(maxsize=64)
def _legendre_rule(n: int):
    return roots_legendre(n)


def gauss_jacobi(n: int, a: float, b: float):
    """Nodes/weights on [-1, 1] for the weight ``(1-s)^a (1+s)^b`` (cached)."""
    return _jacobi_rule(int(n), float(a), float(b))


def gauss_legendre(n: int):
    return _legendre_rule(int(n))


def jacobi_grid_1d(alpha: float, x_max: float, n: int) -> QuadGrid:
    """Gauss-Jacobi rule for ``int_0^{x_max} g(x) x^alpha dx``.

    Exact for polynomial ``g`` of degree < 2n and handles the integrable
    singularity of ``x^alpha`` at 0 for ``alpha < 0`` without grading.
    """
    if alpha <= -1:
        raise ValidationError("alpha must exceed -1")
    s, w = gauss_jacobi(n, 0.0, alpha)
    half = 0.5 * x_max
    nodes = half * (1.0 + s)
    weights = w * half ** (alpha + 1.0)
    return QuadGrid(nodes, weights, f"gauss-jacobi n={n} on (0,{x_max:g}] alpha={alpha:g}")


def tensor_grid(grids: Sequence[QuadGrid]) -> QuadGrid:
    """Tensor product of one-dimensional grids (last axis varies fastest)."""
    if len(grids) == 1:
        return grids[0]
    mesh = np.meshgrid(*[g.nodes[:, 0] for g in grids], indexing="ij")
    wmesh = np.meshgrid(*[g.weights for g in grids], indexing="ij")
    nodes = np.stack([m.ravel() for m in mesh], axis=1)
    weights = np.prod(np.stack([w.ravel() for w in wmesh], axis=1), axis=1)
    desc = " x ".join(g.description for g in grids)
    return QuadGrid(nodes, weights, desc)


def jacobi_grid(alpha: Sequence[float], x_max: float, n: int) -> QuadGrid:
    """Tensor Gauss-Jacobi grid on (0, x_max]^N for the measure ``x^alpha dx``."""
    return tensor_grid([jacobi_grid_1d(a, x_max, n) for a in alpha])


def panel_grid_1d(edges, alpha: float, n_per_panel: int) -> QuadGrid:
    """Composite Gauss-Legendre panels between consecutive ``edges``.

    The density ``x^alpha`` is folded into the weights.  The first panel uses
    a Gauss-Jacobi rule when it starts at 0 so negative ``alpha`` is handled.
    """
    edges = np.asarray(edges, dtype=float)
    if edges.ndim != 1 or edges.size < 2 or np.any(np.diff(edges) <= 0) or edges[0] < 0:
        raise ValidationError("edges must be increasing and nonnegative")
    s, w = gauss_legendre(n_per_panel)
    nodes, weights = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        half = 0.5 * (hi - lo)
        if lo == 0.0:
            sj, wj = gauss_jacobi(n_per_panel, 0.0, alpha)
            nodes.append(half * (1.0 + sj))
            weights.append(wj * half ** (alpha + 1.0))
        else:
            x = lo + half * (1.0 + s)
            nodes.append(x)
            weights.append(w * half * x ** alpha)
    return QuadGrid(np.concatenate(nodes), np.concatenate(weights),
                    f"gauss-legendre panels ({edges.size - 1} x {n_per_panel})")
