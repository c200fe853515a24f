"""The space (0, inf)^N with the measure x^alpha dx."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import ValidationError


@dataclass(frozen=True)
class BesselParams:
    """Dimension and exponent vector of the Bessel operator."""

    alpha: tuple[float, ...]

    def __init__(self, alpha: float | Sequence[float]):
        if np.isscalar(alpha):
            alpha = (float(alpha),)
        alpha = tuple(float(a) for a in alpha)
        if len(alpha) == 0:
            raise ValidationError("alpha must have at least one component")
        for a in alpha:
            if not np.isfinite(a) or a <= -1.0:
                raise ValidationError(f"every alpha_j must exceed -1, got {a}")
        object.__setattr__(self, "alpha", alpha)

    @property
    def N(self) -> int:
        return len(self.alpha)

    @property
    def taus(self) -> tuple[float, ...]:
        """Bessel orders ``(alpha_j - 1)/2``."""
        return tuple(0.5 * (a - 1.0) for a in self.alpha)


@dataclass(frozen=True)
class Ball:
    center: tuple[float, ...]
    radius: float

    def __post_init__(self):
        c = tuple(float(v) for v in np.atleast_1d(self.center))
        if any(v <= 0 for v in c):
            raise ValidationError("ball center must be strictly positive")
        if not self.radius > 0:
            raise ValidationError("ball radius must be positive")
        object.__setattr__(self, "center", c)


@dataclass(frozen=True)
class BallMeasure:
    """Value of ``nu(B)`` plus whether it is exact or the product surrogate."""

    value: float
    exact: bool
    note: str = field(default="")

    def __float__(self) -> float:
        return self.value


def homogeneous_dimension(params: BesselParams) -> float:
    """``d = sum_j max(1, alpha_j + 1)``."""
    return float(sum(max(1.0, a + 1.0) for a in params.alpha))


def interval_measure(alpha, center, radius):
    """``nu_1((x - r, x + r) cap (0, inf))`` for ``d nu_1 = x^alpha dx``, vectorised."""
    alpha = np.asarray(alpha, dtype=float)
    x = np.asarray(center, dtype=float)
    r = np.asarray(radius, dtype=float)
    lo = np.maximum(0.0, x - r)
    return ((x + r) ** (alpha + 1.0) - lo ** (alpha + 1.0)) / (alpha + 1.0)


def ball_measure(params: BesselParams, ball: Ball) -> BallMeasure:
    """Measure of a Euclidean ball.

    Exact for ``N = 1``.  For ``N >= 2`` the product of one-dimensional interval
    measures is returned; it is comparable to the true ball measure up to
    constants depending on ``N`` only, which is all the ratio checks need.
    """
    if len(ball.center) != params.N:
        raise ValidationError("ball dimension does not match params")
    vals = [float(interval_measure(a, c, ball.radius)) for a, c in zip(params.alpha, ball.center)]
    if params.N == 1:
        return BallMeasure(vals[0], True)
    return BallMeasure(float(np.prod(vals)), False, "product-of-intervals surrogate")


def ball_measure_array(params: BesselParams, centers, radius) -> np.ndarray:
    """Vectorised ball (or surrogate) measure; ``centers`` has shape ``(..., N)``."""
    centers = np.asarray(centers, dtype=float)
    if params.N == 1 and centers.ndim == 0:
        centers = centers[None]
    out = np.ones(np.broadcast_shapes(centers.shape[:-1], np.shape(radius)))
    for j, a in enumerate(params.alpha):
        out = out * interval_measure(a, centers[..., j], radius)
    return out


def one_dim_ball_asymptotic(alpha_j: float, y_j, R):
    """``R^{(alpha+1)/2} (1 + sqrt(R) y)^{-alpha}``, comparable to ``nu_j(B(y, R^{-1/2}))^{-1}``."""
    if alpha_j <= -1:
        raise ValidationError("alpha_j must exceed -1")
    R = np.asarray(R, dtype=float)
    y = np.asarray(y_j, dtype=float)
    return R ** ((alpha_j + 1.0) / 2.0) * (1.0 + np.sqrt(R) * y) ** (-alpha_j)


def geometric_probe_grid(k_range: Iterable[int] = range(-10, 11),
                         m_range: Iterable[int] = range(-10, 11),
                         gammas: Iterable[float] = tuple(2.0 ** j for j in range(0, 11))):
    """Deterministic lattice of (center, radius, gamma): centers 2^k, radii 2^m."""
    ks, ms, gs = list(k_range), list(m_range), list(gammas)
    return [(2.0 ** k, 2.0 ** m, g) for k in ks for m in ms for g in gs]


def doubling_constant_probe(params: BesselParams, grid, d: float | None = None) -> float:
    """Empirical lower estimate of ``C_d`` in the doubling inequality.

    ``grid`` is an iterable of ``(Ball, gamma)`` pairs or of
    ``(center, radius, gamma)`` triples with a scalar center used on every
    axis.  ``d`` defaults to the homogeneous dimension; passing a smaller value
    lets callers watch the supremum blow up.
    """
    if d is None:
        d = homogeneous_dimension(params)
    probes = list(grid)
    if not probes:
        raise ValidationError("empty probe grid")
    centers, radii, gammas = [], [], []
    for item in probes:
        if isinstance(item[0], Ball):
            ball, g = item
            centers.append(ball.center)
            radii.append(ball.radius)
        else:
            c, r, g = item
            centers.append(tuple(np.broadcast_to(np.atleast_1d(c), (params.N,))))
            radii.append(r)
        gammas.append(g)
    centers = np.asarray(centers, dtype=float)
    radii = np.asarray(radii, dtype=float)
    gammas = np.asarray(gammas, dtype=float)
    big = ball_measure_array(params, centers, gammas * radii)
    small = ball_measure_array(params, centers, radii)
    return float(np.max(big / ((1.0 + gammas) ** d * small)))
