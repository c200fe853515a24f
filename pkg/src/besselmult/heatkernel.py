"""Bessel heat kernel, its Gaussian bounds, and the heat semigroup on grids.

The one-dimensional kernel is

    T_t(x, y) = (1/2t) (xy)^{-(alpha-1)/2} I_{(alpha-1)/2}(xy/2t) exp(-(x^2+y^2)/4t).

Written as ``(1/2t) (2t)^{-tau} [z^{-tau} e^{-z} I_tau(z)] exp(-(x-y)^2/4t)``
with ``z = xy/2t`` the only exponential left is the Gaussian factor, so the
evaluation never overflows.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import NumericalError, ValidationError
from .geometry import BesselParams, ball_measure_array
from .grids import GridFunction, QuadGrid  # noqa: F401  (re-exported domain types)
from .specfun import bessel_i_reduced_scaled

DEFAULT_T_GRID = np.geomspace(1e-3, 1e3, 40)


def heat_kernel_1d(alpha: float, t, x, y):
    """One-dimensional Bessel heat kernel, vectorised over ``t, x, y``."""
    if alpha <= -1:
        raise ValidationError("alpha must exceed -1")
    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(t <= 0) or np.any(x <= 0) or np.any(y <= 0):
        raise ValidationError("heat kernel needs t, x, y > 0")
    tau = 0.5 * (alpha - 1.0)
    z = x * y / (2.0 * t)
    red = bessel_i_reduced_scaled(tau, z)
    return (2.0 * t) ** (-tau - 1.0) * red * np.exp(-((x - y) ** 2) / (4.0 * t))


def log_heat_kernel_1d(alpha: float, t, x, y):
    """``log T_t(x, y)``, finite even where the kernel itself underflows."""
    if alpha <= -1:
        raise ValidationError("alpha must exceed -1")
    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(t <= 0) or np.any(x <= 0) or np.any(y <= 0):
        raise ValidationError("heat kernel needs t, x, y > 0")
    tau = 0.5 * (alpha - 1.0)
    red = bessel_i_reduced_scaled(tau, x * y / (2.0 * t))
    return (-tau - 1.0) * np.log(2.0 * t) + np.log(red) - (x - y) ** 2 / (4.0 * t)


def heat_kernel(params: BesselParams, t, x, y):
    """Product kernel ``prod_j T_t^{[j]}(x_j, y_j)``; points have shape ``(..., N)``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape[-1] != params.N or y.shape[-1] != params.N:
        raise ValidationError("point dimension does not match params")
    out = 1.0
    for j, a in enumerate(params.alpha):
        out = out * heat_kernel_1d(a, t, x[..., j], y[..., j])
    return out


def heat_kernel_alpha0(t, x, y):
    """Closed form for alpha = 0 (half-line Neumann kernel, method of images)."""
    return (4.0 * math.pi * t) ** -0.5 * (np.exp(-((x - y) ** 2) / (4 * t)) + np.exp(-((x + y) ** 2) / (4 * t)))


def _nu_integral(alpha: float, func, upper: float, points=()):
    """``int_0^upper func(y) y^alpha dy`` with adaptive Gauss-Kronrod (QUADPACK).

    For ``alpha < 0`` the substitution ``u = y^{alpha+1}`` removes the
    singularity of the density.
    """
    opts = dict(epsabs=1e-14, epsrel=1e-12, limit=400)
    if alpha < 0:
        p = alpha + 1.0
        pts = [q ** p for q in points if 0 < q < upper]
        val, err = integrate.quad(lambda u: func(u ** (1.0 / p)) / p, 0.0, upper ** p,
                                  points=pts or None, **opts)
    else:
        pts = [q for q in points if 0 < q < upper]
        val, err = integrate.quad(lambda v: func(v) * v ** alpha, 0.0, upper,
                                  points=pts or None, **opts)
    return val, err


def _gauss_tail(t: float, k: float = 14.0) -> float:
    # exp(-k^2/4) < 1e-16 for k = 14 (Gaussian half-width in units of sqrt(t))
    return k * math.sqrt(t)


def kernel_mass(alpha: float, t: float, x: float) -> float:
    """``int_0^inf T_t(x, y) y^alpha dy`` by adaptive quadrature (should be 1)."""
    upper = x + _gauss_tail(t)
    val, _ = _nu_integral(alpha, lambda y: float(heat_kernel_1d(alpha, t, x, y)), upper, points=(x,))
    return val


def chapman_kolmogorov_defect(alpha: float, s: float, t: float, x: float, y: float) -> float:
    """Relative defect ``|int T_s(x,z) T_t(z,y) dnu(z) - T_{s+t}(x,y)| / T_{s+t}(x,y)``."""
    upper = max(x, y) + _gauss_tail(max(s, t))
    ref = float(heat_kernel_1d(alpha, s + t, x, y))
    if not ref > 0:
        raise NumericalError("reference kernel underflows")
    # scaled by the reference so the absolute tolerance is meaningful for tiny kernels;
    # the product of Gaussians peaks at z = (t x + s y) / (s + t)
    f = lambda z: float(heat_kernel_1d(alpha, s, x, z) * heat_kernel_1d(alpha, t, z, y)) / ref
    peak = (t * x + s * y) / (s + t)
    val, _ = _nu_integral(alpha, f, upper, points=(min(x, y), peak, max(x, y)))
    return abs(val - 1.0)


@dataclass(frozen=True)
class GaussianBounds:
    """Empirical constants for the two-sided Gaussian bound.

    ``C_low`` is the infimum and ``C_up`` the supremum over the probe set of
    ``T_t(x,y) nu(B(x, sqrt t)) exp(|x-y|^2 / (c t))`` for ``c = c_low`` and
    ``c = c_up`` respectively.
    """

    c_low: float
    C_low: float
    c_up: float
    C_up: float

    def certified(self) -> bool:
        return self.C_low > 0 and np.isfinite(self.C_up)


def gaussian_bounds_probe(params: BesselParams, probes, c_low: float = 2.0,
                          c_up: float = 8.0) -> GaussianBounds:
    """Probe the Gaussian bounds on a set of ``(t, x, y)`` triples."""
    probes = list(probes)
    if not probes:
        raise ValidationError("empty probe grid")
    t = np.array([p[0] for p in probes], dtype=float)
    x = np.array([np.broadcast_to(np.atleast_1d(p[1]), (params.N,)) for p in probes], dtype=float)
    y = np.array([np.broadcast_to(np.atleast_1d(p[2]), (params.N,)) for p in probes], dtype=float)
    vol = ball_measure_array(params, x, np.sqrt(t))
    dist2 = np.sum((x - y) ** 2, axis=-1)
    # log domain: the kernel underflows long before exp(+dist^2/ct) overflows
    logk = np.log(vol)
    for j, a in enumerate(params.alpha):
        logk = logk + log_heat_kernel_1d(a, t, x[:, j], y[:, j])
    with np.errstate(over="ignore"):
        low = np.exp(logk + dist2 / (c_low * t))
        up = np.exp(logk + dist2 / (c_up * t))
    return GaussianBounds(c_low, float(np.min(low)), c_up, float(np.max(up)))


def heat_matrix(params: BesselParams, grid: QuadGrid, t: float) -> np.ndarray:
    """Matrix ``K[i, k] = T_t(x_i, x_k) w_k`` of the discretised semigroup."""
    if not t > 0:
        raise ValidationError("t must be positive")
    nodes = grid.nodes
    if nodes.shape[1] != params.N:
        raise ValidationError("grid dimension does not match params")
    k = heat_kernel(params, t, nodes[:, None, :], nodes[None, :, :])
    return k * grid.weights[None, :]


def heat_apply(params: BesselParams, f: GridFunction, t: float) -> GridFunction:
    """Quadrature of ``int T_t(x, y) f(y) dnu(y)`` at the nodes of ``f``'s grid.

    Accurate only while ``sqrt(t)`` is resolved by the grid spacing; for
    small ``t`` use the spectral route (``hankel.multiplier_apply`` with
    ``exp(-t lambda)``).
    """
    k = heat_matrix(params, f.grid, t)
    return GridFunction(f.grid, k @ f.values)


def maximal_function(params: BesselParams, f: GridFunction, t_grid=None, plan=None) -> GridFunction:
    """Pointwise ``max_t |T_t f|`` over ``t_grid`` (geometric, default 40 pts on [1e-3, 1e3]).

    With ``plan`` (a :class:`~besselmult.hankel.HankelPlan` whose input grid
    is ``f.grid``) the semigroup is applied spectrally, which stays accurate
    for every ``t``.
    """
    t_grid = DEFAULT_T_GRID if t_grid is None else np.asarray(t_grid, dtype=float)
    if t_grid.size == 0:
        raise ValidationError("t_grid must be nonempty")
    out = np.zeros(f.grid.size)
    if plan is not None:
        from .hankel import heat_multiplier, multiplier_apply

        for t in t_grid:
            out = np.maximum(out, np.abs(multiplier_apply(plan, heat_multiplier(t), f).values))
    else:
        for t in t_grid:
            out = np.maximum(out, np.abs(heat_apply(params, f, t).values))
    return GridFunction(f.grid, out)
