"""Norm estimators and the growth experiments for ``||B^{ib}||``.

Everything here is deterministic: grids are fixed by the parameters and no
random numbers are drawn.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import stats

from .errors import QuadratureCeilingError, ValidationError
from .geometry import BesselParams, homogeneous_dimension
from .grids import GridFunction, QuadGrid, gauss_jacobi, panel_grid_1d
from .hankel import HankelPlan
from .heatkernel import DEFAULT_T_GRID, maximal_function
from .impower import c_constants, kernel_matrix

DEFAULT_B_SWEEP = (2.0, 3.0, 4.5, 7.0, 10.0, 15.0, 22.0, 33.0)
# integral representations stay accurate far beyond this; it bounds the
# node counts (and memory) of the w-quadrature
IMPOWER_CEILING = 200.0


@dataclass(frozen=True)
class NormEstimate:
    value: float
    grid: str = ""
    refinement_delta: float | None = None

    def __float__(self) -> float:
        return self.value


@dataclass
class ExperimentReport:
    """Sweep of ``(b, norm)`` with per-b diagnostics and a log-log slope fit."""

    name: str
    config: dict
    rows: list[dict]
    expected_slope: float
    slope: float = field(default=float("nan"))
    stderr: float = field(default=float("nan"))

    def __post_init__(self):
        if len(self.rows) >= 5:
            self.slope, self.stderr = slope_fit([(r["b"], r["norm"]) for r in self.rows])

    def slope_over(self, b_min: float, b_max: float) -> tuple[float, float]:
        pts = [(r["b"], r["norm"]) for r in self.rows if b_min <= abs(r["b"]) <= b_max]
        return slope_fit(pts)


def _check_params(params: BesselParams, g: GridFunction):
    if g.grid.N != params.N:
        raise ValidationError("grid dimension does not match params")


def weak_l1_norm(params: BesselParams, g: GridFunction) -> NormEstimate:
    """``sup_lambda lambda nu{|g| > lambda}`` on the discretisation.

    Each node carries its weight as a point mass; sorting ``|g|`` in
    decreasing order, the sup equals ``max_k |g_k| W_k`` where ``W_k`` is the
    weight of the top-k nodes (ties are covered because ``W`` increases
    along a run of equal values).
    """
    _check_params(params, g)
    mag = np.abs(g.values)
    order = np.argsort(-mag, kind="stable")
    cum = np.cumsum(g.grid.weights[order])
    return NormEstimate(float(np.max(mag[order] * cum)), g.grid.description)


def lp_norm(params: BesselParams, g: GridFunction, p: float) -> NormEstimate:
    """``(sum_k w_k |g_k|^p)^{1/p}``."""
    _check_params(params, g)
    if not 1 <= p < math.inf:
        raise ValidationError("p must lie in [1, inf)")
    val = float(np.sum(g.grid.weights * np.abs(g.values) ** p) ** (1.0 / p))
    return NormEstimate(val, g.grid.description)


def slope_fit(points: Sequence[tuple[float, float]]) -> tuple[float, float]:
    """Least-squares slope (and its standard error) of ``log v`` against ``log b``."""
    pts = list(points)
    if len(pts) < 5:
        raise ValidationError("slope fit needs at least 5 points")
    b = np.array([abs(p[0]) for p in pts], dtype=float)
    v = np.array([p[1] for p in pts], dtype=float)
    if np.any(b <= 0) or np.any(v <= 0):
        raise ValidationError("slope fit needs positive b and values")
    if np.unique(b).size < 2:
        raise ValidationError("degenerate sweep: all b equal")
    res = stats.linregress(np.log(b), np.log(v))
    return float(res.slope), float(res.stderr)


def default_eps_rule(b: float) -> float:
    return 0.05 / abs(b)


# ---------------------------------------------------------------------------
# lower-bound sweeps
# ---------------------------------------------------------------------------

def _check_b(b: float):
    if abs(b) > IMPOWER_CEILING:
        raise QuadratureCeilingError(f"|b| = {abs(b):g} exceeds the quadrature ceiling {IMPOWER_CEILING:g}")
    if b == 0:
        raise ValidationError("b must be nonzero")


def _geometric_edges(start: float, stop: float, ratio: float) -> np.ndarray:
    n = max(1, int(math.ceil(math.log(stop / start) / math.log(ratio))))
    return np.geomspace(start, stop, n + 1)


def _lower1_grids(alpha: float, b: float, eps: float, res: float):
    """Source grid for f_eps and evaluation grid, both carrying x^alpha dx."""
    n_y = max(8, int(round((16 + 0.6 * abs(b)) * res)))
    n_x = max(4, int(round(10 * res)))
    ratio = 1.0 + 0.12 / res
    if alpha < 0:
        src = panel_grid_1d([1.0, 1.0 + eps], alpha, n_y)
        edges = 1.0 + _geometric_edges(3.0 * eps, 1.0, ratio)
        region = "S = [1+3eps, 2]"
    else:
        src = panel_grid_1d([eps, 2.0 * eps], alpha, n_y)
        edges = _geometric_edges(3.0 * eps, 3.0e4 * eps, ratio)
        region = "x > 3eps (to 3e4 eps)"
    ev = panel_grid_1d(edges, alpha, n_x)
    return src, ev, region


def _lower1_point(alpha: float, b: float, eps: float, res: float) -> dict:
    params = BesselParams(alpha)
    src, ev, region = _lower1_grids(alpha, b, eps, res)
    # f_eps y^alpha = 1/eps on the source interval, so f = y^{-alpha}/eps
    f = src.nodes[:, 0] ** (-alpha) / eps
    wf = src.weights * f
    xs, ys = ev.nodes[:, 0], src.nodes[:, 0]
    full = kernel_matrix(alpha, b, xs, ys) @ wf
    t1 = kernel_matrix(alpha, b, xs, ys, "term1") @ wf
    t2 = kernel_matrix(alpha, b, xs, ys, "term2") @ wf
    weak = lambda v: weak_l1_norm(params, GridFunction(ev, v)).value
    return {
        "b": float(b),
        "norm": weak(full),
        "term1_contrib": weak(t1),
        "term2_contrib": weak(t2),
        "remainder_contrib": weak(full - t1 - t2),
        "eps": float(eps),
        "grid_pts": int(ev.size * src.size),
        "region": region,
    }


def lower1_experiment(alpha: float, b_sweep=DEFAULT_B_SWEEP,
                      eps_rule: Callable[[float], float] = default_eps_rule,
                      resolution: float = 1.0, refine: bool = True) -> ExperimentReport:
    """Weak-L^1 size of ``B^{ib} f_eps`` against ``b``.

    ``alpha < 0``: ``f_eps = eps^{-1} x^{-alpha}`` on ``[1, 1+eps]``, measured
    on ``S = [1+3eps, 2]``.  ``alpha > 0``: ``f_eps = x^{-alpha} eps^{-1}`` on
    ``[eps, 2eps]``, measured on ``x > 3eps``.  In both cases
    ``||f_eps||_{L^1(nu)} = 1``.  The expected slope is ``d/2``.

    Each row also carries the weak norms of the c1-term, the c2-term and
    the remainder applied separately (diagnostics), and, when ``refine``,
    the change against a run at half resolution.
    """
    alpha = float(alpha)
    if alpha == 0 or alpha <= -1:
        raise ValidationError("lower1_experiment needs alpha in (-1, 0) or alpha > 0")
    bs = [float(b) for b in b_sweep]
    for b in bs:
        _check_b(b)
    rows = []
    for b in bs:
        eps = float(eps_rule(b))
        if not 0 < eps < 0.1:
            raise ValidationError("eps_rule must return values in (0, 0.1)")
        row = _lower1_point(alpha, b, eps, resolution)
        if refine:
            row["refinement_delta"] = abs(row["norm"] - _lower1_point(alpha, b, eps, 0.5 * resolution)["norm"])
        rows.append(row)
    d = homogeneous_dimension(BesselParams(alpha))
    cfg = {"alpha": alpha, "b_sweep": bs, "resolution": resolution}
    return ExperimentReport("lower1", cfg, rows, d / 2.0)


def _lower2_point(alpha: float, b: float, p: float, eps: float, res: float) -> dict:
    delta = abs(b)
    n_y = max(8, int(round(16 * res)))
    s, w = gauss_jacobi(n_y, 0.0, alpha)
    ys = 0.5 * eps * (1.0 + s)
    wy = w * (0.5 * eps) ** (alpha + 1.0)
    # f = indicator of (0, eps); the norm is normalised by ||f||_p below
    f_lp = (eps ** (alpha + 1.0) / (alpha + 1.0)) ** (1.0 / p)
    mass = float(np.sum(wy))
    x_max = 1.0e3 * delta
    edges = _geometric_edges(delta, x_max, 1.0 + 0.25 / res)
    ev = panel_grid_1d(edges, alpha, max(4, int(round(10 * res))))
    g = kernel_matrix(alpha, b, ev.nodes[:, 0], ys) @ wy
    c1 = c_constants(alpha, b)[0]
    # leading c1 x^{-2ib-(alpha+1)} behaviour beyond x_max, integrated exactly
    expo = p * (alpha + 1.0) - alpha - 1.0
    tail = (abs(c1) * mass) ** p * x_max ** (-expo) / expo
    norm = (float(np.sum(ev.weights * np.abs(g) ** p)) + tail) ** (1.0 / p) / f_lp
    oracle = abs(c1) * mass * (delta ** (-expo) / expo) ** (1.0 / p) / f_lp
    return {"b": float(b), "norm": norm, "oracle": oracle, "ratio_to_oracle": norm / oracle,
            "delta": delta, "eps": eps, "grid_pts": int(ev.size * n_y)}


def lower2_experiment(alpha: float, p: float, b_sweep=DEFAULT_B_SWEEP, eps: float = 0.1,
                      resolution: float = 1.0, refine: bool = True) -> ExperimentReport:
    """``||B^{ib} f||_{L^p((delta, inf))} / ||f||_p`` with ``delta = |b|``.

    ``f`` is the indicator of ``(0, eps)``.  The expected slope is
    ``(d/2)(2-p)/p``.  ``oracle`` is the same norm for the leading term
    ``c1(b) x^{-2ib-(alpha+1)} int f dnu`` alone.
    """
    alpha, p = float(alpha), float(p)
    if not alpha > 0:
        raise ValidationError("lower2_experiment needs alpha > 0")
    if not 1 < p < 2:
        raise ValidationError("p must lie in (1, 2)")
    if not 0 < eps < 1:
        raise ValidationError("eps must lie in (0, 1)")
    bs = [float(b) for b in b_sweep]
    for b in bs:
        _check_b(b)
    rows = []
    for b in bs:
        row = _lower2_point(alpha, b, p, eps, resolution)
        if refine:
            row["refinement_delta"] = abs(row["norm"] - _lower2_point(alpha, b, p, eps, 0.5 * resolution)["norm"])
        rows.append(row)
    d = homogeneous_dimension(BesselParams(alpha))
    cfg = {"alpha": alpha, "p": p, "b_sweep": bs, "eps": eps, "resolution": resolution}
    return ExperimentReport("lower2", cfg, rows, 0.5 * d * (2.0 - p) / p)


# ---------------------------------------------------------------------------
# H^1 estimate
# ---------------------------------------------------------------------------

def h1_norm_estimate(params: BesselParams, f: GridFunction, t_grid=None,
                     plan: HankelPlan | None = None) -> NormEstimate:
    """``int sup_t |T_t f| dnu`` over a geometric ``t_grid`` (lower estimate of the H^1 norm).

    ``refinement_delta`` is the change against every other point of
    ``t_grid``; it is nonnegative because the sup runs over more scales.
    """
    t_grid = DEFAULT_T_GRID if t_grid is None else np.asarray(t_grid, dtype=float)
    full = maximal_function(params, f, t_grid, plan)
    value = float(np.sum(f.grid.weights * full.values.real))
    coarse = maximal_function(params, f, t_grid[::2], plan)
    delta = value - float(np.sum(f.grid.weights * coarse.values.real))
    desc = f"{f.grid.description}; {t_grid.size} t in [{t_grid.min():g}, {t_grid.max():g}]"
    return NormEstimate(value, desc, delta)


def atom_like(grid: QuadGrid, alpha: float, centers=(1.5, 2.5), width: float = 0.4) -> GridFunction:
    """Smooth mean-zero pair of bumps on ``(0, inf)``, unit L^1(nu) norm."""
    x = grid.nodes[:, 0]

    def bump(c):
        u = (x - c) / width
        out = np.zeros_like(u)
        inside = np.abs(u) < 1
        out[inside] = np.exp(-1.0 / (1.0 - u[inside] ** 2))
        return out

    b1, b2 = bump(centers[0]), bump(centers[1])
    w = grid.weights
    g = b1 - b2 * np.sum(w * b1) / np.sum(w * b2)
    return GridFunction(grid, g / np.sum(w * np.abs(g)))
