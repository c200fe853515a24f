"""Kernels of the imaginary powers ``B^{ib}`` for N = 1.

``K_b(x, y) = Gamma(-ib)^{-1} int_0^inf t^{-ib} T_t(x, y) dt/t``.

Three evaluators are provided.

* :func:`kb_direct` integrates the Mellin integral with ``t = e^u`` and the
  trapezoid rule.  The answer is about ``exp(-pi|b|/2)`` times the size of
  the integrand, so double precision limits it to moderate ``|b|`` (an
  a-posteriori rounding estimate raises :class:`QuadratureCeilingError`).
* :func:`kb_integralrep` (``alpha > 0``) uses the Poisson-type integral for
  ``I_tau``, which turns the t-integral into Gamma factors and leaves
  ``int_{-1}^{1} Q^{-ib-(alpha+1)/2} (1-s^2)^{alpha/2-1} ds`` with
  ``Q = x^2 + y^2 + 2xys``.
* :func:`kb_lifted` (every ``alpha > -1``) first applies
  ``I_tau = I_{tau+2} + (2(tau+1)/z) I_{tau+1}`` so both pieces have orders
  where the Poisson integral converges.

Both integral forms are free of cancellation.  The s-integrals are computed
in the variable ``w = log Q``, where the oscillation ``Q^{-ib} = e^{-ibw}``
has constant frequency, with a Gauss-Jacobi rule for the endpoint weights.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import exprel

from .errors import DiagonalError, OverlapError, QuadratureCeilingError, ValidationError
from .grids import GridFunction, QuadGrid, gauss_jacobi
from .heatkernel import heat_kernel_1d
from .specfun import loggamma

KB_DIRECT_CEILING = 60.0
DIAGONAL_FLOOR = 1e-3
INTEGRALREP_MIN_ALPHA = 0.1
DIRECT_MAX_STEP = 0.02
# integrand magnitude below exp(-LOG_TAIL) of its scale is dropped
LOG_TAIL = 18.0 * math.log(10.0)
_LOG2 = math.log(2.0)
_HALF_LOG_PI = 0.5 * math.log(math.pi)
_MAX_WORK = 2_000_000


def _check(alpha: float, b: float):
    alpha, b = float(alpha), float(b)
    if not alpha > -1:
        raise ValidationError("alpha must exceed -1")
    if not math.isfinite(b):
        raise ValidationError("b must be finite")
    return alpha, b


def _pairs(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    x, y = np.broadcast_arrays(x, y)
    if np.any(x <= 0) or np.any(y <= 0):
        raise ValidationError("x and y must be positive")
    if np.any(x == y):
        raise DiagonalError("kernel is singular on the diagonal x = y")
    return x, y


def _lg(z) -> complex:
    return complex(loggamma(complex(z)))


def c_constants(alpha: float, b: float, variant: str = "corrected"):
    """Constants ``(c1, c2, c3)`` of the kernel decomposition.

    ``c1 = 2^{2ib+1} Gamma(ib+(alpha+1)/2) / (Gamma(g) Gamma(-ib))`` with
    ``g = (alpha+1)/2`` (``variant="corrected"``) or ``g = (alpha+1)/4``
    (``variant="quarter"``, kept for comparison);
    ``c2 = 2^{2ib} Gamma(ib+1/2) / (sqrt(pi) Gamma(-ib))``;
    ``c3 = 1/Gamma(-ib)``.  All vanish at ``b = 0``.
    """
    alpha, b = _check(alpha, b)
    if variant not in ("corrected", "quarter"):
        raise ValidationError(f"unknown variant {variant!r}")
    if b == 0:
        return 0j, 0j, 0j
    g = 0.5 * (alpha + 1.0) if variant == "corrected" else 0.25 * (alpha + 1.0)
    lg_mb = _lg(-1j * b)
    c1 = np.exp((2j * b + 1.0) * _LOG2 + _lg(1j * b + 0.5 * (alpha + 1.0)) - math.lgamma(g) - lg_mb)
    c2 = np.exp(2j * b * _LOG2 + _lg(1j * b + 0.5) - _HALF_LOG_PI - lg_mb)
    c3 = np.exp(-lg_mb)
    return complex(c1), complex(c2), complex(c3)


# ---------------------------------------------------------------------------
# direct Mellin quadrature
# ---------------------------------------------------------------------------

def _direct_rows(alpha, bs, x, y, rtol):
    """Trapezoid sums for one chunk of pairs; returns (len(bs), npairs)."""
    d2 = (x - y) ** 2
    u_lo = np.log(d2 / (4.0 * 45.0))
    u_hi = np.log((x + y) ** 2) + 2.0 * LOG_TAIL / (alpha + 1.0)
    bmax = max(abs(b) for b in bs) if len(bs) else 0.0
    h_max = DIRECT_MAX_STEP if bmax == 0 else min(DIRECT_MAX_STEP, 0.75 / bmax)
    n = int(np.ceil(np.max(u_hi - u_lo) / h_max)) + 1
    k = np.arange(n)
    h = (u_hi - u_lo) / (n - 1)
    u = u_lo[:, None] + h[:, None] * k[None, :]
    g = heat_kernel_1d(alpha, np.exp(u), x[:, None], y[:, None])
    scale = np.max(g, axis=1)
    ends = np.maximum(g[:, 0], g[:, -1])
    if np.any(ends > 1e-15 * scale):
        raise QuadratureCeilingError("t-integrand not negligible at the truncation points")
    wg = g * h[:, None]
    wg[:, 0] *= 0.5
    wg[:, -1] *= 0.5
    abs_sum = np.sum(wg, axis=1)
    out = np.empty((len(bs), x.size), dtype=complex)
    for i, b in enumerate(bs):
        val = np.sum(np.exp(-1j * b * u) * wg, axis=1)
        # rounding error of the cancelling sum against its size
        err = 1e-16 * math.sqrt(n) * abs_sum
        if np.any(err > rtol * np.abs(val)):
            raise QuadratureCeilingError(
                f"b={b:g}: cancellation leaves fewer than {-math.log10(rtol):.0f} digits in kb_direct")
        out[i] = val * np.exp(-_lg(-1j * b))
    return out


def kb_direct_many(alpha: float, bs, x, y, rtol: float = 1e-8) -> np.ndarray:
    """:func:`kb_direct` for several ``b`` sharing the t-integrand.

    Returns an array of shape ``(len(bs),) + broadcast(x, y).shape``.
    """
    alpha = float(alpha)
    bs = [float(b) for b in np.atleast_1d(bs)]
    for b in bs:
        _check(alpha, b)
        if abs(b) > KB_DIRECT_CEILING:
            raise QuadratureCeilingError(f"|b| = {abs(b):g} exceeds the ceiling {KB_DIRECT_CEILING:g}")
    x, y = _pairs(x, y)
    shape = x.shape
    x, y = x.ravel(), y.ravel()
    if np.any(np.abs(x - y) < DIAGONAL_FLOOR * (x + y)):
        raise DiagonalError(f"|x - y| must be at least {DIAGONAL_FLOOR:g} (x + y) for kb_direct")
    out = np.zeros((len(bs), x.size), dtype=complex)
    live = [i for i, b in enumerate(bs) if b != 0]
    if live and x.size:
        chunk = 64
        for s in range(0, x.size, chunk):
            sl = slice(s, s + chunk)
            out[live, sl] = _direct_rows(alpha, [bs[i] for i in live], x[sl], y[sl], rtol)
    return out.reshape((len(bs),) + shape)


def kb_direct(alpha: float, b: float, x, y, rtol: float = 1e-8):
    """``K_b(x, y)`` by direct quadrature of the Mellin integral in ``u = log t``.

    Trapezoid rule with step ``min(0.02, 0.75/|b|)``; the range runs from
    where ``exp(-(x-y)^2/4t) < e^{-45}`` to where the ``t^{-(alpha+1)/2}``
    tail has dropped by 1e-18.

    Raises
    ------
    DiagonalError
        If ``|x - y| < 1e-3 (x + y)``.
    QuadratureCeilingError
        If ``|b| > 60`` or the estimated rounding error exceeds ``rtol``.
    """
    out = kb_direct_many(alpha, [b], x, y, rtol)[0]
    return out if out.ndim else out[()]


# ---------------------------------------------------------------------------
# integral representations
# ---------------------------------------------------------------------------

def s_integral_nodes(b: float, p: float, a: float, L) -> int:
    """Gauss-Jacobi node count for the w-integral over a log-range ``L``."""
    L = float(np.max(L))
    return int(min(6000, 24 + math.ceil(0.6 * abs(b) * L + 2.0 * (p + abs(a)) * L)))


def _s_integral(x, y, p: float, a: float, b: float, log_scale, n: int | None = None):
    """``exp(log_scale) * int_{-1}^{1} Q^{-ib-p} (1-s^2)^a ds`` for 1-d pair arrays.

    In ``w = log Q`` (``w0 = 2 log|x-y|``, ``w1 = 2 log(x+y)``, ``L = w1 - w0``,
    ``w = w0 + (L/2)(1+sigma)``) the integral equals

        (L/2)^{2a+1} (2xy)^{-2a-1} int (1-sigma^2)^a e^{-(ib+p-1)w} (E0 E1)^a dsigma

    with ``E0 = e^{w0} exprel(w-w0)`` and ``E1 = e^w exprel(w1-w)``, both
    smooth and positive.
    """
    mx = np.maximum(x, y)
    mn = np.minimum(x, y)
    L = 4.0 * np.arctanh(mn / mx)
    w0 = 2.0 * np.log(mx - mn)
    if n is None:
        n = s_integral_nodes(b, p, a, L)
    sig, wts = gauss_jacobi(n, a, a)
    ls = np.broadcast_to(np.asarray(log_scale, dtype=complex), x.shape)
    out = np.empty(x.size, dtype=complex)
    rows = max(1, _MAX_WORK // n)
    for s in range(0, x.size, rows):
        sl = slice(s, s + rows)
        half = 0.5 * L[sl, None]
        d0 = half * (1.0 + sig[None, :])
        d1 = half * (1.0 - sig[None, :])
        w = w0[sl, None] + d0
        log_e = w0[sl, None] + np.log(exprel(d0)) + w + np.log(exprel(d1))
        logmag = ((2 * a + 1) * (np.log(half) - np.log(2.0 * x[sl, None] * y[sl, None]))
                  + a * log_e - (p - 1.0) * w + ls[sl, None])
        out[sl] = np.sum(wts[None, :] * np.exp(logmag - 1j * b * w), axis=1)
    return out


def _apply_pairs(fn, x, y):
    x, y = _pairs(x, y)
    shape = x.shape
    out = fn(x.ravel(), y.ravel())
    out = out.reshape(shape)
    return out if out.ndim else out[()]


def kb_integralrep(alpha: float, b: float, x, y, n: int | None = None):
    """``K_b(x, y)`` for ``alpha > 0`` from the Poisson integral of ``I_tau``.

    ``K_b = C c1 int_{-1}^{1} Q^{-ib-(alpha+1)/2} (1-s^2)^{alpha/2-1} ds`` with
    ``C c1 = 2^{2ib+1} Gamma(ib+(alpha+1)/2) / (Gamma(-ib) sqrt(pi) Gamma(alpha/2))``.
    """
    alpha, b = _check(alpha, b)
    if alpha <= 0 or 0.5 * alpha - 1.0 <= -1.0:
        raise ValidationError("kb_integralrep needs alpha > 0; use kb_lifted")
    if b == 0:
        return _apply_pairs(lambda x, y: np.zeros(x.size, dtype=complex), x, y)
    p = 0.5 * (alpha + 1.0)
    lpref = (2j * b + 1.0) * _LOG2 + _lg(1j * b + p) - _lg(-1j * b) - _HALF_LOG_PI - math.lgamma(0.5 * alpha)
    return _apply_pairs(lambda x, y: _s_integral(x, y, p, 0.5 * alpha - 1.0, b, lpref, n), x, y)


def kb_lifted(alpha: float, b: float, x, y, n: int | None = None):
    """``K_b(x, y)`` for any ``alpha > -1`` via the order-raising recurrence.

    ``K_b = A + B`` where, with ``Q = x^2 + y^2 + 2xys``,

    ``A = 2^{2ib+1} (xy)^2 Gamma(ib+(alpha+5)/2) / (Gamma(-ib) sqrt(pi) Gamma(alpha/2+2))
    int Q^{-ib-(alpha+5)/2} (1-s^2)^{alpha/2+1} ds``

    ``B = (alpha+1) 4^{ib} Gamma(ib+(alpha+1)/2) / (Gamma(-ib) sqrt(pi) Gamma(alpha/2+1))
    int Q^{-ib-(alpha+1)/2} (1-s^2)^{alpha/2} ds``.
    """
    alpha, b = _check(alpha, b)
    if b == 0:
        return _apply_pairs(lambda x, y: np.zeros(x.size, dtype=complex), x, y)
    lg_mb = _lg(-1j * b)
    pa, aa = 0.5 * (alpha + 5.0), 0.5 * alpha + 1.0
    pb, ab = 0.5 * (alpha + 1.0), 0.5 * alpha
    la = (2j * b + 1.0) * _LOG2 + _lg(1j * b + pa) - lg_mb - _HALF_LOG_PI - math.lgamma(0.5 * alpha + 2.0)
    lb = (math.log(alpha + 1.0) + 2j * b * _LOG2 + _lg(1j * b + pb) - lg_mb - _HALF_LOG_PI
          - math.lgamma(0.5 * alpha + 1.0))

    def fn(x, y):
        A = _s_integral(x, y, pa, aa, b, la + 2.0 * np.log(x * y), n)
        B = _s_integral(x, y, pb, ab, b, lb, n)
        return A + B

    return _apply_pairs(fn, x, y)


def kb_auto(alpha: float, b: float, x, y, n: int | None = None):
    """Integral representation for ``alpha >= 0.1``, lifted form otherwise.

    Below 0.1 the endpoint weight ``(1-s^2)^{alpha/2-1}`` is close to
    non-integrable and the lifted form is the better conditioned of the two.
    """
    if alpha >= INTEGRALREP_MIN_ALPHA:
        return kb_integralrep(alpha, b, x, y, n)
    return kb_lifted(alpha, b, x, y, n)


# ---------------------------------------------------------------------------
# decomposition
# ---------------------------------------------------------------------------

def term1(alpha: float, b: float, x, y, variant: str = "corrected"):
    """``c1(b) (x^2 + y^2)^{-ib-(alpha+1)/2}``."""
    c1, _, _ = c_constants(alpha, b, variant)
    q = np.asarray(x, dtype=float) ** 2 + np.asarray(y, dtype=float) ** 2
    return c1 * np.exp(-(1j * b + 0.5 * (alpha + 1.0)) * np.log(q))


def term2(alpha: float, b: float, x, y):
    """``c2(b) (xy)^{-alpha/2} |x-y|^{-2ib-1}`` on ``y/2 < x < 2y``, else 0."""
    _, c2, _ = c_constants(alpha, b)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    local = (y / 2 < x) & (x < 2 * y)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = c2 * (x * y) ** (-0.5 * alpha) * np.exp(-(2j * b + 1.0) * np.log(np.abs(x - y)))
    return np.where(local, val, 0.0)


def remainder_scale(alpha: float, x, y):
    """``xy (x+y)^{-alpha-3}``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return x * y * (x + y) ** (-alpha - 3.0)


@dataclass(frozen=True)
class KernelDecomposition:
    """Main terms of ``K_b`` and the measured remainder (arrays broadcast over x, y)."""

    term1: np.ndarray
    term2: np.ndarray
    remainder_bound: np.ndarray
    remainder_measured: np.ndarray
    direct: np.ndarray

    def normalized_remainder(self, c3: complex) -> np.ndarray:
        """``|remainder| / (|c3| xy(x+y)^{-alpha-3})``."""
        return np.abs(self.remainder_measured) / (abs(c3) * self.remainder_bound)


def kb_decomposed(alpha: float, b: float, x, y, variant: str = "corrected",
                  reference: str = "direct") -> KernelDecomposition:
    """Split ``K_b(x, y)`` into the c1-term, the local c2-term and the rest.

    ``reference`` picks the kernel the terms are subtracted from: ``"direct"``
    (Mellin quadrature) or ``"auto"`` (integral representations, any ``b``).
    """
    alpha, b = _check(alpha, b)
    if reference == "direct":
        k = kb_direct(alpha, b, x, y)
    elif reference == "auto":
        k = kb_auto(alpha, b, x, y)
    else:
        raise ValidationError(f"unknown reference {reference!r}")
    t1 = term1(alpha, b, x, y, variant)
    t2 = term2(alpha, b, x, y)
    return KernelDecomposition(t1, t2, remainder_scale(alpha, x, y), k - t1 - t2, k)


# ---------------------------------------------------------------------------
# operator action
# ---------------------------------------------------------------------------

def support_interval(f: GridFunction, tol: float = 0.0) -> tuple[float, float]:
    """Hull of the nodes where ``|f| > tol``."""
    nz = np.abs(f.values) > tol
    if not np.any(nz):
        raise ValidationError("f vanishes identically")
    pts = f.grid.nodes[nz, 0]
    return float(pts.min()), float(pts.max())


def kernel_matrix(alpha: float, b: float, x_eval, y_nodes, method: str = "auto") -> np.ndarray:
    """``K[i, k] = K_b(x_i, y_k)``."""
    x = np.asarray(x_eval, dtype=float)[:, None]
    y = np.asarray(y_nodes, dtype=float)[None, :]
    if method == "auto":
        return kb_auto(alpha, b, x, y)
    if method == "lifted":
        return kb_lifted(alpha, b, x, y)
    if method == "integralrep":
        return kb_integralrep(alpha, b, x, y)
    if method == "direct":
        return kb_direct(alpha, b, x, y)
    if method == "term1":
        return term1(alpha, b, x, y)
    if method == "term2":
        return term2(alpha, b, x, y)
    raise ValidationError(f"unknown kernel method {method!r}")


def impower_apply(alpha: float, b: float, f: GridFunction, eval_grid: QuadGrid,
                  support: tuple[float, float] | None = None, method: str = "auto") -> GridFunction:
    """``B^{ib} f(x) = int K_b(x, y) f(y) dnu(y)`` at points outside ``supp f``.

    ``f.grid`` must carry the measure ``y^alpha dy`` in its weights.  The
    support is the node hull of ``f`` unless ``support`` is given.

    Raises
    ------
    OverlapError
        If an evaluation node lies in the support of ``f``.
    """
    alpha, b = _check(alpha, b)
    if f.grid.N != 1 or eval_grid.N != 1:
        raise ValidationError("impower_apply is one-dimensional")
    lo, hi = support if support is not None else support_interval(f)
    xs = eval_grid.nodes[:, 0]
    if np.any((xs >= lo) & (xs <= hi)):
        raise OverlapError(f"evaluation points meet supp f = [{lo:g}, {hi:g}]")
    if b == 0:
        return GridFunction(eval_grid, np.zeros(xs.size, dtype=complex))
    nz = f.values != 0
    K = kernel_matrix(alpha, b, xs, f.grid.nodes[nz, 0], method)
    return GridFunction(eval_grid, K @ (f.grid.weights[nz] * f.values[nz]))


def decomposition_sweep(alpha: float, bs, n_points: int, lo: float = 0.1, hi: float = 10.0,
                        variants=("corrected",)) -> dict:
    """Sup of the normalised remainder over a log grid of (x, y) in [lo, hi]^2.

    Pairs closer than the diagonal floor are skipped.  Returns
    ``{(variant, b): sup}``; the direct kernel is shared between all ``b``.
    """
    g = np.geomspace(lo, hi, n_points)
    X, Y = np.meshgrid(g, g, indexing="ij")
    keep = np.abs(X - Y) >= DIAGONAL_FLOOR * (X + Y)
    x, y = X[keep], Y[keep]
    bs = [float(b) for b in bs]
    direct = kb_direct_many(alpha, bs, x, y)
    scale = remainder_scale(alpha, x, y)
    out = {}
    for i, b in enumerate(bs):
        c3 = c_constants(alpha, b)[2]
        t2 = term2(alpha, b, x, y)
        for v in variants:
            rem = direct[i] - term1(alpha, b, x, y, v) - t2
            out[(v, b)] = float(np.max(np.abs(rem) / (abs(c3) * scale)))
    return out
