"""Smooth dyadic cutoff, L^2 Sobolev norms and the Hormander functional.

The cutoff is built from ``psi0(u) = exp(-1/(1-u^2))`` on ``|u| < 1`` with
``u = log2(lambda)``, normalised over its dyadic translates so that
``sum_j eta(2^{-j} lambda) = 1`` holds identically.

Sobolev norms use ``g^(xi) = int g(s) e^{-i s xi} ds`` and

    ||g||_{W^{2,beta}}^2 = (1/2pi) int (1 + xi^2)^beta |g^(xi)|^2 dxi,

so that ``beta = 0`` is the plain L^2 norm.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import SupportBandError, ValidationError
from .hankel import MultiplierSymbol

SAMPLE_INTERVAL = (0.25, 4.0)
N_SAMPLES = 2 ** 14
PAD_FACTOR = 4
POINTS_PER_DECADE = 30
BANDLESS_T_RANGE = (1e-6, 1e6)


def _psi0(u):
    u = np.asarray(u, dtype=float)
    out = np.zeros(u.shape)
    inside = np.abs(u) < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - u[inside] ** 2))
    return out


@dataclass(frozen=True)
class CutoffEta:
    """The canonical cutoff ``eta``, supported in (1/2, 2)."""

    support: tuple[float, float] = (0.5, 2.0)

    def __call__(self, lam) -> np.ndarray:
        lam = np.asarray(lam, dtype=float)
        out = np.zeros(lam.shape)
        pos = lam > 0
        L = np.log2(lam[pos])
        frac = L - np.floor(L)
        out[pos] = _psi0(L) / (_psi0(frac) + _psi0(frac - 1.0))
        return out if out.ndim else out[()]


def make_eta() -> CutoffEta:
    return CutoffEta()


def sobolev_norm(g, h: float, beta: float, tol: float = 1e-12, pad: int = PAD_FACTOR) -> float:
    """``W^{2,beta}`` norm of uniformly spaced samples ``g`` (spacing ``h``).

    The samples must cover the support of ``g``: both end values have to be
    below ``tol * max|g|``, otherwise :class:`SupportBandError` is raised.
    Computed from the FFT of the samples zero-padded ``pad``-fold.
    """
    g = np.asarray(g, dtype=complex)
    if g.ndim != 1 or g.size < 4:
        raise ValidationError("need a 1-d array of at least 4 samples")
    if beta < 0 or h <= 0:
        raise ValidationError("beta must be >= 0 and h > 0")
    scale = np.max(np.abs(g))
    if scale == 0:
        return 0.0
    if max(abs(g[0]), abs(g[-1])) > tol * scale:
        raise SupportBandError("function support is not contained in the sampled interval")
    M = pad * g.size
    G = np.fft.fft(g, n=M)
    xi = 2.0 * math.pi * np.fft.fftfreq(M, d=h)
    return float(math.sqrt(h / M * np.sum((1.0 + xi ** 2) ** beta * np.abs(G) ** 2)))


def _sample_grid(n: int = N_SAMPLES):
    s = np.linspace(*SAMPLE_INTERVAL, n)
    return s, s[1] - s[0]


def default_t_grid(m: MultiplierSymbol, points_per_decade: int = POINTS_PER_DECADE) -> np.ndarray:
    """Geometric scales where ``eta(.) m(t .)`` can be nonzero.

    For a band ``[lo, hi]`` that is ``t`` in ``(lo/2, 2 hi)``; bandless symbols
    use ``[1e-6, 1e6]``.
    """
    if m.band is not None:
        lo, hi = m.band
        t_lo, t_hi = max(lo / 2.0, 1e-300), 2.0 * hi
    else:
        t_lo, t_hi = BANDLESS_T_RANGE
    n = max(2, int(math.ceil(points_per_decade * math.log10(t_hi / t_lo))) + 1)
    return np.geomspace(t_lo, t_hi, n)


def hormander_norm(m: MultiplierSymbol, beta: float, t_grid=None, n_samples: int = N_SAMPLES) -> float:
    """``max_t ||eta(.) m(t .)||_{W^{2,beta}}`` over a geometric ``t_grid``.

    A lower estimate of the supremum in the Hormander condition.
    """
    t_grid = default_t_grid(m) if t_grid is None else np.asarray(t_grid, dtype=float)
    if t_grid.size == 0 or np.any(t_grid <= 0):
        raise ValidationError("t_grid must be nonempty and positive")
    s, h = _sample_grid(n_samples)
    eta = make_eta()(s)
    best = 0.0
    for t in t_grid:
        best = max(best, sobolev_norm(eta * m(t * s), h, beta))
    return best


def dyadic_pieces(m: MultiplierSymbol, j_range) -> list[MultiplierSymbol]:
    """``m_j(lambda) = eta(2^{-j} lambda) m(lambda)`` with band ``[2^{j-1}, 2^{j+1}]``."""
    eta = make_eta()
    pieces = []
    for j in j_range:
        scale = 2.0 ** (-j)
        pieces.append(MultiplierSymbol(lambda lam, scale=scale: eta(scale * lam) * m(lam),
                                       (2.0 ** (j - 1), 2.0 ** (j + 1)), f"piece {j} of {m.name}"))
    return pieces
