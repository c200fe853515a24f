"""Numerics for the Bessel operator on (0, inf)^N: heat kernel, Hankel
transform, spectral multipliers and the kernels of its imaginary powers."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    BesselMultError,
    DiagonalError,
    GammaPoleError,
    GridMismatchError,
    NumericalError,
    OverlapError,
    QuadratureCeilingError,
    SupportBandError,
    ValidationError,
)
from .geometry import Ball, BesselParams, ball_measure, homogeneous_dimension  # noqa: E402
from .grids import GridFunction, QuadGrid  # noqa: E402

__all__ = [
    "Ball", "BesselMultError", "BesselParams", "DiagonalError", "GammaPoleError", "GridFunction",
    "GridMismatchError", "NumericalError", "OverlapError", "QuadGrid", "QuadratureCeilingError",
    "SupportBandError", "ValidationError", "ball_measure", "homogeneous_dimension",
]
