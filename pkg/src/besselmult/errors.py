"""Exception types raised by the library."""


class BesselMultError(Exception):
    """Base class for all library errors."""


class ValidationError(BesselMultError, ValueError):
    """Invalid parameters (alpha <= -1, empty grids, bad shapes...)."""


class GammaPoleError(BesselMultError, ValueError):
    """Gamma evaluated at a non-positive integer."""


class GridMismatchError(BesselMultError, ValueError):
    """A grid function was applied to an operator built on another grid."""


class SupportBandError(BesselMultError, ValueError):
    """A multiplier's declared band is incompatible with the requested use."""


class DiagonalError(BesselMultError, ValueError):
    """Kernel evaluation requested too close to the diagonal x = y."""


class OverlapError(BesselMultError, ValueError):
    """Evaluation point lies inside the support of the input function."""


class NumericalError(BesselMultError, ArithmeticError):
    """Quadrature did not reach its accuracy target."""


class QuadratureCeilingError(NumericalError):
    """Oscillation frequency beyond what the configured quadrature resolves."""
