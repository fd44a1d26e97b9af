"""Exception hierarchy.

Numerical failures derive from :class:`NumericalError` so that callers (the
CLI and the sweep engine) can tell them apart from invalid input.
"""


class QMetastableError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(QMetastableError, ValueError):
    """Invalid or inconsistent configuration."""


class NumericalError(QMetastableError, ArithmeticError):
    """A numerical procedure could not deliver a trustworthy result."""


class DegeneratePotential(ConfigError):
    """The quartic potential has a single minimum (asymmetry too large)."""


class GridTooCoarse(NumericalError):
    """Eigenvalues are not converged with respect to the grid size."""


class TruncationInconsistent(NumericalError):
    """DVR positions fall outside the grid used to build them."""


class QuadratureFailure(NumericalError):
    """An adaptive quadrature did not reach its tolerance within budget."""


class IllConditionedGenerator(NumericalError):
    """Neither eigendecomposition nor matrix exponential passed checks."""


class DegenerateSpectrum(NumericalError):
    """The rate matrix has more than one conserved (zero) mode."""


class InsufficientResolution(QMetastableError):
    """Sweep grid too coarse to localize features."""
