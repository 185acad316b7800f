"""Exception types raised across the package."""


class WeylconvError(Exception):
    """Base class for all package errors."""


class SpanError(WeylconvError, ValueError):
    """A window, shift or horizon reaches outside the sampled span."""


class GridMismatchError(WeylconvError, ValueError):
    """Two grid functions do not share a grid."""


class DomainError(WeylconvError, ValueError):
    """An argument lies outside the domain of the operation."""


class IntegrabilityError(WeylconvError, ArithmeticError):
    """An endpoint singularity is not integrable."""


class DivergenceError(WeylconvError, ArithmeticError):
    """A series or tail does not converge."""


class AccuracyError(WeylconvError, ArithmeticError):
    """The requested accuracy cannot be certified."""


class AdmissibilityError(WeylconvError, ValueError):
    """Kernel and exponent fail the admissibility rule."""


class ConsistencyError(WeylconvError, ValueError):
    """Initial data are inconsistent with degenerate slots."""
