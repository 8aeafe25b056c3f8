"""Exception types raised by eitflash."""


class EitflashError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(EitflashError, ValueError):
    """A parameter lies outside the domain where an operation is defined."""


class GridError(EitflashError, ValueError):
    """A spectral grid is too coarse or too narrow for the requested medium."""


class GridMismatchError(EitflashError, ValueError):
    """Two traces are not sampled on the same time grid."""


class QuadratureError(EitflashError, ArithmeticError):
    """Adaptive quadrature did not reach the requested tolerance.

    Attributes
    ----------
    achieved : float
        Absolute error estimate reported by the integrator.
    """

    def __init__(self, message, achieved=float("nan")):
        super().__init__(message)
        self.achieved = achieved


class TruncationError(EitflashError, ArithmeticError):
    """A series could not be truncated within the allowed number of terms."""


class FitError(EitflashError, ArithmeticError):
    """A least-squares fit failed its acceptance checks."""


class ThresholdError(EitflashError, ArithmeticError):
    """A signal never reached the level required by an estimator."""


class MagnitudeUnderflowError(EitflashError, ArithmeticError):
    """A field is too small for its phase to be meaningful."""


class NoMaximumError(EitflashError, ArithmeticError):
    """A fringe scan contains no local maximum."""


class WrapAroundWarning(UserWarning):
    """The periodised transform window truncates a trailing transient."""
