"""Exception hierarchy shared by all numerical modules."""


class SingularSpectraError(Exception):
    """Base class for every error raised by this package."""


class InvalidParams(SingularSpectraError, ValueError):
    """Parameters outside the domain where a function is defined."""


class PrecisionExhausted(SingularSpectraError, ArithmeticError):
    """Two evaluations at different working precisions never agreed."""


class ConvergenceFailure(SingularSpectraError, ArithmeticError):
    """An iterative method did not settle within its iteration cap."""


class DomainError(SingularSpectraError, ValueError):
    """Argument outside the admissible window of an asymptotic formula."""


class BracketingFailure(SingularSpectraError, ArithmeticError):
    """A sign scan could not isolate the requested number of roots."""


class AmbiguousSign(SingularSpectraError, ArithmeticError):
    """A sampled value is below the noise floor, so its sign is unknown."""


class GridTooCoarse(SingularSpectraError, ArithmeticError):
    """Richardson extrapolation difference exceeds the requested tolerance."""


class NotApplicable(SingularSpectraError, ValueError):
    """The requested method does not apply to these parameters."""


class InsufficientPrecision(SingularSpectraError, ArithmeticError):
    """A quantity lies below the certified accuracy of its inputs."""
