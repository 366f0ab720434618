"""Exception hierarchy shared by every module of the package."""


class SubordLabError(Exception):
    """Base class for all errors raised by subord_lab."""


class DomainError(SubordLabError, ValueError):
    """An argument lies outside the range where a formula or theorem applies."""


class SeriesError(SubordLabError, ArithmeticError):
    """Base class for failures of truncated power-series arithmetic."""


class DivisionByZeroError(SeriesError, ZeroDivisionError):
    pass


class PoleAtOriginError(SeriesError):
    pass


class CompositionDomainError(SeriesError):
    pass


class LogSingularityError(SeriesError):
    pass


class BranchPointError(SeriesError):
    pass


class EvaluationRadiusError(SubordLabError, ValueError):
    pass


class NormalizationError(DomainError):
    pass


class InputShapeError(DomainError):
    pass


class NoBracketError(SubordLabError, ArithmeticError):
    pass


class SingularSampleError(SubordLabError, ArithmeticError):
    """An operator could not be evaluated at some grid point."""

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class RejectedSampleError(SubordLabError):
    """A generated test function fell outside the theorem's admissible class."""
