"""Exception types shared across the package."""


class LinflowError(Exception):
    """Base class for all errors raised by linflow."""


class NumericalFailure(LinflowError):
    """An iterative or factorization step did not produce a certified result."""


class DimensionMismatch(LinflowError):
    """Two objects that must share a dimension do not."""


class DomainError(LinflowError):
    """Input lies outside the set where an operation is defined."""


class UnsupportedDimension(LinflowError):
    """The operation is only implemented for small dimensions."""


class OutOfScope(LinflowError):
    """The question has no decision procedure in this package."""


class WitnessNotFound(NumericalFailure):
    """Matrices look similar structurally but no invertible witness was found."""


class RangeError(LinflowError):
    """A result is not representable in double precision."""


class ParseError(LinflowError):
    """An input document could not be parsed."""
