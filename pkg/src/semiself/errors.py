"""Exception types shared across the package."""


class SemiselfError(Exception):
    """Base class for all package errors."""


class InvalidTripletError(SemiselfError):
    """A triplet or measure violates its structural constraints."""


class DomainError(SemiselfError):
    """An input lies outside the domain of the requested transform
    (typically an infinite log-moment)."""


class ToleranceError(SemiselfError):
    """A series or quadrature could not meet the requested tolerance."""


class UnsupportedComponentError(SemiselfError):
    """The operation is only defined for a subset of measure components."""
