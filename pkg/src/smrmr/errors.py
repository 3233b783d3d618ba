"""Exception types shared across the package."""


class SmrmrError(Exception):
    """Base class for all package errors."""


class InvalidInput(SmrmrError):
    """Malformed or inconsistent input (shapes, ranges, non-finite values)."""


class DegenerateFeature(SmrmrError):
    """A sample carries no variation, so self-dependence is zero."""

    def __init__(self, message, column=None):
        super().__init__(message)
        self.column = column


class SampleTooSmall(SmrmrError):
    """Not enough rows to run the requested stage."""


class NumericalFailure(SmrmrError):
    """A linear-algebra step failed beyond repair (singular matrix etc.)."""


class ResourceLimit(SmrmrError):
    """Requested computation exceeds a configured size cap."""
