class PrhrError(Exception):
    """Base exception for PRHR test errors."""


class ParseError(PrhrError):
    """A CSV cell could not be read as a finite number."""

    def __init__(self, message: str, row: int | None = None, column: str | None = None):
        self.row = row
        self.column = column
        location = ""
        if row is not None:
            location = f" (row {row}" + (f", column {column!r})" if column else ")")
        super().__init__(f"{message}{location}")


class SchemaError(PrhrError):
    """The column mapping does not match the input."""


class InsufficientDataError(PrhrError):
    """A sample is too small for the requested computation."""


class DomainError(PrhrError, ValueError):
    """A parameter lies outside the domain of a formula or distribution."""


class DegenerateEstimateError(PrhrError):
    """The Mann-Whitney estimate is 0 or 1, so the null variance is undefined."""


class HullViolationError(PrhrError):
    """Zero is not inside the convex hull of the centered pseudo-values."""


class NumericalFailureError(PrhrError):
    """An iterative solver did not reach its tolerance."""


class ConfigurationError(PrhrError):
    """A simulation configuration is invalid."""
