"""Exception hierarchy shared across the package."""


class InarDetectError(Exception):
    """Base class for all errors raised by inardetect."""


class SeriesValidationError(InarDetectError, ValueError):
    """A count series violates its invariants (negative, non-integer, too short)."""


class DegenerateSeriesError(InarDetectError, ValueError):
    """A series is too uninformative for the requested estimate (e.g. constant)."""


class FeasibilityError(InarDetectError, ValueError):
    """An outlier configuration implies a negative latent count."""


class CsvParseError(InarDetectError, ValueError):
    """A count CSV file is malformed.  Carries the offending line number."""

    def __init__(self, message: str, line_no: int | None = None):
        self.line_no = line_no
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)


class ConfigError(InarDetectError, ValueError):
    """A run configuration (file or flags) is invalid or incomplete."""


class NumericalError(InarDetectError, RuntimeError):
    """A numerical routine failed in a way that is not a data-validation issue."""


class ArmsInitializationError(NumericalError):
    """The ARMS envelope could not be initialized (kernel -inf at the grid)."""
