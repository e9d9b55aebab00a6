"""Exception types raised by the measurement pipeline.

Every error that a caller may want to branch on gets its own class; all of
them derive from :class:`CogextentError` so the CLI can catch one base type
and render a structured report.
"""


class CogextentError(Exception):
    """Base class for all package-specific failures."""


class ConfigError(CogextentError):
    """A run configuration is contradictory, incomplete, or unreadable."""

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


class DictionaryFormatError(CogextentError):
    """A word-list file contains an entry that is not a single alphabetic token."""

    def __init__(self, message: str, path: str = "", line: int = 0):
        super().__init__(message)
        self.path = path
        self.line = line


class InsufficientVolumeError(CogextentError):
    """Not enough phrases to fill the requested quota(s)."""

    def __init__(self, message: str, available: int = 0, required: int = 0):
        super().__init__(message)
        self.available = available
        self.required = required


class InsufficientDataError(CogextentError):
    """Too few measurement points for a fit or a resampling protocol."""

    def __init__(self, message: str, available: int = 0, required: int = 0):
        super().__init__(message)
        self.available = available
        self.required = required


class NoDynamicRangeError(CogextentError):
    """All measurement points coincide, so no relationship can be fitted."""


class InvalidMeasurementError(CogextentError):
    """A measured value is outside the domain of the requested operation."""


class FeasibilityError(CogextentError):
    """A requested replacement fraction exceeds what the donor pool supports."""

    def __init__(self, message: str, max_feasible_fraction: float = 0.0):
        super().__init__(message)
        self.max_feasible_fraction = max_feasible_fraction
