"""Semantic exception hierarchy shared by every module in the package.

The CLI maps these onto process exit codes (see ``xshap.cli``); library users
can catch ``XShapError`` to intercept anything raised on purpose.
"""


class XShapError(Exception):
    """Base class for all errors raised deliberately by this package."""


class InvalidArgumentError(XShapError, ValueError):
    """An argument violates a documented precondition."""


class ShapeError(InvalidArgumentError):
    """Array dimensions do not match the expected layout."""


class NonPositiveValueError(InvalidArgumentError):
    """A strictly positive quantity was zero, negative, or non-finite.

    ``index`` locates the first offending entry when known.
    """

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class NonPositivePredictionError(NonPositiveValueError):
    """A predictor emitted a non-positive value in multiplicative mode."""


class RankDeficientError(XShapError):
    """A linear system is singular or numerically rank deficient.

    ``condition`` carries the condition-number estimate that tripped the
    check, when one was computed.
    """

    def __init__(self, message: str, condition: float | None = None):
        super().__init__(message)
        self.condition = condition


class TooManyFeaturesError(InvalidArgumentError):
    """Exact enumeration was requested beyond the feature-count cap."""


class ExplanationError(XShapError):
    """An explanation could not be produced (e.g. coalition budget too small)."""


class ExternalModelError(XShapError):
    """An external model subprocess violated the wire protocol or died.

    ``diagnostics`` holds whatever the subprocess wrote to stderr.
    """

    def __init__(self, message: str, diagnostics: str = ""):
        super().__init__(message)
        self.diagnostics = diagnostics


class IngestionError(XShapError):
    """A tabular input file could not be parsed.

    ``row`` and ``column`` (when not None) locate the offending cell; ``row``
    counts data rows from 0, excluding the header line.
    """

    def __init__(self, message: str, row: int | None = None, column: str | None = None):
        super().__init__(message)
        self.row = row
        self.column = column


class ConfigError(XShapError):
    """A run configuration is inconsistent or incomplete."""
