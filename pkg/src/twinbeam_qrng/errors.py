"""Exception types shared across the pipeline, mapped to CLI exit codes."""


class PipelineError(Exception):
    """Base class for pipeline errors."""

    exit_code = 1
    kind = "error"


class DomainError(PipelineError, ValueError):
    """A parameter or configuration value violates its documented range."""

    exit_code = 2
    kind = "config"


class FormatError(PipelineError):
    """A file does not conform to the TBQR/TBBS container layouts."""

    exit_code = 3
    kind = "format"


class InsufficientDataError(PipelineError):
    """Not enough samples or bits for the requested operation."""

    exit_code = 4
    kind = "data"


class ZeroVarianceError(InsufficientDataError):
    """Constant input where a nonzero spread is required."""


class InternalCheckError(PipelineError):
    """An internal consistency assertion failed; indicates a bug."""

    exit_code = 5
    kind = "internal"
