"""Exception hierarchy shared across the package.

Usage errors subclass ``ValueError`` so callers that only care about bad
arguments can catch the builtin.
"""


class QGCNNError(Exception):
    """Base class for every error raised by this package."""

    exit_code = 1


class ConfigError(QGCNNError, ValueError):
    """Invalid configuration value (qubit count, generator counts, ...)."""


class UsageError(QGCNNError, ValueError):
    """Bad argument to an operation: index out of range, shape mismatch."""


class EncodingError(QGCNNError, ValueError):
    """A vector cannot be amplitude-encoded (zero norm)."""

    exit_code = 3


class NormalizationError(QGCNNError, ValueError):
    """Degree normalization hit an isolated node."""


class FormatError(QGCNNError):
    """Malformed dataset or checkpoint file."""

    exit_code = 2


class NumericError(QGCNNError):
    """Training produced a non-finite loss."""

    exit_code = 3
