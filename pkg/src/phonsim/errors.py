"""Shared exception types."""


class PhonsimError(Exception):
    """Base class for all phonsim errors."""


class DataError(PhonsimError):
    """Input data violates a contract: malformed corpus line, unknown phoneme,
    digest mismatch, incomplete store, score-range overflow and the like."""
