"""Exception hierarchy shared by all gbqeval modules.

Public functions never raise bare ``ValueError``; callers can catch
:class:`GbqEvalError` to separate contract violations from genuine bugs.
"""

from __future__ import annotations


class GbqEvalError(Exception):
    """Base class for all errors raised by this package."""


class InputValidationError(GbqEvalError, ValueError):
    """Inputs violate a documented precondition (domain, shape, labels)."""


class SchemaError(InputValidationError):
    """A data file does not match its documented schema.

    Carries the offending location so ingestion errors point at the
    file, line, or column that broke the contract.
    """

    def __init__(self, message: str, *, location: str | None = None):
        self.location = location
        if location:
            message = f"{message} (at {location})"
        super().__init__(message)


class UndefinedMeasureError(GbqEvalError):
    """The requested measure is mathematically undefined for this input.

    Examples: trend distance over a single gesture, normalization against
    a degenerate (zero-variance) ground truth.
    """


class SingularGeometryError(GbqEvalError):
    """Embedding geometry makes a score undefined (e.g. zero uniqueness)."""


class UndefinedCorrelationError(GbqEvalError):
    """Correlation requested over a constant (zero-variance) measure."""
