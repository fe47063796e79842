"""Exception hierarchy for parsing and evaluation."""

from __future__ import annotations


class AspError(Exception):
    """Base class for every failure the evaluator can report."""

    def __init__(self, message: str, offset: int | None = None):
        super().__init__(message)
        self.message = message
        self.offset = offset


class LexError(AspError):
    pass


class ParseError(AspError):
    def __init__(self, message: str, offset: int | None = None, expected: frozenset[str] = frozenset()):
        super().__init__(message, offset)
        self.expected = expected


class EvaluationError(AspError):
    """Raised when a syntactically valid program cannot be evaluated."""


class SafetyError(EvaluationError):
    pass


class UnsupportedProgramError(EvaluationError):
    pass


class ResourceLimitError(EvaluationError):
    pass
