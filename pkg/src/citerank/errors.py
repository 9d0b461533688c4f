"""Exception types shared across the package."""


class CiterankError(Exception):
    """Base class for all citerank errors."""


class DomainError(CiterankError):
    """A precondition on an operation's inputs was violated."""


class FeedbackOverlapError(DomainError):
    """Positive and negative feedback sets intersect."""


class ParseError(CiterankError):
    """Malformed input file or text.

    `line` carries the 1-based line number when known.
    """

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class IntegrityError(CiterankError):
    """Graph data violates a structural invariant."""


class TimeBudgetExceeded(CiterankError):
    """A ranking computation ran past its deadline."""
