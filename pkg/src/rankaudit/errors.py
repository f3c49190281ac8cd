"""Exception hierarchy shared across the package.

Each class maps to one CLI exit code so scripted callers can branch on
failure category without parsing messages.
"""


class RankAuditError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


class UsageError(RankAuditError):
    """Invalid argument combination detected before any computation."""

    exit_code = 2


class EdgeListParseError(RankAuditError):
    """Malformed input file; message carries file name and line number."""

    exit_code = 3


class ValidationError(RankAuditError):
    """Structurally valid input that violates a documented precondition."""

    exit_code = 3


class ElementNotFoundError(ValidationError):
    """A referenced arc or node does not exist in the graph."""


class ConvergenceError(RankAuditError):
    """Iterative solver failed to reach the requested tolerance."""

    exit_code = 4

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class ResourceLimitError(RankAuditError):
    """Requested computation exceeds a configured budget."""

    exit_code = 5
