"""Exception types shared across the package.

Every error carries a short machine-readable ``code`` so that the CLI and
tests can match on it without parsing messages.
"""

from __future__ import annotations

from dataclasses import dataclass


class LCSMError(Exception):
    """Base class for all errors raised by this package."""

    code = "ERROR"

    def __init__(self, message: str, code: str | None = None):
        super().__init__(message)
        if code is not None:
            self.code = code


@dataclass(frozen=True)
class Issue:
    code: str
    message: str

    def __str__(self) -> str:
        return f"{self.code}: {self.message}"


class InstanceValidationError(LCSMError, ValueError):
    """Raised with the full list of problems found in a raw instance."""

    code = "INVALID_INSTANCE"

    def __init__(self, issues: list[Issue]):
        self.issues = list(issues)
        lines = "\n".join(f"  {issue}" for issue in self.issues)
        super().__init__(f"{len(self.issues)} validation error(s):\n{lines}")

    @property
    def codes(self) -> set[str]:
        return {issue.code for issue in self.issues}


class ParseError(LCSMError, ValueError):
    code = "PARSE_ERROR"

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


class UnknownResidentError(LCSMError, KeyError):
    code = "UNKNOWN_RESIDENT"

    def __str__(self) -> str:  # KeyError quotes its message otherwise
        return self.args[0]


class InfeasibleMatchingError(LCSMError, ValueError):
    code = "INFEASIBLE_INPUT"


class NotANeighborError(LCSMError, ValueError):
    code = "NOT_A_NEIGHBOR"


class CorrMismatchError(LCSMError, ValueError):
    code = "CORR_MISMATCH"


class BadLevelCountError(LCSMError, ValueError):
    code = "BAD_S"


class InvariantViolationError(LCSMError, RuntimeError):
    code = "INVARIANT_VIOLATION"


class NotPartitionError(LCSMError, ValueError):
    code = "NOT_PARTITION"


class GuardExceededError(LCSMError, RuntimeError):
    code = "TOO_LARGE"


class NotMaxCardinalityError(LCSMError, ValueError):
    code = "NOT_MAXCARD"
