"""Error hierarchy shared by the solver modules and the command line."""
from typing import Optional


class PrivacySignalError(Exception):
    """Base class for every error raised by this package."""


class InputError(PrivacySignalError, ValueError):
    """Malformed input: dimension mismatch, bad rational, non-stochastic map, invalid parameter."""


class NotBayesPlausibleError(InputError):
    """A distribution of posteriors does not average back to the prior."""


class InfeasibleError(PrivacySignalError):
    """A well-formed problem has no solution."""


class RefusedError(PrivacySignalError):
    """An operation refuses its input; `check` names the failing test."""

    def __init__(self, message: str, check: Optional[str] = None):
        super().__init__(message)
        self.check = check


class ContractViolation(PrivacySignalError):
    """A documented precondition was broken by the caller (e.g. an unbounded region)."""


class InvariantBreach(PrivacySignalError):
    """An internal invariant failed. Should never fire."""

    def __init__(self, invariant: str, detail: str = ""):
        super().__init__(f"invariant '{invariant}' breached" + (f": {detail}" if detail else ""))
        self.invariant = invariant
