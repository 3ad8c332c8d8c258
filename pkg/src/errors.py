"""Exception hierarchy shared by every module.

The classes also derive from the matching builtin so plain
``except ValueError`` / ``except ArithmeticError`` call sites keep working.
"""

from typing import Any


class LpSphereError(Exception):
    """Base class for all lpsphere errors."""


class DomainError(LpSphereError, ValueError):
    """Argument outside the supported domain (x <= 0 for gamma, unknown lattice name, ...)."""


class PreconditionError(LpSphereError, ValueError):
    """A named hypothesis of an operation does not hold for the given input."""

    def __init__(self, hypothesis: str, detail: str = ""):
        self.hypothesis = hypothesis
        message = f"hypothesis failed: {hypothesis}"
        if detail:
            message += f" ({detail})"
        super().__init__(message)


class DegenerateBoundError(LpSphereError):
    """The bound formula would be vacuous (non-positive denominator)."""


class AccuracyError(LpSphereError, ArithmeticError):
    """A numeric procedure did not reach its tolerance within budget.

    ``partial`` carries the best value computed so far and ``est_error`` its
    error estimate, so callers can still report something.
    """

    def __init__(self, message: str, partial: Any = None, est_error: float | None = None):
        self.partial = partial
        self.est_error = est_error
        super().__init__(message)


class ResourceError(LpSphereError, RuntimeError):
    """Work budget exhausted; ``completed_up_to`` is the largest bound fully processed."""

    def __init__(self, message: str, completed_up_to: Any = None):
        self.completed_up_to = completed_up_to
        super().__init__(message)
