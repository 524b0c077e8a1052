"""
Exception hierarchy for perisobolev.

Hard failures raise; soft failures (a check that did not pass, an iteration
cap that was reached) are recorded as flags on the returned result objects.
"""

from typing import List, Optional


class PerisobolevError(Exception):
    """Base class for all errors raised by the package."""


class RejectionError(PerisobolevError, ValueError):
    """An input violates a precondition of the requested operation."""


class SupercriticalError(RejectionError):
    """The mean of s·p reaches the dimension, so no critical exponent exists."""


class QuadratureError(PerisobolevError):
    """A modular or seminorm could not be evaluated to a finite value."""


class NonConvergenceError(PerisobolevError):
    """An iterative method hit its cap and the caller asked for a hard failure."""


class ConfigError(PerisobolevError):
    """
    Configuration problems, all of them at once.

    Args:
        errors: Human-readable messages, one per problem found
    """

    def __init__(self, errors: List[str], path: Optional[str] = None):
        self.errors = list(errors)
        self.path = path
        where = f" in {path}" if path else ""
        super().__init__(f"{len(self.errors)} configuration error(s){where}")
