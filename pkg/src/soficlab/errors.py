"""Exception hierarchy shared by every soficlab module."""

from __future__ import annotations


class SoficLabError(Exception):
    """Base class for all library errors."""


class ParseError(SoficLabError, ValueError):
    pass


class GroupMismatch(SoficLabError, ValueError):
    pass


class ModeMismatch(SoficLabError, ValueError):
    """Exact and float group-ring elements were mixed."""


class NeumannConditionFailed(SoficLabError, ArithmeticError):
    """No split A = c(I - B) with ||B||_1 < 1 was found."""


class ResidualCheckFailed(SoficLabError, ArithmeticError):
    pass


class SupportError(SoficLabError, KeyError):
    """A group element was evaluated outside the support of a sofic map."""

    def __str__(self) -> str:  # KeyError quotes its message otherwise
        return str(self.args[0]) if self.args else ""


class SoficOverflow(SoficLabError, ValueError):
    pass


class WindowExhausted(SoficLabError, ValueError):
    pass


class SigmaQualityError(SoficLabError, ValueError):
    """The sofic map is not good enough for the requested construction."""


class PreconditionViolation(SoficLabError, ValueError):
    pass


class NotEvenCover(PreconditionViolation):
    pass


class CapExceeded(SoficLabError, ValueError):
    """An exact search was asked to run beyond its configured size cap."""


class BudgetExceeded(SoficLabError, RuntimeError):
    pass


class InvariantViolation(SoficLabError, AssertionError):
    """A post-condition that should hold by construction failed."""
