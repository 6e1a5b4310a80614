"""Exception hierarchy shared by every layer of the package."""

from __future__ import annotations


class KahlerError(Exception):
    """Base class for all errors raised by kahler_cv."""


class ZeroDivisor(KahlerError, ZeroDivisionError):
    """Inverse of an edif with u**2 + v**2 == 0 was requested."""


class ZeroEdif(KahlerError, ValueError):
    """Operation (polar form, log, sqrt) undefined at the zero edif."""


class NonFinite(KahlerError, ArithmeticError):
    """A result overflowed or became NaN."""


class ParseError(KahlerError, ValueError):
    def __init__(self, message: str, position: int, expected: frozenset[str] = frozenset()):
        self.position = position
        self.expected = frozenset(expected)
        detail = f"{message} at position {position}"
        if self.expected:
            detail += f" (expected one of: {', '.join(sorted(self.expected))})"
        super().__init__(detail)


class NotDifferentiable(KahlerError, TypeError):
    pass


class SingularEvaluation(KahlerError, ArithmeticError):
    """A field was evaluated at (or through) one of its singular points."""


class SingularOnCurve(KahlerError, ArithmeticError):
    """The integrand is singular or non-finite somewhere on the curve."""


class BudgetExceeded(KahlerError, RuntimeError):
    """Quadrature ran out of integrand evaluations before meeting tolerance."""


class PoleOnOrOutside(KahlerError, ValueError):
    """The evaluation point is not strictly inside the closed curve."""


class GeometryError(KahlerError, ValueError):
    """Curve configuration violates a geometric precondition."""
