"""Exception types shared across the package.

Every error raised on purpose by this package derives from QIdentError, so
callers (in particular the command line driver) can separate domain/usage
problems from genuine verification failures and from "could not decide
within budget" situations.
"""


class QIdentError(Exception):
    """Base class for all deliberate errors raised by qident."""


class DomainError(QIdentError, ValueError):
    """An argument lies outside the documented domain of an operation."""


class NotInvertibleError(QIdentError, ArithmeticError):
    """A truncated power series with zero constant term cannot be inverted."""


class PoleError(QIdentError, ArithmeticError):
    """Evaluation was requested exactly at a pole of a rational expression."""


class InexactDivisionError(QIdentError, ArithmeticError):
    """A polynomial division that must be exact left a nonzero remainder."""


class InsufficientDecayError(QIdentError, ArithmeticError):
    """A series' terms decay too slowly for the summation engine to certify a tail."""


class PrecisionBudgetError(QIdentError, ArithmeticError):
    """A numeric evaluation would exceed its configured work budget.

    Callers map this onto an "inconclusive" outcome rather than a failure:
    the identity was neither confirmed nor refuted.
    """
