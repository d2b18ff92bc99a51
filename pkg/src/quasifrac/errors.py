"""Exception hierarchy.

Input problems derive from :class:`ValueError`, numerical breakdowns from
:class:`ArithmeticError`; the CLI maps the two families to exit codes 1 and 3.
"""


class QuasifracError(Exception):
    """Base class for every error raised by this package."""


class InvalidInput(QuasifracError, ValueError):
    pass


class ParseError(InvalidInput):
    """Malformed input file."""


class EmptyInput(InvalidInput):
    pass


class LengthMismatch(InvalidInput):
    pass


class NonPositiveCoefficient(InvalidInput):
    pass


class NonFinite(InvalidInput):
    pass


class DomainError(InvalidInput):
    pass


class OrderOutOfRange(InvalidInput):
    pass


class IndexOutOfRange(InvalidInput):
    pass


class PoleAtOrigin(InvalidInput):
    pass


class NotHermitian(InvalidInput):
    pass


class NonPositiveSpectrum(InvalidInput):
    pass


class NumericalFailure(QuasifracError, ArithmeticError):
    pass


class BracketFailure(NumericalFailure):
    pass


class ZeroOnContour(NumericalFailure):
    pass


class QuadratureUnstable(NumericalFailure):
    pass


class NotAligned(NumericalFailure):
    pass


class NoConvergence(NumericalFailure):
    pass
