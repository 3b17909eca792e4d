"""Exception hierarchy.

Two families: :class:`ValidationError` for bad inputs (CLI exit code 1) and
:class:`NumericalError` for computations that could not deliver their
contract (CLI exit code 2).
"""


class EventologyError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(EventologyError, ValueError):
    pass


class InvalidEventSet(ValidationError):
    pass


class WrongLength(ValidationError):
    pass


class NegativeProbability(ValidationError):
    pass


class NotNormalized(ValidationError):
    pass


class NegativeValue(ValidationError):
    pass


class NonFiniteValue(ValidationError):
    pass


class EventSetMismatch(ValidationError):
    pass


class NegativeRate(ValidationError):
    pass


class EmptySetExcluded(ValidationError):
    """The ratio form needs ``p*(empty) > 0``."""


class ZeroAlpha(ValidationError):
    pass


class OutOfSupport(ValidationError):
    pass


class TargetOutOfRange(ValidationError):
    pass


class DegenerateMismatch(ValidationError):
    pass


class EmptyBatch(ValidationError):
    pass


class ParseError(ValidationError):
    """Malformed model, distribution or batch text.

    ``kind`` names the failure (``DuplicateMask``, ``MissingMask``,
    ``BadBitstring``, ...). ``line`` and ``column`` are 1-based.
    """

    def __init__(self, kind, message, line, column=1):
        self.kind = kind
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {kind}: {message}")


class NumericalError(EventologyError, ArithmeticError):
    pass


class DidNotConverge(NumericalError):
    pass


class ResampleBudgetExhausted(NumericalError):
    pass
