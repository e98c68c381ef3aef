"""Exception hierarchy shared by every diokex module."""


class DiokexError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(DiokexError, ValueError):
    """Variable counts (or point lengths) do not agree."""


class RingMismatch(DiokexError, ValueError):
    """Operands live in different coefficient rings."""


class PolySyntaxError(DiokexError, ValueError):
    def __init__(self, message: str, text: str = "", position: int = 0):
        self.text = text
        self.position = position
        super().__init__(f"{message} at position {position}")


class UnknownVariable(PolySyntaxError):
    pass


class RelationRejected(DiokexError, ValueError):
    """The polynomial cannot serve as a reduction relation (no monic strict pivot)."""


class NotAPerfectPower(DiokexError, ArithmeticError):
    pass


class NoInverseExponent(DiokexError, ArithmeticError):
    pass


class PolicyViolation(DiokexError, ValueError):
    """Requested key material falls below the configured safety floors."""


class KeygenFailed(DiokexError):
    pass


class TranscriptCorrupted(DiokexError):
    pass


class ProtocolStateError(DiokexError, RuntimeError):
    """A protocol message was produced or consumed out of order."""


class MessageFormatError(DiokexError, ValueError):
    pass


class BudgetExceeded(DiokexError):
    def __init__(self, volume: int, ceiling: int):
        self.volume = volume
        self.ceiling = ceiling
        super().__init__(f"search volume {volume} exceeds ceiling {ceiling}")
