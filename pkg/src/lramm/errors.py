"""Exception types shared across the package."""


class LrammError(Exception):
    """Base class for all library errors."""


class ShapeError(LrammError, ValueError):
    """Operand dimensions do not conform."""


class ParameterError(LrammError, ValueError):
    """A parameter is outside its supported range."""


class OracleLimitError(LrammError, ValueError):
    """Input exceeds the size cap of the dense SVD oracle."""


class OverflowRiskError(LrammError, ValueError):
    """Integer accumulation could overflow for the requested bit budgets."""


class DegenerateDenominatorError(LrammError, ZeroDivisionError):
    """Relative error requested against a zero-norm reference."""


class FormatError(LrammError, ValueError):
    """Malformed matrix file. Carries the byte offset of the defect."""

    def __init__(self, message, offset):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset
