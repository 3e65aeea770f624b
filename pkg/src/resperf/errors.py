"""Exception types shared across the package."""


class ResperfError(Exception):
    """Base class for all domain errors raised by this package."""


class DivisionByZero(ResperfError):
    """Division by an exactly-zero field or series element."""


class UnknownValuation(ResperfError):
    """A series is zero to its precision, so its valuation is undecidable."""


class DenominatorVanishes(ResperfError):
    """A rational function was composed at a point killing its denominator."""


class LengthBound(ResperfError):
    """Requested Witt vector length exceeds the configured bound."""


class NotResiduallySeparable(ResperfError):
    """Jet maps only extend along residually separable extensions."""


class PrecisionExhausted(ResperfError):
    """The truncation window was consumed before a decision was reached.

    Callers are expected to retry at a higher precision level.
    """


class NoStabilization(ResperfError):
    """The precision-doubling budget ran out before two rounds agreed."""


class NonIntegralDimension(ResperfError):
    """A character average was not a rational integer in [0, dim]."""


class UnsupportedExtension(ResperfError):
    """The extension data is well-formed but outside the supported kinds."""


class SpecParseError(ResperfError):
    """A spec file or expression failed to parse."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        loc = ""
        if line is not None:
            loc = f" at line {line}" + (f", column {column}" if column is not None else "")
        super().__init__(f"parse error{loc}: {message}")
