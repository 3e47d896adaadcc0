class PlanvecError(Exception):
    """Base class for all planvec errors."""


class UnsupportedFormatError(PlanvecError, ValueError):
    pass


class TooSmallError(PlanvecError, ValueError):
    pass


class TooDenseError(PlanvecError):
    """Raised when the snapped grid would produce too many wall candidates."""

    def __init__(self, count: int, cap: int):
        self.count = count
        self.cap = cap
        super().__init__(
            f"{count} wall candidates exceed the cap of {cap}; "
            "increase --snap-tol to merge nearby grid lines"
        )


class SvgParseError(PlanvecError, ValueError):
    def __init__(self, message: str, line: int):
        self.line = line
        super().__init__(f"line {line}: {message}")


class ConfigError(PlanvecError, ValueError):
    pass


class GuidanceNumericError(PlanvecError, ArithmeticError):
    pass
