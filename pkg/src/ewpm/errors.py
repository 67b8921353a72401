"""Exception hierarchy shared by every module of the package."""


class EwpmError(Exception):
    """Base class for all package errors."""


class PerturbationFailed(EwpmError):
    pass


class PrecisionExhausted(EwpmError):
    """Interval brackets still overlap at the largest permitted precision."""


class NotCrossing(EwpmError):
    pass


class DegenerateInput(EwpmError):
    """A collinear triple was found where the caller promised none."""


class CapExceeded(EwpmError):
    pass


class WeightsNegative(EwpmError):
    pass


class IsolationViolated(EwpmError):
    """The weight table does not have a unique minimum perfect matching."""


class SingularMatrix(IsolationViolated):
    # det(2^w) == 0 can only happen when the minimum is not unique
    pass


class FeasibilityExceeded(EwpmError):
    def __init__(self, message: str, required_bits: int = 0):
        super().__init__(message)
        self.required_bits = required_bits


class NoCycles(EwpmError):
    pass


class NotPerfectMatching(EwpmError):
    pass


class ParseError(EwpmError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class BoundsError(EwpmError):
    pass
