"""Exception types raised by the solvers and readers."""


class DimensionError(ValueError):
    """Vector length does not match the operator dimension."""


class DegenerateInputError(ValueError):
    """Input carries no information to work with (e.g. an all-zero matrix)."""


class ZeroRHSError(ValueError):
    """The right-hand side is the zero vector; the solution is x = 0."""


class ContractViolation(RuntimeError):
    """An object was used outside of its documented state machine."""


class NumericalBreakdown(ArithmeticError):
    """A pivot that theory guarantees to be nonzero vanished in floating point."""


class NoNullvectorError(RuntimeError):
    """The operator appears nonsingular: the residual of the solve vanished."""


class MatrixMarketError(ValueError):
    """Malformed or unsupported Matrix Market input.

    The message always carries the offending line number.
    """

    def __init__(self, lineno, message):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}")
