"""Exception hierarchy shared by all qtrlab modules."""


class QTRError(Exception):
    """Base class for every error raised by qtrlab."""


class ParameterError(QTRError, ValueError):
    """A physical or configuration parameter is outside its allowed domain."""


class DimensionError(ParameterError):
    """Fock truncation dimension is invalid (dim < 2, or too large for a table)."""


class ShapeError(QTRError, ValueError):
    """Operands live on truncated spaces of different dimension."""


class SuperluminalError(ParameterError):
    """Relative velocity with |v| >= 1 (units c = 1)."""


class NumericError(QTRError, ArithmeticError):
    """Non-finite input, or a result that cannot be represented in float64."""


class TruncationError(QTRError):
    """The Fock truncation is too small for the requested coherent amplitude.

    ``required_dim`` holds the smallest dimension that would satisfy the
    tail-weight condition.
    """

    def __init__(self, message, required_dim=None):
        super().__init__(message)
        self.required_dim = required_dim
