"""Exception hierarchy shared by every module of the package."""


class CarlitzError(Exception):
    """Base class for all computational errors raised by czeta."""


class ContextMismatchError(CarlitzError):
    """Operands live in different finite fields."""


class NotInvertibleError(CarlitzError, ZeroDivisionError):
    """Inversion of zero (or of a truncation that is zero to its precision)."""

    def __init__(self, message, prec=None):
        super().__init__(message)
        self.prec = prec


class PrecisionError(CarlitzError):
    """The inputs do not carry enough precision for the requested operation."""


class ConvergenceError(CarlitzError):
    """An argument lies outside the convergence domain of a series."""


class EmbeddingError(CarlitzError):
    """No field embedding exists for the requested pair of degrees."""


class DomainError(CarlitzError, ValueError):
    """An argument violates a documented precondition."""
