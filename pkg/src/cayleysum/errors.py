"""Exception types shared across the package."""


class CayleySumError(Exception):
    """Base class for all package errors."""


class CompositeModulus(CayleySumError):
    """Raised when a field characteristic fails the primality check."""


class SizeExceeded(CayleySumError):
    """Raised when an operation would exceed its documented size budget."""


class ZeroInverse(CayleySumError, ZeroDivisionError):
    """Raised on inversion of the zero element."""


class FieldMismatch(CayleySumError):
    """Raised when operands belong to different fields."""


class NotPrimeField(CayleySumError):
    """Raised when an operation requires a prime field but got an extension."""


class BadParameter(CayleySumError):
    """Raised on out-of-range numeric parameters."""


class BadCongruence(CayleySumError):
    """Raised when a prime fails a required congruence condition."""


class WrongFamily(CayleySumError):
    """Raised when an operation is applied to the wrong connection-set family."""


class EmptySet(CayleySumError):
    """Raised when an operation requires a non-empty set."""


class CheckFailed(CayleySumError):
    """Raised by the CLI when a requested verification does not hold."""
