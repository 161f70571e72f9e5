"""Exception types raised across the package.

Everything derives from ValueError so callers that only care about
"bad input" can catch one class, while tests and the CLI can report
the precise failure kind.
"""


class EmptyInput(ValueError):
    """Dataset construction received fewer than two points."""


class RaggedInput(ValueError):
    """Rows of a dataset do not all have the same length."""


class NonFinite(ValueError):
    """An input array contains NaN or infinity."""


class DomainError(ValueError):
    """A numeric argument is outside its documented domain."""


class NonPowerOfTwo(ValueError):
    """A transform length is not a power of two."""


class DimensionMismatch(ValueError):
    """Operand dimensions are incompatible."""


class TooLarge(ValueError):
    """An exhaustive computation was requested above its size cap."""


class SizeMismatch(ValueError):
    """Two datasets that must be aligned have different sizes."""


class ParseError(ValueError):
    """A dataset file could not be decoded; message carries the location."""


class PreconditionError(ValueError):
    """An analytic bound was evaluated outside its region of validity."""


class ZeroVector(ValueError):
    """An operation that needs a direction received the zero vector."""


class NoReductionWarning(UserWarning):
    """The selected target dimension is not smaller than the input."""
