"""Exception hierarchy shared by every engine."""


class RankGroverError(Exception):
    """Base class for all errors raised by this package."""


class UsageError(RankGroverError, ValueError):
    """Invalid parameters supplied by a caller."""


class ComputationError(RankGroverError, ArithmeticError):
    """A numerical routine could not produce a trustworthy answer."""


class InvalidCounts(UsageError):
    pass


class DimensionMismatch(UsageError):
    pass


class InvalidClassSplit(UsageError):
    pass


class OutOfRange(UsageError):
    pass


class TooWide(UsageError):
    pass


class TooLarge(UsageError):
    pass


class ZeroMax(UsageError):
    pass


class NotUnitary(ComputationError):
    pass


class NoLocalMax(ComputationError):
    pass


class DegenerateAngle(ComputationError):
    pass


class NoSolution(ComputationError):
    pass


class ZeroMass(ComputationError):
    pass


class NotExactlyRepresentable(ComputationError):
    pass


class PrecisionWarning(RuntimeWarning):
    """Emitted when a closed-form result misses its residual tolerance."""
