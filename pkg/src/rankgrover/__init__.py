"""Grover search with ranked (priority-weighted) marked items.

The statevector simulator, the three-level logical engine and the
closed-form tools all share the oracle convention ``-exp(i*pi*eps)`` on a
marked item with priority ``eps`` in ``[-1, 0]``.
"""

from .errors import (ComputationError, DegenerateAngle, DimensionMismatch, InvalidClassSplit,
                     InvalidCounts, NoLocalMax, NoSolution, NotExactlyRepresentable, NotUnitary,
                     OutOfRange, PrecisionWarning, RankGroverError, TooLarge, TooWide, UsageError,
                     ZeroMass, ZeroMax)
from .simulator import PriorityOracle, evolve, first_local_max

__version__ = "0.1.0"
