"""Exception types shared across the package."""


class GaussentError(Exception):
    """Base class for all package errors."""


class InvalidShapeError(GaussentError, ValueError):
    """Matrix dimensions are inconsistent with a mode count."""


class InvalidInputError(GaussentError, ValueError):
    """Input violates a precondition (symmetry, positivity, range)."""


class InvalidPartitionError(GaussentError, ValueError):
    """Subsystem names or mode counts do not match."""


class InvalidChannelError(GaussentError, ValueError):
    """Gaussian channel fails the complete positivity condition."""


class SingularBlockError(GaussentError, ArithmeticError):
    """A block to be inverted is singular or too ill-conditioned.

    Attributes:
        condition: Estimated 2-norm condition number of the block.
    """

    def __init__(self, message, condition=float("inf")):
        super().__init__(message)
        self.condition = condition


class NumericInconsistencyError(GaussentError, ArithmeticError):
    """Two independent evaluation routes disagree beyond tolerance."""


class ConvergenceError(GaussentError, ArithmeticError):
    """An iterative or extrapolated sequence failed to converge."""
