"""Exception types shared across the package."""


class SqrtRegError(Exception):
    """Base class for all library-specific failures."""


class DimensionError(SqrtRegError, ValueError):
    """An input has the wrong shape; the message names the offending dimension."""


class DisallowedSetError(SqrtRegError, ValueError):
    """The index set is not an allowed set for the requested penalty norm."""


class InterpolationError(SqrtRegError, ArithmeticError):
    """The residual norm collapsed to (numerical) zero.

    A square-root-penalized fit with zero residual behaves like ordinary least
    squares and overfits; the first-order optimality conditions are undefined
    there, so we refuse to continue instead of dividing by zero.
    """


class DegenerateDesignError(SqrtRegError, ArithmeticError):
    """The design makes a requested quantity blow up (for example an
    effective-sparsity constant whose defining minimum is numerically zero)."""


class CalibrationError(SqrtRegError, ValueError):
    """Parameters are outside the regime where a closed-form level is valid."""
