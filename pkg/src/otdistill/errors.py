"""Exception types shared across the package."""


class OTDistillError(Exception):
    """Base class for all errors raised by otdistill."""


class InvalidInput(OTDistillError, ValueError):
    """An input value violates a documented precondition (shape, range, finiteness)."""


class InvalidConfig(OTDistillError, ValueError):
    """A configuration value is out of its admissible range."""


class TooLargeForExact(OTDistillError, ValueError):
    """An exact solver was asked for an instance beyond its size cap."""


class NumericalUnderflow(OTDistillError, ArithmeticError):
    """The Sinkhorn kernel underflowed to an all-zero row or column.

    Usually means the regularization weight is too small for the cost scale;
    rescale the cost matrix or raise the weight.
    """


class NumericalFailure(OTDistillError, ArithmeticError):
    """A numeric computation produced a non-finite value."""
