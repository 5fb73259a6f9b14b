"""Exception types raised by the numerical routines."""


class ConvergenceError(RuntimeError):
    """A quadrature, series or eigensolve did not reach its requested tolerance."""


class NotPositiveDefiniteError(ValueError):
    """A matrix that must be positive definite is not."""
