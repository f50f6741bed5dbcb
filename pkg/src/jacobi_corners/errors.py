"""Exception types shared across the package.

Two failure categories are distinguished everywhere: inputs outside a
function's stated domain raise DomainError, while computations that start
from valid inputs but cannot reach the requested accuracy (quadrature that
fails its stability check, slice sampling that exhausts its step budget)
raise NumericError.
"""


class DomainError(ValueError):
    """Input violates a documented precondition."""


class NumericError(RuntimeError):
    """A numerical procedure failed its own convergence or stability gate."""
