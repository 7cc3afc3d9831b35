"""Exception types raised by the numerical layers.

Everything argument-shaped (bad lengths, odd pilot sizes, out-of-range
probabilities) raises plain ValueError at the call site. The classes here
mark genuine numerical failures that callers may want to catch and report
with context, e.g. a sweep attaching grid coordinates before re-raising.
"""


class SingularFisherError(ArithmeticError):
    """Fisher information matrix is numerically singular at the given point."""


class QuadratureError(ArithmeticError):
    """Gauss-Hermite expectation failed its internal consistency check."""


class ConvergenceError(RuntimeError):
    """Iterative estimator did not converge; carries the last iterate.

    Attributes:
        last_iterate: (zeta, alpha) at the final iteration.
        grad_norm: infinity norm of the objective gradient there.
    """

    def __init__(self, message, last_iterate=None, grad_norm=None):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.grad_norm = grad_norm


class ExperimentError(RuntimeError):
    """Monte Carlo experiment aborted (e.g. too many estimator failures)."""
