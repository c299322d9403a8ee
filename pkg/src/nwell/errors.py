"""Exception and warning types shared across the package.

The CLI maps these onto exit codes: parameter/state errors -> 2,
numeric/solver errors -> 3, I/O errors -> 4.
"""


class ParameterError(ValueError):
    """An input parameter violates a precondition."""


class StateError(ValueError):
    """A state object is invalid (not normalized, non-monotone, ...)."""


class NumericError(RuntimeError):
    """A numerical routine failed (divergence, overflow, no convergence)."""


class SolverError(NumericError):
    """Newton iteration did not converge."""

    def __init__(self, message, iterations=None, residual=None):
        super().__init__(message)
        self.iterations = iterations
        self.residual = residual


class NearBifurcationError(SolverError):
    """The stationary Jacobian is numerically singular; the solve sits on
    (or next to) a fold/branch point and should be handled by continuation."""


class AccuracyWarning(UserWarning):
    """A discretization is too coarse for the requested tolerance."""


class RegimeWarning(UserWarning):
    """Parameters fall outside the regime an approximation assumes."""


class DedupAmbiguityWarning(UserWarning):
    """Two solutions sit right at the deduplication tolerance boundary."""
