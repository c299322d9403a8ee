"""Model parameters for the N-well lattice reduction.

The reduced model is fixed by the well count N, the nonlinearity power
sigma, the single-well ground energy lambda_D, the hopping beta between
adjacent wells, the semiclassical parameter hbar, and the nonlinear
strength.  The nonlinear strength can be given either as the bare
prefactor epsilon (multiplying per-site couplings C_k) or as the single
dimensionless knob

    eta = epsilon * C / beta,

which is the parameter all bifurcation diagrams are drawn against.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError


@dataclass(frozen=True)
class ModelParams:
    N: int
    sigma: float = 1.0
    lambda_D: float = 0.0
    beta: float = 1.0
    hbar: float = 1.0
    eta: float | None = None
    epsilon: float | None = None

    def __post_init__(self):
        if not isinstance(self.N, (int, np.integer)) or self.N < 2:
            raise ParameterError(f"well count N must be an integer >= 2, got {self.N!r}")
        if self.beta <= 0:
            raise ParameterError(f"hopping beta must be > 0, got {self.beta}")
        if self.hbar <= 0:
            raise ParameterError(f"hbar must be > 0, got {self.hbar}")
        if self.sigma <= 0:
            raise ParameterError(f"nonlinearity power sigma must be > 0, got {self.sigma}")
        if self.eta is not None and self.epsilon is not None:
            # both representations present: they must agree (unit coupling)
            if abs(self.epsilon - self.eta * self.beta) > 1e-9 * max(1.0, abs(self.epsilon)):
                raise ParameterError(
                    f"inconsistent nonlinearity: epsilon={self.epsilon} but "
                    f"eta*beta={self.eta * self.beta}"
                )

    @property
    def effective_eta(self):
        """eta = epsilon*C/beta with the reference coupling C = 1."""
        if self.eta is not None:
            return self.eta
        if self.epsilon is not None:
            return self.epsilon / self.beta
        return 0.0


def nonlinear_coefficients(params, couplings=None):
    """Per-site nonlinear coefficients epsilon*C_k entering the mode equations.

    `couplings` holds the per-site constants C_k (defaults to 1 on every
    site).  When the model is specified through eta the bare prefactor is
    epsilon = eta*beta.
    """
    if couplings is None:
        c = np.ones(params.N)
    else:
        c = np.asarray(couplings, dtype=float)
        if c.shape != (params.N,):
            raise ParameterError(
                f"couplings must have shape ({params.N},), got {c.shape}"
            )
    if params.epsilon is not None:
        return params.epsilon * c
    if params.eta is not None:
        return params.eta * params.beta * c
    return np.zeros(params.N)
