"""Desk-scale 1D eigensolver cross-check of the N-well mode reduction.

A single smooth compactly supported well

    v(x) = -V0 exp(1/((x/r)^2 - 1))   for |x| < r,   0 outside

is replicated on N equally spaced centers.  The second-order central
finite-difference discretization of -hbar^2 d^2/dx^2 + V with Dirichlet
ends yields (i) the single-well ground pair (lambda_D, psi_D), (ii) the
midpoint hopping estimate beta = 2 hbar^2 psi_D(l/2) psi_D'(l/2), and
(iii) the lowest N-well cluster, which should follow the cosine pattern

    lambda_j ~ lambda_fit - 2 beta_fit cos(j pi/(N+1)).

All agreement is asymptotic in hbar, so the fits carry loose tolerances.
"""

import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import AccuracyWarning, ParameterError, RegimeWarning


@dataclass(frozen=True)
class Well1D:
    depth: float = 5.0
    radius: float = 1.0
    spacing: float = 2.5

    def __post_init__(self):
        if self.depth <= 0:
            raise ParameterError(f"well depth must be > 0, got {self.depth}")
        if self.radius <= 0:
            raise ParameterError(f"well radius must be > 0, got {self.radius}")
        if self.spacing <= 2 * self.radius:
            raise ParameterError(
                f"well spacing must exceed the support diameter 2r = {2 * self.radius}, "
                f"got {self.spacing}"
            )

    def value(self, x):
        """Potential of a single well centered at 0."""
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        inside = np.abs(x) < self.radius
        u = (x[inside] / self.radius) ** 2
        out[inside] = -self.depth * np.exp(1.0 / (u - 1.0))
        return out

    def multi_value(self, x, N):
        """Potential of N wells centered at (j - (N+1)/2) * spacing."""
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for c in self.centers(N):
            out += self.value(x - c)
        return out

    def centers(self, N):
        return (np.arange(1, N + 1) - 0.5 * (N + 1)) * self.spacing

    @property
    def curvature(self):
        """v''(0) = 2 V0 / (e r^2)."""
        return 2.0 * self.depth / (np.e * self.radius**2)


@dataclass
class GridFunction:
    """Uniform-grid samples with linear interpolation of values and of the
    centered-difference derivative."""

    x: np.ndarray
    values: np.ndarray

    @property
    def h(self):
        return float(self.x[1] - self.x[0])

    def __call__(self, xq):
        return np.interp(xq, self.x, self.values, left=0.0, right=0.0)

    def derivative(self, xq):
        d = np.gradient(self.values, self.h)
        return np.interp(xq, self.x, d, left=0.0, right=0.0)


class HoppingEstimate(NamedTuple):
    beta: float  # magnitude used by the lattice model
    raw: float   # signed value 2 hbar^2 psi(l/2) psi'(l/2); negative for a decaying tail


class CosineFit(NamedTuple):
    lambda_fit: float
    beta_fit: float
    residual: float  # max fit deviation / cluster spread


@dataclass
class NWellSpectrum:
    x: np.ndarray
    eigenvalues: np.ndarray      # lowest N
    next_eigenvalue: float       # (N+1)-th, for the separation check
    modes: np.ndarray            # (n_points, N), grid-normalized columns


@dataclass
class Spectrum1D:
    """Everything the 1D cross-check produces for one parameter set."""

    lambda_D: float
    psi_D: GridFunction
    nwell: NWellSpectrum
    fit: CosineFit
    beta_formula: HoppingEstimate
    hbar: float
    well: Well1D
    N: int

    @property
    def nwell_eigs(self):
        return self.nwell.eigenvalues


def _fd_lowest(potential, half_width, n_points, hbar, k):
    """Lowest k eigenpairs of -hbar^2 d2/dx2 + V on (-L, L), Dirichlet ends.

    Uses bisection + inverse iteration on the symmetric tridiagonal matrix.
    Eigenvectors are normalized in the grid inner product (h * sum = 1).
    """
    x = np.linspace(-half_width, half_width, n_points + 2)[1:-1]
    h = x[1] - x[0]
    diag = 2.0 * hbar**2 / h**2 + potential(x)
    off = np.full(n_points - 1, -(hbar**2) / h**2)
    w, v = eigh_tridiagonal(diag, off, select="i", select_range=(0, k - 1))
    v = v / np.sqrt(h)
    for j in range(v.shape[1]):
        if v[np.argmax(np.abs(v[:, j])), j] < 0:
            v[:, j] = -v[:, j]
    return x, w, v


def dirichlet_ground_state(well: Well1D, hbar, domain_half_width=None, n_points=4000):
    """Ground pair of the single-well Dirichlet problem.

    Warns (AccuracyWarning) when doubling the grid still moves the
    eigenvalue by more than 1e-6.
    """
    if domain_half_width is None:
        domain_half_width = well.spacing / 2.0 + 3.0 * well.radius + 2.0
    if domain_half_width <= well.radius:
        raise ParameterError("domain must contain the well support")
    if n_points < 1000:
        raise ParameterError(f"n_points must be >= 1000, got {n_points}")
    x, w, v = _fd_lowest(well.value, domain_half_width, n_points, hbar, 1)
    x2, w2, _ = _fd_lowest(well.value, domain_half_width, 2 * n_points, hbar, 1)
    if abs(w2[0] - w[0]) > 1e-6:
        warnings.warn(
            f"grid too coarse: lambda_D moved by {abs(w2[0] - w[0]):.2e} under grid "
            "doubling; increase n_points",
            AccuracyWarning,
        )
    return float(w[0]), GridFunction(x=x, values=v[:, 0])


def hopping_beta_formula(psi_D: GridFunction, ell, hbar) -> HoppingEstimate:
    """Midpoint hopping estimate beta = 2 hbar^2 psi(l/2) psi'(l/2).

    For a positive decaying tail the raw product is negative; the lattice
    hopping is its magnitude, and both are returned.
    """
    mid = 0.5 * ell
    if not psi_D.x[0] < mid < psi_D.x[-1]:
        raise ParameterError(f"midpoint {mid} lies outside the computed grid")
    raw = 2.0 * hbar**2 * psi_D(mid) * psi_D.derivative(mid)
    return HoppingEstimate(beta=abs(float(raw)), raw=float(raw))


def nwell_spectrum_direct(well: Well1D, N, ell=None, hbar=0.3, n_points=4000,
                          domain_half_width=None) -> NWellSpectrum:
    """Lowest N (+1) eigenpairs of the N-well problem on a common grid."""
    if N < 2:
        raise ParameterError(f"N must be >= 2, got {N}")
    ell = well.spacing if ell is None else ell
    if ell <= 2 * well.radius:
        raise ParameterError("wells overlap: need ell > 2r")
    if domain_half_width is None:
        domain_half_width = N * ell / 2.0 + 3.0 * well.radius
    w = Well1D(depth=well.depth, radius=well.radius, spacing=ell)
    x, eigs, modes = _fd_lowest(lambda xx: w.multi_value(xx, N), domain_half_width,
                                n_points, hbar, N + 1)
    return NWellSpectrum(x=x, eigenvalues=eigs[:N], next_eigenvalue=float(eigs[N]),
                         modes=modes[:, :N])


def compare_lemma2(nwell_eigs, next_eigenvalue=None) -> CosineFit:
    """Least-squares fit lambda_j ~ lambda_fit - 2 beta_fit cos(j pi/(N+1)).

    The residual is the max fit deviation over the cluster spread.  Warns
    (RegimeWarning) when the cluster is not separated from the next
    eigenvalue by at least the spread.
    """
    eigs = np.asarray(nwell_eigs, dtype=float)
    N = eigs.size
    c = np.cos(np.arange(1, N + 1) * np.pi / (N + 1))
    M = np.column_stack((np.ones(N), c))
    coef, *_ = np.linalg.lstsq(M, eigs, rcond=None)
    lambda_fit, slope = coef
    beta_fit = -0.5 * slope
    spread = eigs[-1] - eigs[0]
    residual = float(np.max(np.abs(M @ coef - eigs)) / spread) if spread > 0 else 0.0
    if next_eigenvalue is not None and spread > 0:
        if next_eigenvalue - eigs[-1] < spread:
            warnings.warn(
                f"cluster separation {next_eigenvalue - eigs[-1]:.3e} below the cluster "
                f"spread {spread:.3e}; outside the tight-binding regime",
                RegimeWarning,
            )
    return CosineFit(lambda_fit=float(lambda_fit), beta_fit=float(beta_fit), residual=residual)


def mode_overlap_matrix(spectrum: NWellSpectrum, psi_D: GridFunction, well: Well1D, N):
    """Projection of the N-well modes onto shifted single-well ground states.

    In the tight-binding regime the absolute values reproduce the
    closed-form mode matrix alpha_{j,k} entrywise.
    """
    x = spectrum.x
    h = float(x[1] - x[0])
    P = np.zeros((N, N))
    for k, c in enumerate(well.centers(N)):
        phi = psi_D(x - c)
        nrm = np.sqrt(np.sum(phi**2) * h)
        if nrm == 0:
            raise ParameterError("shifted ground state does not overlap the grid")
        phi /= nrm
        P[:, k] = (spectrum.modes.T @ phi) * h
    return P


def run_crosscheck(well: Well1D, N, hbar=0.3, n_points=4000) -> Spectrum1D:
    """Single-well pair, hopping estimates, N-well cluster, and cosine fit."""
    lam_D, psi_D = dirichlet_ground_state(well, hbar, n_points=n_points)
    beta_est = hopping_beta_formula(psi_D, well.spacing, hbar)
    spectrum = nwell_spectrum_direct(well, N, hbar=hbar, n_points=n_points)
    fit = compare_lemma2(spectrum.eigenvalues, spectrum.next_eigenvalue)
    return Spectrum1D(
        lambda_D=lam_D,
        psi_D=psi_D,
        nwell=spectrum,
        fit=fit,
        beta_formula=beta_est,
        hbar=hbar,
        well=well,
        N=N,
    )
