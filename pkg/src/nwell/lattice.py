"""Coupling matrices for wells on a line or a general grid, and their spectra.

For N wells on a line the linearized coupling matrix is the tridiagonal
Toeplitz matrix

    T = -beta * Tri + lambda_D * I,

with Tri the 0/1 tridiagonal adjacency of the chain.  Its spectrum is
known in closed form,

    mu_j = lambda_D - 2 beta cos(j pi / (N+1)),      j = 1..N,
    alpha_{j,k} = sqrt(2/(N+1)) sin(j k pi / (N+1)),

and a dense symmetric eigensolver provides the independent numerical
cross-check used throughout the test suite.
"""

from dataclasses import dataclass

import numpy as np

from .errors import NumericError, ParameterError
from .params import ModelParams


@dataclass(frozen=True)
class CouplingMatrix:
    n: int
    entries: np.ndarray
    structure_tag: str  # "line" or "graph"


@dataclass(frozen=True)
class ModeBasis:
    """Eigenvalues `mu` (ascending) and eigenvector rows `A` (orthogonal)."""

    A: np.ndarray
    mu: np.ndarray


def build_line_coupling(params: ModelParams) -> CouplingMatrix:
    """T = -beta*Tri + lambda_D*I for N wells on a line; entries are exact."""
    n = params.N
    T = np.diag(np.full(n, params.lambda_D))
    off = -params.beta
    for k in range(n - 1):
        T[k, k + 1] = off
        T[k + 1, k] = off
    return CouplingMatrix(n=n, entries=T, structure_tag="line")


def closed_form_spectrum(params: ModelParams) -> ModeBasis:
    """Closed-form spectrum of the line coupling matrix.

    Eigenvalues come out ascending in j; every row of A has positive first
    component (sin(j pi/(N+1)) > 0), which fixes the sign ambiguity.
    """
    n = params.N
    j = np.arange(1, n + 1)
    mu = params.lambda_D - 2.0 * params.beta * np.cos(j * np.pi / (n + 1))
    jk = np.outer(j, j)
    A = np.sqrt(2.0 / (n + 1)) * np.sin(jk * np.pi / (n + 1))
    return ModeBasis(A=A, mu=mu)


def build_graph_coupling(adjacency, params: ModelParams) -> CouplingMatrix:
    """Coupling matrix for wells on the nodes of an arbitrary graph.

    `adjacency` is a 0/1 symmetric matrix with zero diagonal; coupled pairs
    get -beta, the diagonal is lambda_D.  For the square four-cycle
    (edges 1-2, 1-3, 2-4, 3-4) the spectrum is
    {lambda_D - 2 beta, lambda_D, lambda_D, lambda_D + 2 beta}; the trace
    (= 4 lambda_D) forces the top eigenvalue to +2 beta.
    """
    adj = np.asarray(adjacency, dtype=float)
    if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
        raise ParameterError(f"adjacency must be square, got shape {adj.shape}")
    n = adj.shape[0]
    if n != params.N:
        raise ParameterError(f"adjacency is {n}x{n} but params.N = {params.N}")
    if not np.array_equal(adj, adj.T):
        raise ParameterError("adjacency must be symmetric")
    if np.any(np.diag(adj) != 0):
        raise ParameterError("adjacency must have zero diagonal")
    if not np.all(np.isin(adj, (0.0, 1.0))):
        raise ParameterError("adjacency entries must be 0 or 1")
    T = np.diag(np.full(n, params.lambda_D)) - params.beta * adj
    return CouplingMatrix(n=n, entries=T, structure_tag="graph")


def diagonalize_symmetric(matrix: CouplingMatrix) -> ModeBasis:
    """Numerical eigenpairs of a symmetric coupling matrix, ascending.

    Serves as the independent oracle for `closed_form_spectrum`.  Rows of A
    are sign-normalized (first nonzero component positive); members of a
    degenerate group are ordered by their lexicographically smallest row.
    Residuals ||T v - mu v|| are checked against 1e-10 * ||T||.
    """
    T = np.asarray(matrix.entries, dtype=float)
    if not np.allclose(T, T.T, rtol=0.0, atol=1e-14 * max(1.0, np.abs(T).max())):
        raise ParameterError("matrix must be symmetric")
    try:
        mu, V = np.linalg.eigh(T)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eigensolver failed to converge: {exc}") from exc
    A = V.T.copy()

    scale = max(np.abs(mu).max(), 1e-300)
    for i in range(A.shape[0]):
        row = A[i]
        nz = np.nonzero(np.abs(row) > 1e-12 * np.abs(row).max())[0]
        if nz.size and row[nz[0]] < 0:
            A[i] = -row

    # deterministic order inside degenerate groups
    i = 0
    n = len(mu)
    while i < n:
        j = i + 1
        while j < n and abs(mu[j] - mu[i]) <= 1e-9 * max(1.0, scale):
            j += 1
        if j - i > 1:
            order = sorted(range(i, j), key=lambda k: tuple(np.round(A[k], 12)))
            A[i:j] = A[order]
            mu[i:j] = mu[order]
        i = j

    norm_T = np.linalg.norm(T, 2)
    for k in range(n):
        res = np.linalg.norm(T @ A[k] - mu[k] * A[k])
        if res > 1e-10 * max(norm_T, 1.0):
            raise NumericError(
                f"eigenpair {k} residual {res:.3e} exceeds 1e-10*||T|| "
                f"({1e-10 * norm_T:.3e})"
            )
    return ModeBasis(A=A, mu=mu)
