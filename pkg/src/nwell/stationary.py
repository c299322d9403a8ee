"""Stationary states of the N-mode system in real-amplitude form.

At a stationary point all phase differences are 0 or pi, so every state is
a real signed vector a with sum a_k^2 = 1 solving

    R_k = Omega a_k + a_{k-1} + a_{k+1} - eta |a_k|^(2 sigma) a_k = 0,

with a_0 = a_{N+1} = 0 and the scaled frequency
Omega = -(lambda_D + hbar*omega)/beta.  At eta = 0 the solutions are the
chain eigenvectors with Omega_j = -2 cos(j pi/(N+1)).

The four-well mirror-symmetric states (q, p, p, q) with p = 1/2 - q admit
a closed form: for sign choices c_j = +/-1 between wells 1-2 and c_l
between wells 2-3,

    eta(q)   = [c_j (sqrt(p/q) - sqrt(q/p)) - c_l] / (q^sigma - p^sigma)
    Omega(q) = -c_j sqrt(p/q) + eta(q) q^sigma,

singular only at q = 1/4.  Families are labeled (j, l) with c = (-1)^j,
(-1)^l; (2,2) is the all-positive family carrying the ground state.
"""

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .branches import Branch, BranchPoint
from .errors import (
    DedupAmbiguityWarning,
    NearBifurcationError,
    ParameterError,
    SolverError,
)

DEFAULT_MULTISTART_SEED = 20317  # documented default for reproducible censuses

_ENDPOINT_FLOOR = 1e-9  # |a_1|, |a_N| below this counts as a vanishing endpoint
_DEDUP_TOL = 1e-6
_DEDUP_AMBIGUOUS = 5e-6


@dataclass
class AmplitudeSolution:
    """Signed real amplitudes of a stationary state and its frequency."""

    a: np.ndarray
    Omega: float
    eta: float
    sigma: float
    residual_norm: float = np.inf

    def __post_init__(self):
        self.a = np.asarray(self.a, dtype=float)

    @property
    def q(self):
        return self.a**2

    @property
    def signs(self):
        return np.where(self.a >= 0, 1, -1)

    @property
    def n(self):
        return self.a.size

    @classmethod
    def from_guess(cls, a, eta, sigma, Omega=None):
        """Normalized guess; Omega defaults to the least-squares value."""
        a = np.asarray(a, dtype=float)
        a = a / np.linalg.norm(a)
        if Omega is None:
            Omega = float(a @ (eta * np.abs(a) ** (2.0 * sigma) * a - _chain_apply(a)))
        R, defect = stationary_residual(a, Omega, eta, sigma)
        rn = max(np.max(np.abs(R)), abs(defect))
        return cls(a=a, Omega=float(Omega), eta=float(eta), sigma=float(sigma), residual_norm=rn)


@dataclass(frozen=True)
class SignPattern:
    """Four-well family label: phase-difference indices in {1, 2}."""

    j: int
    l: int
    m: int

    def __post_init__(self):
        for v in (self.j, self.l, self.m):
            if v not in (1, 2):
                raise ParameterError(f"sign-pattern indices must be 1 or 2, got {v}")

    @property
    def cosines(self):
        return ((-1.0) ** self.j, (-1.0) ** self.l, (-1.0) ** self.m)


def _chain_apply(a):
    """(Tri a)_k = a_{k-1} + a_{k+1} with zero boundary terms."""
    out = np.zeros_like(a)
    out[:-1] += a[1:]
    out[1:] += a[:-1]
    return out


def stationary_residual(a, Omega, eta, sigma):
    """Residual vector R and the normalization defect sum a^2 - 1."""
    a = np.asarray(a, dtype=float)
    R = Omega * a + _chain_apply(a) - eta * np.abs(a) ** (2.0 * sigma) * a
    return R, float(a @ a - 1.0)


def stationary_jacobian(a, Omega, eta, sigma):
    """Jacobian of (R, defect) with respect to (a, Omega); shape (N+1, N+1)."""
    a = np.asarray(a, dtype=float)
    n = a.size
    J = np.zeros((n + 1, n + 1))
    J[:n, :n] = np.diag(Omega - (2.0 * sigma + 1.0) * eta * np.abs(a) ** (2.0 * sigma))
    idx = np.arange(n - 1)
    J[idx, idx + 1] = 1.0
    J[idx + 1, idx] = 1.0
    J[:n, n] = a
    J[n, :n] = 2.0 * a
    return J


def min_singular_value(a, Omega, eta, sigma):
    """Smallest singular value of the augmented stationary Jacobian."""
    return float(np.linalg.svd(stationary_jacobian(a, Omega, eta, sigma), compute_uv=False)[-1])


def _deflation_factor(a, avoid):
    """Shifted deflation weight M = prod_i (1/||a - a_i||^2 + 1).

    Returns (M, nabla log M); the deflated Jacobian needs
    nabla M = M * nabla log M.
    """
    M = 1.0
    grad_log = np.zeros_like(a)
    for ai in avoid:
        d = a - ai
        d2 = float(d @ d)
        if d2 < 1e-30:
            d2 = 1e-30
        M *= 1.0 / d2 + 1.0
        grad_log += (-2.0 / (d2 * d2)) / (1.0 / d2 + 1.0) * d
    return M, grad_log


def newton_solve(
    seed: AmplitudeSolution,
    tol: float = 1e-11,
    max_iter: int = 100,
    deflate=(),
    check_interior_zeros: bool = True,
) -> AmplitudeSolution:
    """Damped Newton on the (N+1)-dimensional system (R, defect) in (a, Omega).

    Converged means max residual <= tol; one extra polish step is taken so
    returned residuals sit near rounding.  The result is gauge-fixed to
    a_1 > 0.  `deflate` lists amplitude vectors to repel from (used for
    branch switching).  Raises NearBifurcationError when the Jacobian is
    singular to 1e-14 and SolverError on non-convergence or when a
    (forbidden) vanishing endpoint or interior zero shows up.
    """
    a = np.asarray(seed.a, dtype=float).copy()
    Omega = float(seed.Omega)
    eta, sigma = seed.eta, seed.sigma
    n = a.size
    if not np.all(np.isfinite(a)) or not np.isfinite(Omega):
        raise SolverError("seed residual is not finite")
    avoid = [np.asarray(v, dtype=float) for v in deflate]

    def merit(a_, Om_):
        R, defect = stationary_residual(a_, Om_, eta, sigma)
        F = np.append(R, defect)
        if avoid:
            M, _ = _deflation_factor(a_, avoid)
            return F, M * np.linalg.norm(F)
        return F, np.linalg.norm(F)

    last_res = np.inf
    for it in range(max_iter):
        F, f0 = merit(a, Omega)
        last_res = np.max(np.abs(F))
        if last_res <= tol:
            # polish: one undamped step if it improves
            J = stationary_jacobian(a, Omega, eta, sigma)
            try:
                dx = np.linalg.solve(J, -F)
                a2, Om2 = a + dx[:n], Omega + dx[n]
                F2, _ = merit(a2, Om2)
                if np.max(np.abs(F2)) < last_res:
                    a, Omega, last_res = a2, Om2, np.max(np.abs(F2))
            except np.linalg.LinAlgError:
                pass
            return _finish_solution(a, Omega, eta, sigma, check_interior_zeros)

        J = stationary_jacobian(a, Omega, eta, sigma)
        if avoid:
            M, grad_log = _deflation_factor(a, avoid)
            Jd = M * J + np.outer(F, M * np.append(grad_log, 0.0))
            rhs = -M * F
        else:
            Jd, rhs = J, -F
        sv = np.linalg.svd(Jd, compute_uv=False)
        if sv[-1] <= 1e-14 * max(sv[0], 1.0):
            raise NearBifurcationError(
                f"stationary Jacobian singular (sv_min/sv_max = {sv[-1] / sv[0]:.2e}) at "
                f"eta = {eta:g}; solve along a branch with continuation instead",
                iterations=it,
                residual=last_res,
            )
        dx = np.linalg.solve(Jd, rhs)
        lam = 1.0
        accepted = False
        for _ in range(40):
            a1, Om1 = a + lam * dx[:n], Omega + lam * dx[n]
            _, f1 = merit(a1, Om1)
            if f1 < f0:
                a, Omega = a1, Om1
                accepted = True
                break
            lam *= 0.5
        if not accepted:
            raise SolverError(
                f"Newton stalled: no descent from residual {last_res:.3e} at iteration {it}",
                iterations=it,
                residual=last_res,
            )
    raise SolverError(
        f"Newton did not converge in {max_iter} iterations; final residual {last_res:.3e}",
        iterations=max_iter,
        residual=last_res,
    )


def _finish_solution(a, Omega, eta, sigma, check_interior_zeros):
    if a[0] < 0:  # gauge
        a = -a
    if min(abs(a[0]), abs(a[-1])) < _ENDPOINT_FLOOR:
        raise SolverError(
            f"converged to a state with vanishing endpoint amplitude "
            f"(|a_1| = {abs(a[0]):.2e}, |a_N| = {abs(a[-1]):.2e}); not admissible"
        )
    # interior zeros cannot occur for even N; reject them as spurious
    if (check_interior_zeros and a.size > 2 and a.size % 2 == 0
            and np.min(np.abs(a[1:-1])) < _ENDPOINT_FLOOR):
        raise SolverError(
            f"converged to a state with an interior zero (min interior |a_k| = "
            f"{np.min(np.abs(a[1:-1])):.2e}); spurious for even N"
        )
    R, defect = stationary_residual(a, Omega, eta, sigma)
    rn = max(np.max(np.abs(R)), abs(defect))
    return AmplitudeSolution(a=a, Omega=float(Omega), eta=float(eta), sigma=float(sigma), residual_norm=rn)


# ----------------------------------------------------------------------
# solution maps (gauge, mirror, staggered)
# ----------------------------------------------------------------------

def gauge_flip(sol: AmplitudeSolution) -> AmplitudeSolution:
    """a -> -a solves at the same (eta, Omega)."""
    return AmplitudeSolution.from_guess(-sol.a, sol.eta, sol.sigma, sol.Omega)


def mirror_image(sol: AmplitudeSolution) -> AmplitudeSolution:
    """Index reversal k -> N+1-k solves at the same (eta, Omega)."""
    return AmplitudeSolution.from_guess(sol.a[::-1], sol.eta, sol.sigma, sol.Omega)


def staggered_image(sol: AmplitudeSolution) -> AmplitudeSolution:
    """b_k = (-1)^k a_k solves at (-eta, -Omega)."""
    b = sol.a * (-1.0) ** np.arange(1, sol.n + 1)
    return AmplitudeSolution.from_guess(b, -sol.eta, sol.sigma, -sol.Omega)


def scaled_energy(sol: AmplitudeSolution) -> float:
    """Per-unit-norm energy in scaled units (lambda_D = 0, beta = 1):
    -<a, Tri a> + eta/(sigma+1) * sum q^(sigma+1)."""
    a = sol.a
    return float(
        -(a @ _chain_apply(a)) + sol.eta / (sol.sigma + 1.0) * np.sum(sol.q ** (sol.sigma + 1.0))
    )


# ----------------------------------------------------------------------
# four-well closed-form families
# ----------------------------------------------------------------------

def _family_cosines(family):
    if isinstance(family, SignPattern):
        j, l = family.j, family.l
    else:
        j, l = family
    if j not in (1, 2) or l not in (1, 2):
        raise ParameterError(f"family indices must be in {{1, 2}}, got {(j, l)}")
    return (-1.0) ** j, (-1.0) ** l


def symmetric_family_fourwell(q, sigma, family=(2, 2)):
    """(eta, Omega) of the mirror-symmetric four-well state with outer action q.

    Valid on (0, 1/2) excluding the balanced point q = 1/4 where the
    closed form is singular; the two subintervals carry distinct branches.
    """
    if not 0.0 < q < 0.5:
        raise ParameterError(f"outer action q must lie in (0, 1/2), got {q}")
    p = 0.5 - q
    if abs(q - 0.25) < 1e-12 or abs(q**sigma - p**sigma) < 1e-300:
        raise ParameterError("q = 1/4 is a singular point of the symmetric family")
    cj, cl = _family_cosines(family)
    r = np.sqrt(p / q)
    eta = (cj * (r - 1.0 / r) - cl) / (q**sigma - p**sigma)
    Omega = -cj * r + eta * q**sigma
    return float(eta), float(Omega)


def family_amplitudes(q, family=(2, 2)):
    """Gauge-fixed signed amplitudes (sqrt q, c_j sqrt p, c_j c_l sqrt p, c_l sqrt q)."""
    cj, cl = _family_cosines(family)
    p = 0.5 - q
    return np.array([np.sqrt(q), cj * np.sqrt(p), cj * cl * np.sqrt(p), cl * np.sqrt(q)])


def solve_family_at_eta(eta, sigma, family=(2, 2), refine=True):
    """All symmetric four-well states of one family at a given eta.

    Scans both subintervals (0, 1/4) and (1/4, 1/2) for roots of
    eta(q) = eta and returns Newton-polished AmplitudeSolutions (sorted by
    outer action q).
    """
    sols = []
    for lo, hi in ((1e-9, 0.25 - 1e-9), (0.25 + 1e-9, 0.5 - 1e-9)):
        f = lambda qq: symmetric_family_fourwell(qq, sigma, family)[0] - eta
        grid = np.linspace(lo, hi, 4001)
        vals = np.array([f(qq) for qq in grid])
        for i in np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]:
            q = brentq(f, grid[i], grid[i + 1], xtol=1e-15, rtol=8.9e-16)
            _, Omega = symmetric_family_fourwell(q, sigma, family)
            sol = AmplitudeSolution.from_guess(family_amplitudes(q, family), eta, sigma, Omega)
            if refine:
                sol = newton_solve(sol)
            sols.append(sol)
    sols.sort(key=lambda s: s.q[0])
    return sols


def sweep_symmetric(q_grid, sigma, family=(2, 2)) -> Branch:
    """Parametric branch (eta(q), Omega(q)) of one symmetric family.

    The grid must keep a distance of at least 1e-6 from the singular point
    q = 1/4; ordering is preserved (ascending).  The returned branch
    carries a closed-form fold refiner, so `detect_folds` resolves fold
    locations to high accuracy.
    """
    q_grid = np.sort(np.asarray(q_grid, dtype=float))
    if np.any(q_grid <= 0) or np.any(q_grid >= 0.5):
        raise ParameterError("q grid must lie inside (0, 1/2)")
    if np.min(np.abs(q_grid - 0.25)) < 1e-6:
        raise ParameterError("q grid must avoid q = 1/4 by at least 1e-6")
    cj, cl = _family_cosines(family)
    j = 2 if cj > 0 else 1
    l = 2 if cl > 0 else 1

    points = []
    s = 0.0
    prev = None
    for q in q_grid:
        eta, Omega = symmetric_family_fourwell(q, sigma, family)
        a = family_amplitudes(q, family)
        y = np.concatenate((a, [Omega, eta]))
        if prev is not None:
            s += float(np.linalg.norm(y - prev))
        prev = y
        points.append(
            BranchPoint(
                eta=eta,
                Omega=Omega,
                a=a,
                min_singular_value=min_singular_value(a, Omega, eta, sigma),
                arclength=s,
            )
        )

    branch = Branch(points=points, family_label=f"fourwell-sym-j{j}l{l}")
    branch._sigma = float(sigma)

    def refine_fold(i):
        # locate the local extremum of eta(q) between the neighbors of point i
        lo = q_grid[max(i - 1, 0)]
        hi = q_grid[min(i + 1, len(q_grid) - 1)]
        eta_nb = max(points[max(i - 1, 0)].eta, points[min(i + 1, len(points) - 1)].eta)
        sign = 1.0 if points[i].eta >= eta_nb else -1.0  # +1: local max of eta
        res = minimize_scalar(
            lambda qq: -sign * symmetric_family_fourwell(qq, sigma, family)[0],
            bounds=(lo, hi),
            method="bounded",
            options={"xatol": 1e-13},
        )
        q_c = float(res.x)
        eta_c, Omega_c = symmetric_family_fourwell(q_c, sigma, family)
        a_c = family_amplitudes(q_c, family)
        pt = BranchPoint(
            eta=eta_c,
            Omega=Omega_c,
            a=a_c,
            min_singular_value=min_singular_value(a_c, Omega_c, eta_c, sigma),
            arclength=points[i].arclength,
        )
        return eta_c, pt

    branch.fold_refiner = refine_fold
    return branch


# ----------------------------------------------------------------------
# census
# ----------------------------------------------------------------------

def _localized_guess(eta, sigma, site, N):
    """Single-well localized seed: q at the site is 1 - 1/eta^2 and decays
    by eta^-2 per lattice hop; Omega = eta (1 + (1-sigma)/eta^2)."""
    q = np.empty(N)
    for k in range(N):
        m = abs(k - site)
        q[k] = 1.0 - eta**-2.0 if m == 0 else eta ** (-2.0 * m)
    a = np.sqrt(q / q.sum())
    Omega = eta * (1.0 + (1.0 - sigma) * eta**-2.0)
    return a, Omega


def _pair_guess(eta, sigma, k, N):
    """Seed concentrated on adjacent wells k, k+1 with the tail decaying
    like the localized scalings."""
    decay = 1.0 / max(eta * eta, 4.0)
    q = np.empty(N)
    for i in range(N):
        m = min(abs(i - k), abs(i - k - 1))
        q[i] = 0.5 if m == 0 else decay**m
    return np.sqrt(q / q.sum())


def _continue_in_eta(sol, eta_target, step=0.25, min_step=1e-3):
    """Naive parameter stepping used for census seeding (fold-free paths)."""
    cur = sol
    eta = cur.eta
    h = step * (1.0 if eta_target > eta else -1.0)
    while (eta_target - eta) * np.sign(h) > 1e-12:
        nxt = eta + h
        if (eta_target - nxt) * np.sign(h) < 0:
            nxt = eta_target
        try:
            cur = newton_solve(AmplitudeSolution.from_guess(cur.a, nxt, cur.sigma, cur.Omega))
            eta = nxt
        except SolverError:
            h *= 0.5
            if abs(h) < min_step:
                return None
    return cur


def _dedup_key_distance(a, b):
    return float(np.max(np.abs(a - b)))


def enumerate_solutions(
    eta,
    sigma,
    N,
    seed_strategy=("linear", "localized", "pairs", "family", "random"),
    n_random=600,
    rng_seed=DEFAULT_MULTISTART_SEED,
    threads=1,
) -> list[AmplitudeSolution]:
    """Census of stationary states at fixed (eta, sigma).

    Seeds: continuation of every chain eigenvector from eta = 0,
    single-well localized guesses, adjacent-pair guesses, the four-well
    closed-form family points (N = 4), and a seeded random multistart
    (half all-positive draws).  Converged states are deduplicated on the
    gauge-fixed amplitude vector at 1e-6; mirror images are distinct
    census entries.  Output is sorted by (Omega, q) ascending.
    """
    if N < 2:
        raise ParameterError(f"N must be >= 2, got {N}")
    strategies = (seed_strategy,) if isinstance(seed_strategy, str) else tuple(seed_strategy)
    seeds = []

    if "linear" in strategies:
        k = np.arange(1, N + 1)
        for j in range(1, N + 1):
            a = np.sqrt(2.0 / (N + 1)) * np.sin(j * k * np.pi / (N + 1))
            Omega0 = -2.0 * np.cos(j * np.pi / (N + 1))
            lin = AmplitudeSolution.from_guess(a, 0.0, sigma, Omega0)
            cont = _continue_in_eta(lin, eta)
            if cont is not None:
                seeds.append((cont.a, cont.Omega))
    if "localized" in strategies and eta < -1.0:
        for site in range(N):
            seeds.append(_localized_guess(eta, sigma, site, N))
    if "pairs" in strategies and eta != 0.0:
        for k in range(N - 1):
            seeds.append((_pair_guess(eta, sigma, k, N), None))
    if "family" in strategies and N == 4:
        for fam in ((2, 2), (1, 2), (2, 1), (1, 1)):
            try:
                for sol in solve_family_at_eta(eta, sigma, fam, refine=False):
                    seeds.append((sol.a, sol.Omega))
            except (ParameterError, SolverError):
                pass
    if "random" in strategies:
        rng = np.random.default_rng(rng_seed)
        for i in range(n_random):
            v = rng.standard_normal(N)
            if i % 2 == 0:
                v = np.abs(v)
            seeds.append((v, None))

    def solve_one(seed):
        a0, Omega0 = seed
        try:
            return newton_solve(AmplitudeSolution.from_guess(a0, eta, sigma, Omega0))
        except SolverError:
            return None

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(solve_one, seeds))
    else:
        results = [solve_one(s) for s in seeds]

    kept: list[AmplitudeSolution] = []
    for sol in results:
        if sol is None:
            continue
        dup = False
        for prev in kept:
            dist = _dedup_key_distance(sol.a, prev.a)
            if dist <= _DEDUP_TOL:
                dup = True
                break
            if dist <= _DEDUP_AMBIGUOUS:
                warnings.warn(
                    f"solutions {dist:.2e} apart sit at the dedup tolerance boundary; "
                    "retaining both",
                    DedupAmbiguityWarning,
                )
        if not dup:
            kept.append(sol)
    kept.sort(key=lambda s: (round(s.Omega, 9),) + tuple(np.round(s.q, 9)))
    return kept
