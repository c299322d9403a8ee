"""Branch continuation in eta, event detection, and localization asymptotics.

Branches of stationary states are traced by pseudo-arclength
predictor-corrector steps on the extended unknowns y = (a, Omega, eta):
the corrector solves the N+1 stationary equations plus the hyperplane
constraint t.(y - y_pred) = 0 with the tangent t taken from the previous
secant, so folds are traversed like any other point.

Folds are sign changes of d(eta)/ds; symmetry-breaking (pitchfork) points
are zero crossings of the Jacobian eigenvalue whose eigenvector has the
mirror parity opposite to the state's.  Classification is geometric: the
event is supercritical when the emanating asymmetric branch lives on the
side of eta_c where the symmetric state has lost stability, subcritical
when it lives on the other side.

For eta -> -infinity the ground states localize on single wells with

    q_site = 1 + s1/eta^2,  Omega = eta (1 + Gamma/eta^2),
    s1 -> -1,  Gamma -> 1 - sigma           (edge wells;
    s1 -> -2,  Gamma -> 2(1 - sigma)         interior wells),

which provides both the asymptotic seeds and the measured exponents of
the refined solutions.
"""

from dataclasses import dataclass

import numpy as np

from .branches import BifurcationEvent, Branch, BranchPoint
from .errors import ParameterError, SolverError
from .stationary import (
    AmplitudeSolution,
    _localized_guess,
    min_singular_value,
    newton_solve,
    stationary_jacobian,
    stationary_residual,
)


@dataclass
class StepControl:
    initial: float = 1e-2
    min_step: float = 1e-5
    max_step: float = 0.05
    grow: float = 1.4
    shrink: float = 0.5
    corrector_tol: float = 1e-11
    max_corrector_iter: int = 12
    max_points: int = 20000


def _extended_jacobian(a, Omega, eta, sigma):
    """d(R, defect)/d(a, Omega, eta); shape (N+1, N+2)."""
    n = a.size
    J = np.zeros((n + 1, n + 2))
    J[:, : n + 1] = stationary_jacobian(a, Omega, eta, sigma)
    J[:n, n + 1] = -np.abs(a) ** (2.0 * sigma) * a
    return J


def _corrector(y, tangent, y_pred, sigma, tol, max_iter):
    """Newton on [R; defect; t.(y - y_pred)] = 0 in y = (a, Omega, eta)."""
    y = y.copy()
    n = y.size - 2
    for it in range(max_iter):
        a, Omega, eta = y[:n], y[n], y[n + 1]
        R, defect = stationary_residual(a, Omega, eta, sigma)
        F = np.concatenate((R, [defect, tangent @ (y - y_pred)]))
        if np.max(np.abs(F)) <= tol:
            return y, True
        J = np.vstack((_extended_jacobian(a, Omega, eta, sigma), tangent))
        try:
            dy = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError:
            return y, False
        y = y + dy
    return y, False


def _tangent_from_jacobian(a, Omega, eta, sigma, orient):
    """Null direction of the extended Jacobian, oriented along `orient`."""
    J = _extended_jacobian(a, Omega, eta, sigma)
    _, _, Vt = np.linalg.svd(J)
    t = Vt[-1]
    if t @ orient < 0:
        t = -t
    return t / np.linalg.norm(t)


def _point(a, Omega, eta, sigma, s):
    return BranchPoint(
        eta=float(eta),
        Omega=float(Omega),
        a=np.array(a),
        min_singular_value=min_singular_value(a, Omega, eta, sigma),
        arclength=float(s),
    )


def continue_branch(seed: AmplitudeSolution, eta_range, step_control=None, family_label="") -> Branch:
    """Pseudo-arclength continuation of a converged seed across eta_range.

    The branch starts at the seed and walks toward the far end of the
    range, traversing folds; it stops when eta leaves [lo, hi], when the
    corrector fails at the minimum step (truncation_reason is set), or at
    the point budget.  Every accepted point is converged to the corrector
    tolerance and stored (steps are capped so consecutive stored points
    differ by at most ~0.05 in eta).
    """
    sc = step_control or StepControl()
    lo, hi = min(eta_range), max(eta_range)
    if not lo <= seed.eta <= hi:
        raise ParameterError(f"seed eta {seed.eta} outside range [{lo}, {hi}]")
    sol = newton_solve(seed, tol=sc.corrector_tol) if seed.residual_norm > sc.corrector_tol else seed
    n = sol.n
    sigma = sol.sigma
    y = np.concatenate((sol.a, [sol.Omega, sol.eta]))

    # initial direction: toward the far end of the range
    target = lo if abs(seed.eta - lo) >= abs(seed.eta - hi) else hi
    orient = np.zeros(n + 2)
    orient[-1] = 1.0 if target > seed.eta else -1.0
    t = _tangent_from_jacobian(y[:n], y[n], y[n + 1], sigma, orient)

    branch = Branch(points=[_point(y[:n], y[n], y[n + 1], sigma, 0.0)], family_label=family_label)
    branch._sigma = float(sigma)
    s = 0.0
    h = sc.initial
    while len(branch.points) < sc.max_points:
        y_pred = y + h * t
        y_new, ok = _corrector(y_pred, t, y_pred, sigma, sc.corrector_tol, sc.max_corrector_iter)
        if not ok:
            if h <= sc.min_step * (1 + 1e-12):
                branch.truncation_reason = (
                    f"corrector failed at minimum step {sc.min_step:g} near eta = {y[n + 1]:.6g}"
                )
                break
            h = max(h * sc.shrink, sc.min_step)
            continue
        ds = float(np.linalg.norm(y_new - y))
        t = (y_new - y) / ds  # secant tangent
        y = y_new
        s += ds
        if not lo - 1e-12 <= y[n + 1] <= hi + 1e-12:
            # anchor the endpoint exactly on the range boundary
            eta_b = lo if y[n + 1] < lo else hi
            try:
                end = newton_solve(
                    AmplitudeSolution.from_guess(y[:n], eta_b, sigma, y[n]),
                    tol=sc.corrector_tol,
                )
                y = np.concatenate((end.a, [end.Omega, eta_b]))
            except SolverError:
                pass
            branch.points.append(_point(y[:n], y[n], y[n + 1], sigma, s))
            break
        branch.points.append(_point(y[:n], y[n], y[n + 1], sigma, s))
        h = min(h * sc.grow, sc.max_step)

    def refine_fold(i):
        return _refine_fold_by_bisection(branch, i, sigma, sc)

    branch.fold_refiner = refine_fold
    return branch


def _refine_fold_by_bisection(branch, i, sigma, sc):
    """Bisect the bracket around a fold on the sign of the branch tangent's
    eta component (positive before the fold, negative after, or vice versa)."""
    pts = branch.points
    i_lo = max(i - 1, 0)
    i_hi = min(i + 1, len(pts) - 1)
    y_lo = np.concatenate((pts[i_lo].a, [pts[i_lo].Omega, pts[i_lo].eta]))
    y_hi = np.concatenate((pts[i_hi].a, [pts[i_hi].Omega, pts[i_hi].eta]))
    n = y_lo.size - 2

    def eta_slope(y, direction):
        t = _tangent_from_jacobian(y[:n], y[n], y[n + 1], sigma, direction)
        return t[-1]

    walk = (y_hi - y_lo) / np.linalg.norm(y_hi - y_lo)
    s_lo = np.sign(eta_slope(y_lo, walk))
    for _ in range(50):
        gap = np.linalg.norm(y_hi - y_lo)
        if gap <= 1e-5:
            break
        t = (y_hi - y_lo) / gap
        y_pred = y_lo + 0.5 * gap * t
        y_mid, ok = _corrector(y_pred, t, y_pred, sigma, sc.corrector_tol, sc.max_corrector_iter)
        if not ok:
            break
        if np.sign(eta_slope(y_mid, t)) == s_lo:
            y_lo = y_mid
        else:
            y_hi = y_mid
    # at gap <= 1e-5 the quadratic fold profile pins eta_c to ~gap^2
    y_c = y_lo if abs(eta_slope(y_lo, walk)) <= abs(eta_slope(y_hi, walk)) else y_hi
    pt = _point(y_c[:n], y_c[n], y_c[n + 1], sigma, pts[i].arclength)
    return float(y_c[n + 1]), pt


def detect_folds(branch: Branch) -> list[BifurcationEvent]:
    """Sign changes of d(eta)/ds along the branch, refined to the fold point."""
    pts = branch.points
    if len(pts) < 3:
        raise ParameterError("fold detection needs a branch with at least 3 points")
    sigma = branch.sigma
    d_eta = np.diff([p.eta for p in pts])
    events = []
    i = 1
    while i < len(d_eta):
        if d_eta[i - 1] == 0.0:
            i += 1
            continue
        if np.sign(d_eta[i]) * np.sign(d_eta[i - 1]) < 0:
            if branch.fold_refiner is not None:
                eta_c, pt = branch.fold_refiner(i)
            else:
                eta_c, pt = _parabolic_fold(pts, i)
            seed = AmplitudeSolution.from_guess(pt.a, pt.eta, sigma if sigma is not None else 1.0, pt.Omega)
            events.append(
                BifurcationEvent(
                    kind="fold",
                    eta_c=eta_c,
                    classification="none",
                    emanating_branch_seed=seed,
                    family_label=branch.family_label,
                )
            )
            i += 2
        else:
            i += 1
    branch.events.extend(events)
    return events


def _parabolic_fold(pts, i):
    """Vertex of the parabola through three points around the sign change."""
    tri = pts[i - 1 : i + 2]
    s = np.array([p.arclength for p in tri])
    e = np.array([p.eta for p in tri])
    coef = np.polyfit(s - s[1], e, 2)
    s_v = -coef[1] / (2.0 * coef[0]) if coef[0] != 0 else 0.0
    eta_c = float(np.polyval(coef, s_v))
    return eta_c, tri[1]


# ----------------------------------------------------------------------
# symmetry-breaking detection
# ----------------------------------------------------------------------

def _mirror_parity(a, tol=1e-8):
    """+1 for mirror-symmetric states, -1 for antisymmetric, None otherwise."""
    rev = a[::-1]
    if np.max(np.abs(a - rev)) <= tol * max(1.0, np.max(np.abs(a))):
        return 1
    if np.max(np.abs(a + rev)) <= tol * max(1.0, np.max(np.abs(a))):
        return -1
    return None


def _odd_parity_basis(n, parity):
    """Orthonormal basis of the subspace with mirror parity opposite to the state's."""
    m = n // 2
    U = np.zeros((n, m))
    for i in range(m):
        U[i, i] = 1.0
        U[n - 1 - i, i] = -parity  # parity-odd relative to the state
    return U / np.sqrt(2.0)


def _breaking_eigen(a, Omega, eta, sigma, parity):
    """Largest eigenvalue (and vector) of the amplitude Jacobian restricted to
    the symmetry-breaking subspace."""
    n = a.size
    Ja = stationary_jacobian(a, Omega, eta, sigma)[:n, :n]
    U = _odd_parity_basis(n, parity)
    w, V = np.linalg.eigh(U.T @ Ja @ U)
    return w[-1], U @ V[:, -1]


def _symmetrized_solve(a_guess, Omega_guess, eta, sigma, parity):
    a0 = 0.5 * (a_guess + parity * a_guess[::-1])
    sol = newton_solve(AmplitudeSolution.from_guess(a0, eta, sigma, Omega_guess))
    # Newton preserves parity from a symmetric seed; enforce against drift
    a = 0.5 * (sol.a + parity * sol.a[::-1])
    return newton_solve(AmplitudeSolution.from_guess(a, eta, sigma, sol.Omega))


def detect_pitchfork_and_classify(branch: Branch, sigma) -> list[BifurcationEvent]:
    """Zero crossings of the symmetry-breaking Jacobian eigenvalue.

    The branch must consist of mirror-symmetric (or antisymmetric) states.
    Each crossing is refined by bisection in eta on the symmetric branch,
    the emanating asymmetric solution is found by a deflated Newton start
    along the breaking eigenvector, and the event is classified by the
    side of eta_c on which that branch exists.
    """
    pts = branch.points
    if len(pts) < 3:
        raise ParameterError("pitchfork detection needs a branch with at least 3 points")
    parity = _mirror_parity(pts[0].a)
    if parity is None:
        raise ParameterError("branch states are not mirror-(anti)symmetric")

    lam = np.array([_breaking_eigen(p.a, p.Omega, p.eta, sigma, parity)[0] for p in pts])
    events = []
    for i in np.nonzero(np.sign(lam[:-1]) * np.sign(lam[1:]) < 0)[0]:
        ev = _refine_and_classify(pts[i], pts[i + 1], sigma, parity, branch.family_label)
        if ev is not None:
            events.append(ev)
    branch.events.extend(events)
    return events


def _refine_and_classify(p_lo, p_hi, sigma, parity, family_label):
    def eig_at(eta, a_guess, Omega_guess):
        sol = _symmetrized_solve(a_guess, Omega_guess, eta, sigma, parity)
        w, v = _breaking_eigen(sol.a, sol.Omega, eta, sigma, parity)
        return w, v, sol

    eta_a, eta_b = p_lo.eta, p_hi.eta
    w_a, _, sol_a = eig_at(eta_a, p_lo.a, p_lo.Omega)
    w_b, _, sol_b = eig_at(eta_b, p_hi.a, p_hi.Omega)
    if np.sign(w_a) == np.sign(w_b):
        return None
    for _ in range(60):
        if abs(eta_b - eta_a) <= 1e-6:
            break
        eta_m = 0.5 * (eta_a + eta_b)
        frac = (eta_m - eta_a) / (eta_b - eta_a)
        a_guess = (1 - frac) * sol_a.a + frac * sol_b.a
        Om_guess = (1 - frac) * sol_a.Omega + frac * sol_b.Omega
        w_m, _, sol_m = eig_at(eta_m, a_guess, Om_guess)
        if np.sign(w_m) == np.sign(w_a):
            eta_a, w_a, sol_a = eta_m, w_m, sol_m
        else:
            eta_b, w_b, sol_b = eta_m, w_m, sol_m
    eta_c = 0.5 * (eta_a + eta_b)
    _, v_break, sol_c = eig_at(eta_c, sol_a.a, sol_a.Omega)

    # which side is the unstable one (breaking eigenvalue > 0)?
    scale = max(1.0, abs(eta_c))
    probe = 2e-3 * scale
    w_probe, _, _ = eig_at(eta_c + probe, sol_c.a, sol_c.Omega)
    unstable_side = 1 if w_probe > 0 else -1

    emanating = {}
    for side in (1, -1):
        emanating[side] = _find_emanating(sol_c, v_break, side, sigma, parity, scale)
    cls = "none"
    seed_out = None
    if emanating[unstable_side] is not None and emanating[-unstable_side] is None:
        cls = "supercritical"
        seed_out = emanating[unstable_side]
    elif emanating[-unstable_side] is not None and emanating[unstable_side] is None:
        cls = "subcritical"
        seed_out = emanating[-unstable_side]
    elif emanating[unstable_side] is not None:
        seed_out = emanating[unstable_side]
    return BifurcationEvent(
        kind="pitchfork",
        eta_c=float(eta_c),
        classification=cls,
        emanating_branch_seed=seed_out,
        family_label=family_label,
    )


def _find_emanating(sol_c, v_break, side, sigma, parity, scale):
    """Asymmetric solution just off the bifurcation point on one side, or None."""
    for delta in (3e-3, 1e-2, 3e-2, 1e-1):
        eta_t = sol_c.eta + side * delta * scale
        try:
            sym = _symmetrized_solve(sol_c.a, sol_c.Omega, eta_t, sigma, parity)
        except SolverError:
            continue
        for amp in (0.05, 0.1, 0.2, 0.4):
            a0 = sym.a + amp * v_break
            try:
                cand = newton_solve(
                    AmplitudeSolution.from_guess(a0, eta_t, sigma), deflate=(sym.a,)
                )
            except SolverError:
                continue
            asym = np.max(np.abs(cand.a - parity * cand.a[::-1]))
            close = np.max(np.abs(np.abs(cand.a) - np.abs(sym.a)))
            if asym > 1e-5 and close < 0.35:
                return cand
    return None


# ----------------------------------------------------------------------
# ground-state bifurcation table and localization asymptotics
# ----------------------------------------------------------------------

def ground_state_bifurcation_table(N_list, sigma=1.0, eta_search_min=None):
    """First symmetry-breaking point of the symmetric ground state per N.

    Continues the chain ground state from eta = 0 downward and reports the
    first pitchfork (eta_bif, classification) for every (even) N.
    """
    rows = []
    for N in N_list:
        if N % 2 != 0:
            raise ParameterError(f"the ground-state table requires even N, got {N}")
        lo = eta_search_min if eta_search_min is not None else -6.0 * max(1.0, 2.0**sigma / sigma)
        k = np.arange(1, N + 1)
        a0 = np.sqrt(2.0 / (N + 1)) * np.sin(k * np.pi / (N + 1))
        seed = AmplitudeSolution.from_guess(a0, 0.0, sigma, -2.0 * np.cos(np.pi / (N + 1)))
        branch = continue_branch(seed, (lo, 0.0), family_label=f"ground-N{N}")
        events = detect_pitchfork_and_classify(branch, sigma)
        if not events:
            raise SolverError(
                f"no symmetry-breaking point found for N = {N} down to eta = {lo:g}"
            )
        first = max(events, key=lambda e: e.eta_c)
        rows.append({"N": N, "eta_bif": first.eta_c, "classification": first.classification})
    return rows


# measured q_site may undershoot 1 - 2/eta^2 by the next expansion order;
# 10% slack on the deficit covers eta <= -8
_LOCALIZATION_SLACK = 1.1


def asymptotic_localized_seed(eta, sigma, site, N=4):
    """Localized stationary state from the large-|eta| expansion, refined.

    `site` is 1-based.  Returns (solution, report); the report carries the
    measured decay constants s1 = (q_site - 1) eta^2 and
    Gamma = (Omega/eta - 1) eta^2 next to their limits (-1 and 1-sigma for
    edge wells, -2 and 2(1-sigma) for interior wells).  Raises
    ParameterError outside the asymptotic regime (eta > -8) and
    SolverError if Newton cannot refine the seed.
    """
    if eta > -8.0:
        raise ParameterError(f"asymptotic seeding needs eta <= -8, got {eta}")
    if not 1 <= site <= N:
        raise ParameterError(f"site must lie in 1..{N}, got {site}")
    a0, Omega0 = _localized_guess(eta, sigma, site - 1, N)
    try:
        sol = newton_solve(AmplitudeSolution.from_guess(a0, eta, sigma, Omega0))
    except SolverError as exc:
        raise SolverError(
            f"localized seed at eta = {eta:g} did not refine ({exc}); "
            "reach this state by continuation instead"
        ) from exc
    q = sol.q
    idx = site - 1
    if int(np.argmax(q)) != idx:
        raise SolverError(f"refined state is localized on well {int(np.argmax(q)) + 1}, not {site}")
    if q[idx] < 1.0 - _LOCALIZATION_SLACK * 2.0 * eta**-2.0:
        raise SolverError(
            f"refined state is not single-well localized: q_site = {q[idx]:.6f}"
        )
    edge = site in (1, N)
    report = {
        "site": site,
        "site_kind": "edge" if edge else "interior",
        "q_site": float(q[idx]),
        "s1_measured": float((q[idx] - 1.0) * eta**2),
        "gamma_measured": float((sol.Omega / eta - 1.0) * eta**2),
        "s1_limit": -1.0 if edge else -2.0,
        "gamma_limit": (1.0 - sigma) if edge else 2.0 * (1.0 - sigma),
    }
    return sol, report
