"""Time evolution and energy functions of the N-mode system.

The complex amplitudes d_k on the localized mode basis obey

    i hbar d_k' = (T d)_k + g_k |d_k|^(2 sigma) d_k,       g_k = epsilon*C_k,

with T the line coupling matrix and the normalization sum |d_k|^2 = 1
conserved.  Writing d_k = sqrt(q_k) exp(i theta_k) turns this into a
canonical system with Hamiltonian

    H = lambda_D sum q_k
        - 2 beta sum cos(theta_{k+1}-theta_k) sqrt(q_{k+1} q_k)
        + sum g_k q_k^(sigma+1) / (sigma+1),

which is the conserved energy reported by the integrator.  The complex
chart is primary; the (q, theta) view is derived and refuses states with
q_k below 1e-12 where the angle chart degenerates.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import NumericError, ParameterError, StateError
from .lattice import build_line_coupling, closed_form_spectrum
from .params import ModelParams, nonlinear_coefficients

_NORM_TOL = 1e-6
_Q_CHART_FLOOR = 1e-12


@dataclass
class ModeState:
    """Complex amplitudes on the N localized modes at time t."""

    d: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        self.d = np.asarray(self.d, dtype=complex)
        if self.d.ndim != 1 or self.d.size < 2:
            raise StateError(f"d must be a complex vector of length >= 2, got shape {self.d.shape}")

    @property
    def norm_sq(self):
        return float(np.vdot(self.d, self.d).real)


@dataclass
class ActionAngleState:
    q: np.ndarray
    theta: np.ndarray

    def __post_init__(self):
        self.q = np.asarray(self.q, dtype=float)
        self.theta = np.asarray(self.theta, dtype=float)
        if self.q.shape != self.theta.shape or self.q.ndim != 1:
            raise StateError("q and theta must be 1-d arrays of equal length")
        if np.any(self.q < 0):
            raise StateError("actions q_k must be non-negative")


@dataclass
class ReducedState:
    """Cumulative actions Q_h = q_1 + ... + q_h and relative angles
    Theta_h = theta_h - theta_{h+1}, h = 1..N-1 (the total phase is cyclic)."""

    Q: np.ndarray
    Theta: np.ndarray

    def __post_init__(self):
        self.Q = np.asarray(self.Q, dtype=float)
        self.Theta = np.asarray(self.Theta, dtype=float)
        if self.Q.shape != self.Theta.shape or self.Q.ndim != 1:
            raise StateError("Q and Theta must be 1-d arrays of equal length")
        if np.any(np.diff(self.Q) < -1e-12) or self.Q[0] < -1e-12 or self.Q[-1] > 1 + 1e-12:
            raise StateError("cumulative actions must satisfy 0 <= Q_1 <= ... <= Q_{N-1} <= 1")


def to_action_angle(state: ModeState) -> ActionAngleState:
    q = np.abs(state.d) ** 2
    if np.min(q) < _Q_CHART_FLOOR:
        raise StateError(
            f"action-angle chart undefined: min q = {np.min(q):.3e} < {_Q_CHART_FLOOR:g}"
        )
    theta = np.mod(np.angle(state.d), 2.0 * np.pi)
    return ActionAngleState(q=q, theta=theta)


def to_modes(state: ActionAngleState, t: float = 0.0) -> ModeState:
    return ModeState(d=np.sqrt(state.q) * np.exp(1j * state.theta), t=t)


def _check_normalized(d):
    nsq = float(np.vdot(d, d).real)
    if abs(nsq - 1.0) > _NORM_TOL:
        raise StateError(f"state not normalized: sum |d_k|^2 = {nsq:.8f}")


def rhs_nmode(state: ModeState, params: ModelParams, couplings=None) -> np.ndarray:
    """d/dt of the mode amplitudes: (1/(i hbar)) [T d + g_k |d_k|^(2s) d_k]."""
    d = np.asarray(state.d, dtype=complex)
    if d.size != params.N:
        raise ParameterError(f"state has {d.size} modes but params.N = {params.N}")
    _check_normalized(d)
    g = nonlinear_coefficients(params, couplings)
    T = build_line_coupling(params).entries
    return (T @ d + g * np.abs(d) ** (2.0 * params.sigma) * d) / (1j * params.hbar)


def hamiltonian(state: ActionAngleState, params: ModelParams, couplings=None) -> float:
    """Energy in the (q, theta) chart; equals `mode_energy` of the complex state."""
    q, th = state.q, state.theta
    if q.size != params.N:
        raise ParameterError(f"state has {q.size} sites but params.N = {params.N}")
    g = nonlinear_coefficients(params, couplings)
    hop = np.sum(np.cos(th[1:] - th[:-1]) * np.sqrt(q[1:] * q[:-1]))
    return float(
        params.lambda_D * np.sum(q)
        - 2.0 * params.beta * hop
        + np.sum(g * q ** (params.sigma + 1.0)) / (params.sigma + 1.0)
    )


def mode_energy(d, params: ModelParams, couplings=None) -> float:
    """<d, T d> plus the nonlinear energy; conserved along the flow."""
    d = np.asarray(d, dtype=complex)
    g = nonlinear_coefficients(params, couplings)
    T = build_line_coupling(params).entries
    q = np.abs(d) ** 2
    return float(
        np.vdot(d, T @ d).real + np.sum(g * q ** (params.sigma + 1.0)) / (params.sigma + 1.0)
    )


def hamiltonian_gradients(state: ActionAngleState, params: ModelParams, couplings=None):
    """Analytic (dH/dq, dH/dtheta).

    dH/dq_k  = lambda_D - beta * sum_nb sqrt(q_nb/q_k) cos(theta_nb - theta_k)
               + g_k q_k^sigma
    dH/dth_k = 2 beta * sum_nb sqrt(q_nb q_k) sin(theta_nb - theta_k) * (-1)

    Neighbor sums run over the chain adjacency.  Requires q_k > 0.
    """
    q, th = state.q, state.theta
    n = q.size
    if n != params.N:
        raise ParameterError(f"state has {n} sites but params.N = {params.N}")
    if np.min(q) < _Q_CHART_FLOOR:
        raise StateError("gradients undefined at q_k ~ 0")
    g = nonlinear_coefficients(params, couplings)
    dHdq = params.lambda_D + g * q**params.sigma
    dHdth = np.zeros(n)
    for k in range(n):
        for j in (k - 1, k + 1):
            if 0 <= j < n:
                dHdq[k] -= params.beta * np.sqrt(q[j] / q[k]) * np.cos(th[j] - th[k])
                dHdth[k] -= 2.0 * params.beta * np.sqrt(q[j] * q[k]) * np.sin(th[j] - th[k])
    return dHdq, dHdth


def action_angle_rhs(state: ActionAngleState, params: ModelParams, couplings=None):
    """(dq/dt, dtheta/dt) of the canonical system:
    hbar q' = dH/dtheta, hbar theta' = -dH/dq."""
    dHdq, dHdth = hamiltonian_gradients(state, params, couplings)
    return dHdth / params.hbar, -dHdq / params.hbar


def reduce_state(state: ActionAngleState) -> ReducedState:
    """Canonical reduction using sum q_k = 1: drops the cyclic total phase."""
    q, th = state.q, state.theta
    if abs(np.sum(q) - 1.0) > _NORM_TOL:
        raise StateError(f"sum q_k = {np.sum(q):.8f}, expected 1")
    return ReducedState(Q=np.cumsum(q)[:-1], Theta=th[:-1] - th[1:])


def reduced_hamiltonian(state: ReducedState, params: ModelParams, couplings=None) -> float:
    """Reduced energy K*(Q, Theta); equals `hamiltonian` on normalized states."""
    Q = np.concatenate(([0.0], state.Q, [1.0]))
    q = np.diff(Q)
    if np.any(q < -1e-12):
        raise StateError("cumulative actions not monotone")
    q = np.clip(q, 0.0, None)
    g = nonlinear_coefficients(params, couplings)
    hop = np.sum(np.cos(state.Theta) * np.sqrt(q[1:] * q[:-1]))
    return float(
        params.lambda_D
        - 2.0 * params.beta * hop
        + np.sum(g * q ** (params.sigma + 1.0)) / (params.sigma + 1.0)
    )


# ----------------------------------------------------------------------
# integrator
# ----------------------------------------------------------------------

# Suzuki fractal coefficients: symmetric 4th-order composition of the
# 2nd-order kernel.
_SUZUKI_S = 1.0 / (4.0 - 4.0 ** (1.0 / 3.0))
_COMPOSITION = {
    2: (1.0,),
    4: (_SUZUKI_S, _SUZUKI_S, 1.0 - 4.0 * _SUZUKI_S, _SUZUKI_S, _SUZUKI_S),
}


@dataclass
class Trajectory:
    """Sampled trajectory plus the conservation report of the run."""

    times: np.ndarray
    d: np.ndarray  # (n_samples, N) complex
    norm_drift: float
    energy_drift: float
    dt: float
    stride: int
    energies: np.ndarray = field(default=None)

    @property
    def norms(self):
        return np.sum(np.abs(self.d) ** 2, axis=1)


class _SplitStepper:
    """Strang step: half nonlinear phase, exact linear rotation, half phase.

    Both substeps are unitary on the amplitudes, so the norm is conserved
    to rounding.  `order=4` composes the Strang kernel with Suzuki
    coefficients for a 4th-order symmetric scheme.
    """

    def __init__(self, params, couplings, dt, order):
        if order not in _COMPOSITION:
            raise ParameterError(f"order must be one of {sorted(_COMPOSITION)}, got {order}")
        basis = closed_form_spectrum(params)
        self._A = basis.A  # rows are eigenvectors; T = A.T diag(mu) A
        self._mu = basis.mu
        self._g = nonlinear_coefficients(params, couplings)
        self._two_sigma = 2.0 * params.sigma
        self._hbar = params.hbar
        self._coefs = _COMPOSITION[order]
        self._lin_phase = [np.exp(-1j * self._mu * (c * dt) / params.hbar) for c in self._coefs]
        self._dt = dt

    def step(self, d):
        for c, ph in zip(self._coefs, self._lin_phase):
            h = 0.5 * c * self._dt / self._hbar
            d = d * np.exp(-1j * h * self._g * np.abs(d) ** self._two_sigma)
            d = self._A.T @ (ph * (self._A @ d))
            d = d * np.exp(-1j * h * self._g * np.abs(d) ** self._two_sigma)
        return d


def integrate(
    initial: ModeState,
    t_end: float,
    params: ModelParams,
    dt: float | None = None,
    couplings=None,
    stride: int = 1,
    order: int = 2,
) -> Trajectory:
    """Propagate the N-mode system to t_end and report conservation drift.

    dt defaults to 0.01*hbar/beta, which resolves the fastest linear
    frequency.  A negative t_end integrates backward.  Samples are stored
    every `stride` steps (plus the final point); the report holds the max
    drift of the norm and of the relative energy over the samples.
    """
    if dt is None:
        dt = 0.01 * params.hbar / params.beta
    if dt <= 0:
        raise ParameterError(f"dt must be > 0, got {dt}")
    if stride < 1:
        raise ParameterError(f"stride must be >= 1, got {stride}")
    d = np.asarray(initial.d, dtype=complex).copy()
    if d.size != params.N:
        raise ParameterError(f"initial state has {d.size} modes but params.N = {params.N}")
    _check_normalized(d)

    direction = 1.0 if t_end >= 0 else -1.0
    n_steps = int(round(abs(t_end) / dt))
    n_steps = max(n_steps, 1) if t_end != 0 else 0
    step_dt = direction * abs(t_end) / n_steps if n_steps else dt
    stepper = _SplitStepper(params, couplings, step_dt, order)

    e0 = mode_energy(d, params, couplings)
    times = [initial.t]
    samples = [d.copy()]
    energies = [e0]
    norm_drift = 0.0
    energy_drift = 0.0
    t = initial.t
    for i in range(1, n_steps + 1):
        d = stepper.step(d)
        t = initial.t + i * step_dt
        if i % stride == 0 or i == n_steps:
            if not np.all(np.isfinite(d.view(float))):
                raise NumericError(f"integration overflowed at t = {t:.6g}")
            times.append(t)
            samples.append(d.copy())
            e = mode_energy(d, params, couplings)
            energies.append(e)
            norm_drift = max(norm_drift, abs(float(np.vdot(d, d).real) - 1.0))
            energy_drift = max(energy_drift, abs(e - e0) / max(1.0, abs(e0)))
    return Trajectory(
        times=np.array(times),
        d=np.array(samples),
        norm_drift=norm_drift,
        energy_drift=energy_drift,
        dt=step_dt,
        stride=stride,
        energies=np.array(energies),
    )
