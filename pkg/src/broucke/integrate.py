"""Propagation of the regularized flow and its 8x8 variational frame.

Thin layer over scipy's DOP853 (explicit Runge-Kutta of order 8 with
embedded error estimate and dense output).  Physical time is carried as
a quadrature variable appended to the state, and the variational frame
is co-integrated with the base state as one 73-dimensional system so the
Hessian is always evaluated at the concurrent phase point.
"""

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from . import _backend
from .dynamics import J, RegState, angular_momentum, gamma
from .errors import IntegrationBudgetError, NoCrossingError, StepFailureError

DEFAULT_TOL = 1e-12
# Generous per-integration budget of right-hand-side evaluations; hitting
# it means the trajectory wandered somewhere pathological (used by the
# shooting scan to discard hopeless parameter values).
DEFAULT_BUDGET = 2_000_000


@dataclass
class Trajectory:
    """Dense solution of the 9-dim flow (state + physical time).

    ``s``/``states``/``t`` hold the accepted integration steps;  ``sol``
    is the scipy dense-output object for continuous interpolation.
    """

    params: object
    s: np.ndarray
    states: np.ndarray          # shape (n, 8)
    t: np.ndarray               # physical time at each sample
    sol: object = None          # scipy OdeSolution, or None
    gamma_drift: float = 0.0
    a2_drift: float = 0.0
    n_steps: int = 0

    def __len__(self):
        return len(self.s)

    def state_at(self, s):
        """Interpolate the trajectory at fictitious time ``s``."""
        if self.sol is None:
            raise ValueError("trajectory was integrated without dense output")
        y = self.sol(s)
        return RegState.from_vector(y[:8], s=float(s), t=float(y[8]))

    @property
    def end(self):
        return RegState.from_vector(self.states[-1], s=float(self.s[-1]),
                                    t=float(self.t[-1]))


@dataclass
class FrameTrajectory:
    """Variational frame Y(s) sampled along a trajectory, Y(0) = Y0."""

    base: Trajectory
    s_frames: np.ndarray
    frames: np.ndarray          # shape (k, 8, 8)
    symplectic_residual: float = 0.0

    @property
    def Y_end(self):
        return self.frames[-1]


class _BudgetedRHS:
    """Wraps a kernel RHS with an evaluation budget."""

    def __init__(self, kernel, params, budget):
        self._f = kernel
        self._args = (params.m1, params.m2, params.mu, params.E)
        self._left = budget

    def __call__(self, s, y):
        self._left -= 1
        if self._left < 0:
            raise IntegrationBudgetError("RHS evaluation budget exhausted")
        return self._f(y, *self._args)


def _start_vector(start):
    if isinstance(start, RegState):
        return np.concatenate([start.z, [start.t]])
    y = np.asarray(start, dtype=float)
    if y.shape == (8,):
        return np.concatenate([y, [0.0]])
    if y.shape == (9,):
        return y.copy()
    raise ValueError("start must be a RegState or an 8/9-vector")


def _check_success(sol):
    if sol.status == -1:
        raise StepFailureError(sol.message)


def _drifts(params, states):
    g0 = gamma(states[0], params)
    a0 = angular_momentum(states[0], params)
    gd = max(abs(gamma(z, params) - g0) for z in states)
    ad = max(abs(angular_momentum(z, params) - a0) for z in states)
    return gd, ad


def flow(start, params, s_span, tol=DEFAULT_TOL, dense=True,
         budget=DEFAULT_BUDGET, t_eval=None):
    """Integrate the regularized flow over ``s_span``.

    Returns a Trajectory whose samples are the accepted steps (or
    ``t_eval`` if given).  Raises SingularConfigurationError if an
    unregularized collision is approached and StepFailureError if the
    step size collapses.
    """
    rhs = _BudgetedRHS(_backend.rhs_flow, params, budget)
    sol = solve_ivp(rhs, s_span, _start_vector(start), method="DOP853",
                    rtol=tol, atol=tol, dense_output=dense, t_eval=t_eval)
    _check_success(sol)
    states = sol.y[:8].T.copy()
    gd, ad = _drifts(params, states)
    return Trajectory(params=params, s=sol.t.copy(), states=states,
                      t=sol.y[8].copy(), sol=sol.sol if dense else None,
                      gamma_drift=gd, a2_drift=ad, n_steps=sol.t.size - 1)


def flow_with_frame(start, Y_init, params, s_span, tol=DEFAULT_TOL,
                    n_samples=17, budget=DEFAULT_BUDGET):
    """Co-integrate the flow and the variational frame Y' = J D2Gamma Y.

    Samples the frame at ``n_samples`` points across the span (endpoints
    included) and records conservation and symplecticity diagnostics.
    """
    y0 = np.concatenate([_start_vector(start),
                         np.asarray(Y_init, dtype=float).ravel()])
    if s_span[0] == s_span[1]:
        base = Trajectory(params=params, s=np.array([s_span[0]]),
                          states=y0[:8].reshape(1, 8), t=y0[8:9].copy(),
                          sol=None)
        return FrameTrajectory(base=base,
                               s_frames=np.array([s_span[0]]),
                               frames=y0[9:].reshape(1, 8, 8).copy())
    rhs = _BudgetedRHS(_backend.rhs_frame, params, budget)
    t_eval = np.linspace(s_span[0], s_span[1], max(2, n_samples))
    sol = solve_ivp(rhs, s_span, y0, method="DOP853", rtol=tol, atol=tol,
                    t_eval=t_eval)
    _check_success(sol)

    states = sol.y[:8].T.copy()
    gd, ad = _drifts(params, states)
    base = Trajectory(params=params, s=sol.t.copy(), states=states,
                      t=sol.y[8].copy(), sol=None, gamma_drift=gd,
                      a2_drift=ad, n_steps=sol.t.size - 1)

    frames = sol.y[9:].T.reshape(-1, 8, 8).copy()
    Yinv0 = np.linalg.inv(frames[0])
    sym = 0.0
    for Y in frames:
        X = Y @ Yinv0
        sym = max(sym, np.max(np.abs(X.T @ J @ X - J)))
    return FrameTrajectory(base=base, s_frames=sol.t.copy(), frames=frames,
                           symplectic_residual=sym)


def flow_to_event(start, params, component, direction, tol=DEFAULT_TOL,
                  s_max=100.0, budget=DEFAULT_BUDGET):
    """Integrate until a state component crosses zero in a given direction.

    Returns ``(s_star, y9, trajectory)`` where the crossing is refined on
    the dense output of the step containing it.  Raises NoCrossingError
    if no crossing occurs before ``s_max``.
    """
    rhs = _BudgetedRHS(_backend.rhs_flow, params, budget)

    def event(s, y):
        return y[component]
    event.terminal = True
    event.direction = direction

    sol = solve_ivp(rhs, (0.0, s_max), _start_vector(start), method="DOP853",
                    rtol=tol, atol=tol, events=event)
    _check_success(sol)
    if sol.t_events[0].size == 0:
        raise NoCrossingError(
            f"component {component} has no crossing with direction "
            f"{direction:+d} in s <= {s_max}")
    s_star = float(sol.t_events[0][0])
    y_star = sol.y_events[0][0].copy()
    states = sol.y[:8].T.copy()
    gd, ad = _drifts(params, states)
    traj = Trajectory(params=params, s=sol.t.copy(), states=states,
                      t=sol.y[8].copy(), sol=None, gamma_drift=gd,
                      a2_drift=ad, n_steps=sol.t.size - 1)
    return s_star, y_star, traj


def find_section(traj, g, direction=-1):
    """Locate the first crossing of the section g(state) = 0 on a trajectory.

    ``g`` maps a RegState to a scalar; ``direction`` is +1 (increasing),
    -1 (decreasing) or 0 (either).  The crossing is bracketed on the
    stored samples and refined on the dense output until |g| < 1e-12.
    Raises NoCrossingError when no compatible sign change exists.
    """
    if traj.sol is None:
        raise ValueError("find_section requires a dense trajectory")

    def g_of_s(s):
        return g(traj.state_at(s))

    vals = np.array([g(RegState.from_vector(traj.states[i], s=traj.s[i],
                                            t=traj.t[i]))
                     for i in range(len(traj))])
    for i in range(len(vals) - 1):
        a, b = vals[i], vals[i + 1]
        if a == 0.0 and (direction == 0 or np.sign(b - a) == direction):
            s_star = float(traj.s[i])
            return s_star, traj.state_at(s_star)
        if a * b < 0.0:
            if direction != 0 and np.sign(b - a) != direction:
                continue
            s_star = brentq(g_of_s, traj.s[i], traj.s[i + 1],
                            xtol=1e-15, rtol=8.9e-16)
            state = traj.state_at(s_star)
            if abs(g(state)) > 1e-12:
                raise NoCrossingError("section refinement stalled")
            return float(s_star), state
    raise NoCrossingError("no section crossing with the requested direction")
