"""Periodic-orbit search by one-parameter shooting.

The orbit starts at a regularized binary collision on the symmetry axis,
gamma(0) = (0, 0, 0, zeta4, 2*m1^{3/2}, 0, 0, 0), which lies on the
Gamma = 0 surface for every zeta4 and every energy.  The single shooting
unknown is zeta4; the boundary condition is P1 = 0 at the first
decreasing crossing of the section Q4 = 0 (the collinear configuration),
which is the quarter period.  The full period is T = 4*s0, assembled
from the quarter by the orbit's two reflection symmetries.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .dynamics import MassParams, RegState, S, gamma
from .errors import (IntegrationBudgetError, NoCrossingError, OrbitError,
                     SingularConfigurationError, StepFailureError)
from .integrate import DEFAULT_TOL, Trajectory, flow, flow_to_event

# Geometric bracketing scan for zeta4 (ratio per spec'd robustness over
# derivative-free search): start value, growth factor, and bounds.
SCAN_START = 0.05
SCAN_RATIO = 1.25
SCAN_MAX = 40.0
SCAN_MIN = 1e-4

RESIDUAL_TOL = 1e-10
SECTION_EPS = 1e-10     # off-section / off-subspace gate at the crossing
S_MAX_DEFAULT = 100.0

# Supported mass range for the shooting solver.  The m1/m2 ratio in the
# potential degenerates as m1 -> 1.5 and solutions beyond this limit are
# not validated (continuation does keep converging somewhat further, but
# the family there is outside the artifact's contract).
MAX_M1 = 1.465


@dataclass
class OrbitSolution:
    """A converged periodic orbit at fixed (m1, E)."""

    params: MassParams
    zeta4: float
    s0: float                   # quarter period in fictitious time
    quarter: Trajectory         # dense trajectory over [0, s0]
    zeta1: float                # Q1 at the collinear point
    zeta8: float                # P4 at the collinear point
    residual: float             # P1 at the collinear point
    t_period: float             # physical period
    # residual evaluations spent locating the root (bracketing plus the
    # Brent iteration; the fixed-cost final refinement is excluded)
    iterations: int = 0

    @property
    def T(self):
        return 4.0 * self.s0

    @property
    def gamma_drift(self):
        return self.quarter.gamma_drift

    @property
    def a2_drift(self):
        return self.quarter.a2_drift

    def initial(self):
        return initial_state(self.params, self.zeta4)

    def as_dict(self):
        """Plain-scalar summary (the orbit dump record)."""
        return {
            "m1": self.params.m1,
            "E": self.params.E,
            "zeta4": self.zeta4,
            "s0": self.s0,
            "T": self.T,
            "t_period": self.t_period,
            "zeta1": self.zeta1,
            "zeta8": self.zeta8,
            "residual": self.residual,
            "gamma_drift": self.gamma_drift,
            "a_drift": self.a2_drift,
        }


def initial_state(params, zeta4):
    """Collision start state; Gamma = 0 there for any E by construction."""
    if zeta4 <= 0:
        raise ValueError("zeta4 must be positive")
    return RegState(Q=[0.0, 0.0, 0.0, zeta4],
                    P=[2.0 * params.m1 ** 1.5, 0.0, 0.0, 0.0])


def shoot_residual(params, zeta4, tol=DEFAULT_TOL, s_max=S_MAX_DEFAULT):
    """P1 at the first decreasing Q4 = 0 crossing, and the crossing time.

    residual = 0 characterizes the periodic orbit.  Integration errors
    (no crossing, collision, step failure) propagate to the caller.
    """
    r, s0, _, _ = _shoot(params, zeta4, tol, s_max)
    return r, s0


def _shoot(params, zeta4, tol, s_max):
    s0, y, traj = flow_to_event(initial_state(params, zeta4), params,
                                component=3, direction=-1, tol=tol,
                                s_max=s_max)
    return float(y[4]), s0, y, traj


def _scan_bracket(params, tol, s_max):
    """Geometric scan for the first sign change of the shooting residual.

    Walks the ladder zeta4 = SCAN_START * SCAN_RATIO**k in ascending
    order (k from negative through positive) and takes the first sign
    change between consecutive valid candidates: the smallest-zeta4 root
    is the primitive orbit, larger roots belong to other families whose
    basins can contain near-collisions.  Candidates whose integration
    fails (collision, no crossing, budget) are skipped.
    """
    skippable = (NoCrossingError, SingularConfigurationError,
                 StepFailureError, IntegrationBudgetError)

    def probe(z):
        try:
            return _shoot(params, z, tol, s_max)[0]
        except skippable:
            return None

    k_min = math.ceil(math.log(SCAN_MIN / SCAN_START) / math.log(SCAN_RATIO))
    k_max = math.floor(math.log(SCAN_MAX / SCAN_START) / math.log(SCAN_RATIO))

    evals = 0
    prev = None
    for k in range(k_min, k_max + 1):
        z = SCAN_START * SCAN_RATIO ** k
        r = probe(z)
        evals += 1
        if r is not None and prev is not None and r * prev[1] < 0:
            return prev[0], z, evals
        if r is not None:
            prev = (z, r)
    raise OrbitError(
        f"bracketing failed: no sign change of the shooting residual for "
        f"zeta4 in [{SCAN_MIN}, {SCAN_MAX}] at m1={params.m1}")


def _guess_bracket(params, guess, tol, s_max):
    """Small bracket around a continuation guess, grown geometrically."""
    skippable = (NoCrossingError, SingularConfigurationError,
                 StepFailureError, IntegrationBudgetError)
    r0 = _shoot(params, guess, tol, s_max)[0]
    evals = 1
    if abs(r0) < RESIDUAL_TOL:
        return guess, guess, evals
    h = 1e-3
    while h <= 0.6:
        for other in (guess * (1.0 - h), guess * (1.0 + h)):
            if other <= 0:
                continue
            try:
                r = _shoot(params, other, tol, s_max)[0]
            except skippable:
                continue
            evals += 1
            if r * r0 < 0:
                return min(guess, other), max(guess, other), evals
        h *= 4.0
    raise OrbitError(
        f"warm start failed: no sign change near guess {guess} "
        f"at m1={params.m1}")


def _solve_bracket(params, lo, hi, tol, s_max):
    """Brent polish of the residual root inside a sign-change bracket."""
    if lo == hi:
        return lo, 0
    count = [0]

    def f(z):
        count[0] += 1
        return _shoot(params, z, tol, s_max)[0]

    try:
        zeta4 = brentq(f, lo, hi, xtol=1e-14, rtol=8.9e-16, maxiter=100)
    except (NoCrossingError, SingularConfigurationError,
            StepFailureError, IntegrationBudgetError) as exc:
        raise OrbitError(
            f"root polish hit an invalid trajectory inside the bracket "
            f"[{lo:g}, {hi:g}] at m1={params.m1}: {exc}") from exc
    return zeta4, count[0]


def _attempt(params, bracket_fn, tol, s_max):
    """One bracket -> polish -> gate pipeline; returns an OrbitSolution."""
    lo, hi, evals = bracket_fn()
    zeta4, polish_evals = _solve_bracket(params, lo, hi, tol, s_max)
    evals += polish_evals

    # One secant step at a tighter tolerance: the Brent root is accurate
    # only to the event-integration noise of ``tol``, and downstream
    # quantities (the quarter-period frame) are very sensitive to zeta4
    # for small masses.  (This fixed-cost refinement is not counted as
    # solver iterations.)
    ptol = max(0.1 * tol, 1e-14)
    try:
        r1 = _shoot(params, zeta4, ptol, s_max)[0]
        h = 1e-7 * zeta4
        r2 = _shoot(params, zeta4 + h, ptol, s_max)[0]
        if r2 != r1:
            step = -r1 * h / (r2 - r1)
            if abs(step) < 1e-5 * zeta4:
                zeta4 += step
    except (NoCrossingError, SingularConfigurationError,
            StepFailureError, IntegrationBudgetError):
        pass

    residual, s0, y_cross, _ = _shoot(params, zeta4, ptol, s_max)

    off_axis = max(abs(y_cross[1]), abs(y_cross[2]),
                   abs(y_cross[5]), abs(y_cross[6]))
    checks = {
        "residual |P1(s0)|": abs(residual) < RESIDUAL_TOL,
        "invariant-subspace leakage at s0": off_axis < SECTION_EPS,
        "|Q4(s0)|": abs(y_cross[3]) < SECTION_EPS,
        "zeta1 != 0": abs(y_cross[0]) > 1e-6,
        "zeta8 != 0": abs(y_cross[7]) > 1e-6,
    }
    failed = [name for name, ok in checks.items() if not ok]
    if failed:
        raise OrbitError(
            f"shooting converged to an invalid solution at m1={params.m1} "
            f"(failed gates: {', '.join(failed)})")

    quarter = flow(initial_state(params, zeta4), params, (0.0, s0), tol=tol,
                   dense=True)
    if quarter.gamma_drift > 1e-9:
        raise OrbitError(
            f"energy drift {quarter.gamma_drift:.2e} on the quarter orbit "
            f"at m1={params.m1}")

    return OrbitSolution(params=params, zeta4=float(zeta4), s0=s0,
                         quarter=quarter, zeta1=float(y_cross[0]),
                         zeta8=float(y_cross[7]), residual=float(residual),
                         t_period=4.0 * float(y_cross[8]), iterations=evals)


def find_orbit(params, guess=None, tol=DEFAULT_TOL, s_max=S_MAX_DEFAULT,
               validate_range=True):
    """Solve for the periodic orbit at the given masses and energy.

    Without ``guess`` the zeta4 axis is scanned geometrically for a
    bracket; with a guess (continuation) a small bracket is grown around
    it and the whole warm attempt falls back to the fresh scan if it
    brackets garbage (possible near the family's edges, where zeta4
    changes fast).  The bracketed root is polished by Brent's method and
    the solution is gated on the residual, on the collinear arrangement
    at s0, and on conservation.

    Masses above MAX_M1 are rejected unless ``validate_range=False``
    (exploration only; solutions there are unvalidated).
    """
    if isinstance(params, (int, float)):
        params = MassParams(m1=float(params))
    if validate_range and params.m1 > MAX_M1:
        raise OrbitError(
            f"m1={params.m1} exceeds the supported range (0, {MAX_M1}]: "
            f"the mass ratio m1/m2 degenerates as m1 -> 1.5 and the "
            f"solver is not validated there")

    if guess is not None and guess > 0:
        try:
            return _attempt(
                params, lambda: _guess_bracket(params, guess, tol, s_max),
                tol, s_max)
        except OrbitError:
            pass
    return _attempt(params, lambda: _scan_bracket(params, tol, s_max),
                    tol, s_max)


def extend_full_period(orb):
    """Assemble [0, T] samples from the quarter by the two reflections.

    gamma(s) = -S gamma(T/2 - s) fills (s0, 2*s0]; gamma(s) = S gamma(T-s)
    fills (2*s0, T].  Physical time extends by the same reflections since
    dt/ds is invariant under both sign maps.
    """
    q = orb.quarter
    s_q, z_q, t_q = q.s, q.states, q.t
    t_half = 2.0 * t_q[-1]

    s_list = [s_q]
    z_list = [z_q]
    t_list = [t_q]

    # (s0, 2 s0]: reversed quarter, reflected by -S.
    s_list.append(2.0 * orb.s0 - s_q[-2::-1])
    z_list.append(-(z_q[-2::-1] @ S.T))
    t_list.append(2.0 * t_q[-1] - t_q[-2::-1])

    s_half = np.concatenate(s_list)
    z_half = np.vstack(z_list)
    t_half_arr = np.concatenate(t_list)

    # (2 s0, T]: reversed half, reflected by S.
    s_full = np.concatenate([s_half, 4.0 * orb.s0 - s_half[-2::-1]])
    z_full = np.vstack([z_half, z_half[-2::-1] @ S.T])
    t_full = np.concatenate([t_half_arr, 2.0 * t_half - t_half_arr[-2::-1]])

    g0 = gamma(z_full[0], orb.params)
    gd = max(abs(gamma(z, orb.params) - g0) for z in z_full)
    return Trajectory(params=orb.params, s=s_full, states=z_full, t=t_full,
                      sol=None, gamma_drift=gd, a2_drift=q.a2_drift,
                      n_steps=len(s_full) - 1)
