import numpy as np
import pytest

from broucke.dynamics import MassParams
from broucke.orbit import find_orbit
from broucke.stability import analyze_orbit


def potential_sqrt_args(z, params):
    """The two square-root arguments of the potential at phase point z."""
    Q1, Q2, Q3, Q4 = z[:4]
    mu = params.mu
    R = Q1 * Q1 + Q2 * Q2
    Qb = (Q1 * Q1 - Q2 * Q2) * Q3 + 2.0 * Q1 * Q2 * Q4
    base = 0.25 * R * R + mu * mu * (Q3 * Q3 + Q4 * Q4)
    return base + mu * Qb, base - mu * Qb


def nonsingular_states(rng, params, n, span=1.5, margin=0.02):
    """Random states bounded away from the unregularized collisions.

    The margin keeps higher derivatives of the potential O(1)-bounded so
    the finite-difference oracles are meaningful at their stated steps.
    """
    out = []
    while len(out) < n:
        z = rng.uniform(-span, span, 8)
        dp, dm = potential_sqrt_args(z, params)
        if min(dp, dm) < margin:
            continue
        out.append(z)
    return out


@pytest.fixture(scope="session")
def orbit_m1():
    """Converged orbit at the equal-mass point m1 = m2 = 1."""
    return find_orbit(MassParams(m1=1.0))


@pytest.fixture(scope="session")
def analysis_m1(orbit_m1):
    """(MonodromyData, StructureResiduals, StabilityRecord) at m1 = 1."""
    return analyze_orbit(orbit_m1)


@pytest.fixture(scope="session")
def orbit_065():
    """Converged orbit inside the 4DF stability window."""
    return find_orbit(MassParams(m1=0.65))


@pytest.fixture(scope="session")
def analysis_065(orbit_065):
    return analyze_orbit(orbit_065)


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
