"""Coordinate chain: Cartesian (q,p) <-> relative (u,v) <-> regularized (Q,P).

The production flow never leaves (Q,P); the Cartesian and relative charts
plus their Hamiltonians H0/H1 exist for cross-validation, reconstruction
of the third body, and the test suite's consistency oracles.

Both changes of variables come from generating functions, so they are
canonical; the 2:1 Levi-Civita square on (Q1,Q2) is resolved by a branch
choice (principal: Q1 >= 0, and Q2 >= 0 when Q1 = 0).
"""

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import RegState, gamma
from .errors import SingularConfigurationError


@dataclass
class CartesianState:
    """Planar positions/momenta of all three bodies, (q1..q6, p1..p6).

    Bodies 1 and 2 carry mass m1, body 3 carries m2.  Center of mass at
    the origin and zero net momentum are invariants of the construction.
    """

    q: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        self.q = np.asarray(self.q, dtype=float)
        self.p = np.asarray(self.p, dtype=float)
        if self.q.shape != (6,) or self.p.shape != (6,):
            raise ValueError("q and p must be 6-vectors")


@dataclass
class RelativeState:
    """Symmetry-adapted relative chart (u, v)."""

    u: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        self.u = np.asarray(self.u, dtype=float)
        self.v = np.asarray(self.v, dtype=float)
        if self.u.shape != (4,) or self.v.shape != (4,):
            raise ValueError("u and v must be 4-vectors")


def cart_to_rel(c):
    """First canonical transformation, (q,p) -> (u,v)."""
    q, p = c.q, c.p
    u = np.array([q[0] - q[2], q[1] - q[3], q[0] + q[2], q[1] + q[3]])
    v = np.array([(p[0] - p[2]) / 2.0, (p[1] - p[3]) / 2.0,
                  (p[0] + p[2]) / 2.0, (p[1] + p[3]) / 2.0])
    return RelativeState(u=u, v=v)


def rel_to_cart(r, params):
    """Inverse of cart_to_rel, reconstructing the third body.

    The third body's coordinates follow from the center-of-mass and
    net-momentum relations, so the output satisfies the CartesianState
    invariants by construction.
    """
    u, v = r.u, r.v
    m1, m2 = params.m1, params.m2
    q = np.empty(6)
    p = np.empty(6)
    q[0] = (u[0] + u[2]) / 2.0
    q[1] = (u[1] + u[3]) / 2.0
    q[2] = (u[2] - u[0]) / 2.0
    q[3] = (u[3] - u[1]) / 2.0
    q[4] = -m1 * (q[0] + q[2]) / m2
    q[5] = -m1 * (q[1] + q[3]) / m2
    p[0] = v[0] + v[2]
    p[1] = v[1] + v[3]
    p[2] = v[2] - v[0]
    p[3] = v[3] - v[1]
    p[4] = -(p[0] + p[2])
    p[5] = -(p[1] + p[3])
    return CartesianState(q=q, p=p)


def reg_to_rel(state):
    """Levi-Civita unsquaring, (Q,P) -> (u,v).

    The momenta are undefined at the regularized collision Q1 = Q2 = 0,
    which raises SingularConfigurationError (this chart cannot represent
    the collision; the regularized chart can).
    """
    z = state.z if isinstance(state, RegState) else np.asarray(state, float)
    Q1, Q2, Q3, Q4, P1, P2, P3, P4 = z
    R = Q1 * Q1 + Q2 * Q2
    if R == 0.0:
        raise SingularConfigurationError(
            "momenta of the relative chart are undefined at Q1 = Q2 = 0")
    u = np.array([Q1 * Q1 - Q2 * Q2, 2.0 * Q1 * Q2, Q3, Q4])
    v = np.array([(Q1 * P1 - Q2 * P2) / (2.0 * R),
                  (Q2 * P1 + Q1 * P2) / (2.0 * R), P3, P4])
    return RelativeState(u=u, v=v)


def rel_to_reg(r, branch=+1):
    """Levi-Civita squaring, (u,v) -> (Q,P), with branch selection.

    (Q1, Q2) is the complex square root of u1 + i*u2; ``branch=+1``
    selects the principal root (Q1 >= 0, and Q2 >= 0 if Q1 = 0),
    ``branch=-1`` its negative.  At u1 = u2 = 0 both roots coincide and
    the momenta (P1, P2) are set to zero; callers constructing collision
    states supply momenta directly in the regularized chart.
    """
    if branch not in (+1, -1):
        raise ValueError("branch must be +1 or -1")
    u, v = r.u, r.v
    w = complex(u[0], u[1])
    root = np.sqrt(w)
    if root.real < 0 or (root.real == 0 and root.imag < 0):
        root = -root
    Q1, Q2 = branch * root.real, branch * root.imag
    # Gradient of the generating function (P1 + i*P2 = 2(v1 + i*v2) *
    # conj(Q1 + i*Q2)); this is the unique momentum update inverting
    # reg_to_rel and making the map canonical.
    P1 = 2.0 * v[0] * Q1 + 2.0 * v[1] * Q2
    P2 = 2.0 * v[1] * Q1 - 2.0 * v[0] * Q2
    return RegState(Q=[Q1, Q2, u[2], u[3]], P=[P1, P2, v[2], v[3]])


# --------------------------------------------------------------------------
# Hamiltonians and angular momenta at each level (test oracles).
# --------------------------------------------------------------------------

def _safe_inv_norm(x, y):
    r = math.hypot(x, y)
    if r < 1e-150:
        raise SingularConfigurationError("collision in unregularized chart")
    return 1.0 / r


def h0(c, params):
    """Hamiltonian in the Cartesian chart (third body eliminated)."""
    q, p = c.q, c.p
    m1, m2 = params.m1, params.m2
    kin = 0.5 * ((p[0] ** 2 + p[1] ** 2 + p[2] ** 2 + p[3] ** 2) / m1
                 + ((p[0] + p[2]) ** 2 + (p[1] + p[3]) ** 2) / m2)
    w1 = m1 * (q[0] + q[2]) / m2
    w2 = m1 * (q[1] + q[3]) / m2
    pot = (m1 * m1 * _safe_inv_norm(q[0] - q[2], q[1] - q[3])
           + m1 * m2 * _safe_inv_norm(q[0] + w1, q[1] + w2)
           + m1 * m2 * _safe_inv_norm(q[2] + w1, q[3] + w2))
    return kin - pot


def h1(r, params):
    """Hamiltonian in the relative chart."""
    u, v = r.u, r.v
    m1, m2, mu = params.m1, params.m2, params.mu
    kin = ((v[0] ** 2 + v[1] ** 2 + v[2] ** 2 + v[3] ** 2) / m1
           + 2.0 * (v[2] ** 2 + v[3] ** 2) / m2)
    pot = (m1 * m1 * _safe_inv_norm(u[0], u[1])
           + m1 * m2 * _safe_inv_norm(0.5 * u[0] + mu * u[2],
                                      0.5 * u[1] + mu * u[3])
           + m1 * m2 * _safe_inv_norm(mu * u[2] - 0.5 * u[0],
                                      mu * u[3] - 0.5 * u[1]))
    return kin - pot


def h2(state, params):
    """Hamiltonian in the regularized chart; requires Q1^2 + Q2^2 > 0.

    Related to the regularized Hamiltonian by
    Gamma = (Q1^2 + Q2^2) * (h2 - E).
    """
    z = state.z if isinstance(state, RegState) else np.asarray(state, float)
    R = z[0] * z[0] + z[1] * z[1]
    if R < 1e-300:
        raise SingularConfigurationError(
            "h2 is singular at the regularized collision; use gamma()")
    return gamma(z, params) / R + params.E


def a0(c):
    """Angular momentum of all three bodies in the Cartesian chart."""
    q, p = c.q, c.p
    return (q[0] * p[1] - q[1] * p[0] + q[2] * p[3] - q[3] * p[2]
            + q[4] * p[5] - q[5] * p[4])


def a1(r, params):
    """Total three-body angular momentum in the relative chart.

    Pointwise equal to a0 on corresponding states.  Note that this is the
    angular momentum of the physical configuration (third body included),
    not the rotation invariant of the reduced flow, which carries
    coefficient 1 instead of 2*mu (see dynamics.angular_momentum).
    """
    u, v = r.u, r.v
    return (u[0] * v[1] - u[1] * v[0]
            + 2.0 * params.mu * (u[2] * v[3] - u[3] * v[2]))


def a2_total(state, params):
    """Total three-body angular momentum in the regularized chart.

    Pointwise equal to a0/a1 on corresponding states; not conserved by
    the reduced flow (see a1).
    """
    z = state.z if isinstance(state, RegState) else np.asarray(state, float)
    return (0.5 * (z[0] * z[5] - z[1] * z[4])
            + 2.0 * params.mu * (z[2] * z[7] - z[3] * z[6]))
