"""Regularized phase space for the isosceles three-body configuration.

Two bodies of mass m1 collide repeatedly on one axis while a third body
of mass m2 = 3 - 2*m1 oscillates along it.  After a Levi-Civita change
of variables and a time rescaling dt/ds = Q1^2 + Q2^2, the binary
collision of the equal masses becomes a regular point of the flow.  This
module defines the mass parametrization, the regularized Hamiltonian
with exact first and second derivatives, the conserved angular momentum,
the invariant 2-degrees-of-freedom subspace, and the constant structure
matrices used by the stability analysis.
"""

from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .errors import SingularConfigurationError  # noqa: F401  (re-export)

__all__ = [
    "MassParams", "RegState", "StructureMatrices",
    "S", "J", "LAMBDA", "Y0", "STRUCTURE",
    "gamma", "gamma_grad", "gamma_hess", "vector_field",
    "angular_momentum", "in_invariant_set",
    "AXIAL_INDICES", "pattern_mask_4", "pattern_mask_8",
]


@dataclass(frozen=True)
class MassParams:
    """Masses (m1, m1, m2) with 2*m1 + m2 = 3, plus the energy level.

    m2 and the coupling mu = 1/2 + m1/m2 are derived, never stored, so
    the constraint holds exactly for any m1 in (0, 1.5).
    """

    m1: float
    E: float = -1.0

    def __post_init__(self):
        if not 0.0 < self.m1 < 1.5:
            raise ValueError(f"m1 must lie in (0, 1.5), got {self.m1}")

    @property
    def m2(self):
        return 3.0 - 2.0 * self.m1

    @property
    def mu(self):
        return 0.5 + self.m1 / self.m2


@dataclass
class RegState:
    """Regularized phase point (Q, P) with fictitious and physical time."""

    Q: np.ndarray
    P: np.ndarray
    s: float = 0.0
    t: float = 0.0

    def __post_init__(self):
        self.Q = np.asarray(self.Q, dtype=float)
        self.P = np.asarray(self.P, dtype=float)
        if self.Q.shape != (4,) or self.P.shape != (4,):
            raise ValueError("Q and P must be 4-vectors")

    @classmethod
    def from_vector(cls, z, s=0.0, t=0.0):
        z = np.asarray(z, dtype=float)
        return cls(Q=z[:4].copy(), P=z[4:8].copy(), s=s, t=t)

    @property
    def z(self):
        """Flat 8-vector (Q1..Q4, P1..P4)."""
        return np.concatenate([self.Q, self.P])


def _phase(state):
    """Accept a RegState or any 8-vector-like and return a flat array."""
    if isinstance(state, RegState):
        return state.z
    z = np.asarray(state, dtype=float)
    if z.shape != (8,):
        raise ValueError(f"expected an 8-component phase point, got {z.shape}")
    return z


# --------------------------------------------------------------------------
# Constant structure matrices.
#
# S is the time-reversing reflection generating (with -S) the Klein-four
# symmetry group of the Hamiltonian; J is the standard symplectic form;
# LAMBDA = blockdiag(-I, I) = -Y0^{-1} S Y0 for the specific orthogonal
# symplectic frame Y0 below.  Indices (1, 4, 5, 8) span the invariant
# subspace Q2 = Q3 = P2 = P3 = 0, indices (2, 3, 6, 7) its symplectic
# complement; all four matrices respect that splitting.
# --------------------------------------------------------------------------

S = np.diag([-1.0, 1.0, -1.0, 1.0, 1.0, -1.0, 1.0, -1.0])

J = np.zeros((8, 8))
J[:4, 4:] = np.eye(4)
J[4:, :4] = -np.eye(4)

LAMBDA = np.diag([-1.0, -1.0, -1.0, -1.0, 1.0, 1.0, 1.0, 1.0])

Y0 = np.zeros((8, 8))
Y0[0, 4] = 1.0
Y0[1, 2] = 1.0
Y0[2, 5] = 1.0
Y0[3, 3] = 1.0
Y0[4, 0] = -1.0
Y0[5, 6] = 1.0
Y0[6, 1] = -1.0
Y0[7, 7] = 1.0

# 0-based coordinate indices spanning the invariant subspace.
AXIAL_INDICES = (0, 3, 4, 7)


@dataclass(frozen=True)
class StructureMatrices:
    S: np.ndarray = field(default_factory=lambda: S.copy())
    Lambda: np.ndarray = field(default_factory=lambda: LAMBDA.copy())
    J: np.ndarray = field(default_factory=lambda: J.copy())
    Y0: np.ndarray = field(default_factory=lambda: Y0.copy())


STRUCTURE = StructureMatrices()


def pattern_mask_4():
    """Boolean 4x4 mask of the structurally-allowed entries.

    Allowed positions couple index groups {1,4} and {2,3} only to
    themselves; the eight cross positions are structural zeros.
    """
    axial = np.array([True, False, False, True])
    return axial[:, None] == axial[None, :]


def pattern_mask_8():
    """Boolean 8x8 mask: each 4x4 block carries the 4x4 pattern."""
    m4 = pattern_mask_4()
    return np.tile(m4, (2, 2))


# --------------------------------------------------------------------------
# Hamiltonian, derivatives, conserved quantities.
# --------------------------------------------------------------------------

def gamma(state, params):
    """Regularized Hamiltonian Gamma = (dt/ds) * (H2 - E).

    Finite even at Q1 = Q2 = 0 (the regularized binary collision);
    raises SingularConfigurationError at the other collisions.
    """
    return _backend.gamma(_phase(state), params.m1, params.m2,
                          params.mu, params.E)


def gamma_grad(state, params):
    """Exact gradient DGamma as an 8-vector (dQ, dP)."""
    return _backend.grad(_phase(state), params.m1, params.m2,
                         params.mu, params.E)


def gamma_hess(state, params):
    """Exact symmetric Hessian D2Gamma as an 8x8 array."""
    return _backend.hess(_phase(state), params.m1, params.m2,
                         params.mu, params.E)


def vector_field(state, params):
    """Equations of motion z' = J DGamma(z)."""
    dg = gamma_grad(state, params)
    out = np.empty(8)
    out[:4] = dg[4:]
    out[4:] = -dg[:4]
    return out


def angular_momentum(state, params):
    """Rotation invariant of the regularized flow.

    This is the momentum map of the SO(2) symmetry of Gamma (simultaneous
    rotation of the (Q1,Q2) pair at half rate and the (Q3,Q4) pair at unit
    rate), and it is exactly conserved along the flow.  The total angular
    momentum of the underlying three bodies, which carries an extra factor
    2*mu on the second term, is *not* an invariant of the reduced chart;
    see transforms.a2_total.
    """
    z = _phase(state)
    return (0.5 * (z[0] * z[5] - z[1] * z[4])
            + (z[2] * z[7] - z[3] * z[6]))


def in_invariant_set(state, tol):
    """True iff the point lies within ``tol`` of Q2 = Q3 = P2 = P3 = 0."""
    if tol < 0:
        raise ValueError("tol must be >= 0")
    z = _phase(state)
    return bool(max(abs(z[1]), abs(z[2]), abs(z[5]), abs(z[6])) <= tol)
