"""Pure-Python (numpy) evaluation kernels for the regularized system.

These are the hot functions of the whole package: the value, gradient and
Hessian of the regularized Hamiltonian, and the right-hand sides of the
flow and the coupled flow+frame variational system.  A compiled Cython
twin with identical signatures lives in ``_kernels_cy``; ``_backend``
picks whichever is importable.

Phase-space layout is ``z = (Q1, Q2, Q3, Q4, P1, P2, P3, P4)``.  The flow
state appends physical time, ``y = (z, t)`` (9 components); the frame
state appends the 8x8 variational matrix row-major, ``y = (z, t, Y.ravel())``
(73 components).

The two square-root arguments of the potential are evaluated in the
grouped form ``base +/- mu*Qb`` with ``base = R^2/4 + mu^2*(Q3^2+Q4^2)``.
On the invariant subspace Q2 = Q3 = P2 = P3 = 0 the cross term Qb is an
exact floating-point zero, so both arguments are bitwise equal and the
subspace is preserved by the numerical flow exactly, not just to
truncation error.  Do not "simplify" the algebra here.
"""

import math

import numpy as np

from .errors import SingularConfigurationError

# Square-root arguments below this are treated as a (non-regularizable)
# collision rather than letting NaNs propagate.
SINGULAR_FLOOR = 1e-30


def _potential_terms(z, m1, m2, mu):
    """Common factors of Gamma and its derivatives.

    Returns (R, Qb, Dp, Dm) and raises SingularConfigurationError when
    either square-root argument falls below SINGULAR_FLOOR.
    """
    Q1, Q2, Q3, Q4 = z[0], z[1], z[2], z[3]
    R = Q1 * Q1 + Q2 * Q2
    Qb = (Q1 * Q1 - Q2 * Q2) * Q3 + 2.0 * Q1 * Q2 * Q4
    base = 0.25 * R * R + mu * mu * (Q3 * Q3 + Q4 * Q4)
    Dp = base + mu * Qb
    Dm = base - mu * Qb
    if Dp < SINGULAR_FLOOR or Dm < SINGULAR_FLOOR:
        raise SingularConfigurationError(
            f"potential square-root argument <= {SINGULAR_FLOOR:g} "
            f"(Dp={Dp:.3e}, Dm={Dm:.3e}): unregularized collision"
        )
    return R, Qb, Dp, Dm


def gamma(z, m1, m2, mu, E):
    """Value of the regularized Hamiltonian at phase point ``z``."""
    P1, P2, P3, P4 = z[4], z[5], z[6], z[7]
    R, _, Dp, Dm = _potential_terms(z, m1, m2, mu)
    kap = 1.0 / m1 + 2.0 / m2
    mm = m1 * m2
    return (
        (P1 * P1 + P2 * P2) / (4.0 * m1)
        + kap * R * (P3 * P3 + P4 * P4)
        - mm * R * (1.0 / math.sqrt(Dp) + 1.0 / math.sqrt(Dm))
        - m1 * m1
        - E * R
    )


def _grad_parts(z, m1, m2, mu, E):
    """Gradient pieces reused by grad() and hess().

    Returns (R, g, g1..g4, Dp_i, Dm_i, Ap, Am, Ap3, Am3, kap, mm).
    """
    Q1, Q2, Q3, Q4 = z[0], z[1], z[2], z[3]
    P3, P4 = z[6], z[7]
    R, _, Dp, Dm = _potential_terms(z, m1, m2, mu)
    kap = 1.0 / m1 + 2.0 / m2
    mm = m1 * m2

    Ap = 1.0 / math.sqrt(Dp)
    Am = 1.0 / math.sqrt(Dm)
    Ap3 = Ap * Ap * Ap
    Am3 = Am * Am * Am

    g = kap * (P3 * P3 + P4 * P4) - E - mm * (Ap + Am)

    # First derivatives of the square-root arguments.
    Dp1 = R * Q1 + mu * (2.0 * Q1 * Q3 + 2.0 * Q2 * Q4)
    Dp2 = R * Q2 + mu * (2.0 * Q1 * Q4 - 2.0 * Q2 * Q3)
    Dp3 = mu * (Q1 * Q1 - Q2 * Q2) + 2.0 * mu * mu * Q3
    Dp4 = 2.0 * mu * Q1 * Q2 + 2.0 * mu * mu * Q4
    Dm1 = R * Q1 - mu * (2.0 * Q1 * Q3 + 2.0 * Q2 * Q4)
    Dm2 = R * Q2 - mu * (2.0 * Q1 * Q4 - 2.0 * Q2 * Q3)
    Dm3 = -mu * (Q1 * Q1 - Q2 * Q2) + 2.0 * mu * mu * Q3
    Dm4 = -2.0 * mu * Q1 * Q2 + 2.0 * mu * mu * Q4

    half_mm = 0.5 * mm
    g1 = half_mm * (Ap3 * Dp1 + Am3 * Dm1)
    g2 = half_mm * (Ap3 * Dp2 + Am3 * Dm2)
    g3 = half_mm * (Ap3 * Dp3 + Am3 * Dm3)
    g4 = half_mm * (Ap3 * Dp4 + Am3 * Dm4)

    return (R, g, (g1, g2, g3, g4), (Dp1, Dp2, Dp3, Dp4),
            (Dm1, Dm2, Dm3, Dm4), Ap, Am, Ap3, Am3, kap, mm)


def grad(z, m1, m2, mu, E):
    """Exact gradient of Gamma, ordered (dQ1..dQ4, dP1..dP4)."""
    Q1, Q2 = z[0], z[1]
    P1, P2, P3, P4 = z[4], z[5], z[6], z[7]
    R, g, (g1, g2, g3, g4), _, _, _, _, _, _, kap, _ = _grad_parts(
        z, m1, m2, mu, E)
    out = np.empty(8)
    out[0] = 2.0 * Q1 * g + R * g1
    out[1] = 2.0 * Q2 * g + R * g2
    out[2] = R * g3
    out[3] = R * g4
    out[4] = P1 / (2.0 * m1)
    out[5] = P2 / (2.0 * m1)
    out[6] = 2.0 * kap * R * P3
    out[7] = 2.0 * kap * R * P4
    return out


def hess(z, m1, m2, mu, E):
    """Exact symmetric Hessian of Gamma as an 8x8 array."""
    Q1, Q2 = z[0], z[1]
    P3, P4 = z[6], z[7]
    (R, g, (g1, g2, g3, g4), (Dp1, Dp2, Dp3, Dp4), (Dm1, Dm2, Dm3, Dm4),
     Ap, Am, Ap3, Am3, kap, mm) = _grad_parts(z, m1, m2, mu, E)

    Ap5 = Ap3 * Ap * Ap
    Am5 = Am3 * Am * Am

    # Second derivatives of the square-root arguments (D+ / D-).
    mu2t = 2.0 * mu * mu
    Dp11 = 2.0 * Q1 * Q1 + R + 2.0 * mu * z[2]
    Dp12 = 2.0 * Q1 * Q2 + 2.0 * mu * z[3]
    Dp13 = 2.0 * mu * Q1
    Dp14 = 2.0 * mu * Q2
    Dp22 = 2.0 * Q2 * Q2 + R - 2.0 * mu * z[2]
    Dp23 = -2.0 * mu * Q2
    Dp24 = 2.0 * mu * Q1
    Dm11 = 2.0 * Q1 * Q1 + R - 2.0 * mu * z[2]
    Dm12 = 2.0 * Q1 * Q2 - 2.0 * mu * z[3]
    Dm13 = -2.0 * mu * Q1
    Dm14 = -2.0 * mu * Q2
    Dm22 = 2.0 * Q2 * Q2 + R + 2.0 * mu * z[2]
    Dm23 = 2.0 * mu * Q2
    Dm24 = -2.0 * mu * Q1

    half_mm = 0.5 * mm

    def gij(dpi, dpj, dpij, dmi, dmj, dmij):
        return half_mm * (-1.5 * Ap5 * dpi * dpj + Ap3 * dpij
                          - 1.5 * Am5 * dmi * dmj + Am3 * dmij)

    g11 = gij(Dp1, Dp1, Dp11, Dm1, Dm1, Dm11)
    g12 = gij(Dp1, Dp2, Dp12, Dm1, Dm2, Dm12)
    g13 = gij(Dp1, Dp3, Dp13, Dm1, Dm3, Dm13)
    g14 = gij(Dp1, Dp4, Dp14, Dm1, Dm4, Dm14)
    g22 = gij(Dp2, Dp2, Dp22, Dm2, Dm2, Dm22)
    g23 = gij(Dp2, Dp3, Dp23, Dm2, Dm3, Dm23)
    g24 = gij(Dp2, Dp4, Dp24, Dm2, Dm4, Dm24)
    g33 = gij(Dp3, Dp3, mu2t, Dm3, Dm3, mu2t)
    g34 = gij(Dp3, Dp4, 0.0, Dm3, Dm4, 0.0)
    g44 = gij(Dp4, Dp4, mu2t, Dm4, Dm4, mu2t)

    # Term order matches the compiled kernel so the two backends agree
    # bitwise, not just to rounding.
    H = np.zeros((8, 8))
    H[0, 0] = 2.0 * Q1 * g1 + 2.0 * Q1 * g1 + R * g11 + 2.0 * g
    H[0, 1] = 2.0 * Q1 * g2 + 2.0 * Q2 * g1 + R * g12
    H[0, 2] = 2.0 * Q1 * g3 + R * g13
    H[0, 3] = 2.0 * Q1 * g4 + R * g14
    H[1, 1] = 2.0 * Q2 * g2 + 2.0 * Q2 * g2 + R * g22 + 2.0 * g
    H[1, 2] = 2.0 * Q2 * g3 + R * g23
    H[1, 3] = 2.0 * Q2 * g4 + R * g24
    H[2, 2] = R * g33
    H[2, 3] = R * g34
    H[3, 3] = R * g44

    fourk = 4.0 * kap
    H[0, 6] = fourk * Q1 * P3
    H[0, 7] = fourk * Q1 * P4
    H[1, 6] = fourk * Q2 * P3
    H[1, 7] = fourk * Q2 * P4

    H[4, 4] = 0.5 / m1
    H[5, 5] = 0.5 / m1
    H[6, 6] = 2.0 * kap * R
    H[7, 7] = 2.0 * kap * R

    # Mirror the strict upper triangle.
    iu = np.triu_indices(8, 1)
    H[(iu[1], iu[0])] = H[iu]
    return H


def rhs_flow(y, m1, m2, mu, E):
    """Right-hand side of the 9-dim system (z' = J dGamma, t' = Q1^2+Q2^2)."""
    z = y[:8]
    Q1, Q2 = z[0], z[1]
    P1, P2, P3, P4 = z[4], z[5], z[6], z[7]
    R, g, (g1, g2, g3, g4), _, _, _, _, _, _, kap, _ = _grad_parts(
        z, m1, m2, mu, E)
    out = np.empty(9)
    out[0] = P1 / (2.0 * m1)
    out[1] = P2 / (2.0 * m1)
    out[2] = 2.0 * kap * R * P3
    out[3] = 2.0 * kap * R * P4
    out[4] = -(2.0 * Q1 * g + R * g1)
    out[5] = -(2.0 * Q2 * g + R * g2)
    out[6] = -R * g3
    out[7] = -R * g4
    out[8] = R
    return out


def rhs_frame(y, m1, m2, mu, E):
    """Right-hand side of the coupled 73-dim flow + variational system.

    y = (z, t, Y.ravel()) with Y' = J D2Gamma(z) Y evaluated at the
    concurrent phase point, so no interpolation error enters the frame.
    """
    out = np.empty(73)
    out[:9] = rhs_flow(y[:9], m1, m2, mu, E)
    H = hess(y[:8], m1, m2, mu, E)
    Y = y[9:].reshape(8, 8)
    # J * H: top 4 rows of JH are rows 4..7 of H, bottom are -rows 0..3.
    JH = np.empty((8, 8))
    JH[:4] = H[4:]
    JH[4:] = -H[:4]
    out[9:] = (JH @ Y).ravel()
    return out
