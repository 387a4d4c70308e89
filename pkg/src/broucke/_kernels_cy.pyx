# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled evaluation kernels; twin of ``_kernels_py``.

Same layout and the same grouped evaluation of the square-root arguments
(the exact cancellation on the invariant subspace must be preserved, see
the pure-Python module docstring).
"""

from libc.math cimport sqrt

import numpy as np

from .errors import SingularConfigurationError

cdef double SINGULAR_FLOOR = 1e-30


cdef inline int _core(const double* z, double m1, double m2, double mu,
                      double E, double* R_out, double* g_out,
                      double* gi, double* Dpi, double* Dmi,
                      double* Ap_out, double* Am_out) except -1:
    # Shared gradient-level pieces; fills gi[4], Dpi[4], Dmi[4].
    cdef double Q1 = z[0], Q2 = z[1], Q3 = z[2], Q4 = z[3]
    cdef double P3 = z[6], P4 = z[7]
    cdef double R = Q1 * Q1 + Q2 * Q2
    cdef double Qb = (Q1 * Q1 - Q2 * Q2) * Q3 + 2.0 * Q1 * Q2 * Q4
    cdef double base = 0.25 * R * R + mu * mu * (Q3 * Q3 + Q4 * Q4)
    cdef double Dp = base + mu * Qb
    cdef double Dm = base - mu * Qb
    if Dp < SINGULAR_FLOOR or Dm < SINGULAR_FLOOR:
        raise SingularConfigurationError(
            "potential square-root argument <= 1e-30 "
            f"(Dp={Dp:.3e}, Dm={Dm:.3e}): unregularized collision")
    cdef double Ap = 1.0 / sqrt(Dp)
    cdef double Am = 1.0 / sqrt(Dm)
    cdef double Ap3 = Ap * Ap * Ap
    cdef double Am3 = Am * Am * Am
    cdef double kap = 1.0 / m1 + 2.0 / m2
    cdef double mm = m1 * m2
    cdef double half_mm = 0.5 * mm

    Dpi[0] = R * Q1 + mu * (2.0 * Q1 * Q3 + 2.0 * Q2 * Q4)
    Dpi[1] = R * Q2 + mu * (2.0 * Q1 * Q4 - 2.0 * Q2 * Q3)
    Dpi[2] = mu * (Q1 * Q1 - Q2 * Q2) + 2.0 * mu * mu * Q3
    Dpi[3] = 2.0 * mu * Q1 * Q2 + 2.0 * mu * mu * Q4
    Dmi[0] = R * Q1 - mu * (2.0 * Q1 * Q3 + 2.0 * Q2 * Q4)
    Dmi[1] = R * Q2 - mu * (2.0 * Q1 * Q4 - 2.0 * Q2 * Q3)
    Dmi[2] = -mu * (Q1 * Q1 - Q2 * Q2) + 2.0 * mu * mu * Q3
    Dmi[3] = -2.0 * mu * Q1 * Q2 + 2.0 * mu * mu * Q4

    cdef int i
    for i in range(4):
        gi[i] = half_mm * (Ap3 * Dpi[i] + Am3 * Dmi[i])

    R_out[0] = R
    g_out[0] = kap * (P3 * P3 + P4 * P4) - E - mm * (Ap + Am)
    Ap_out[0] = Ap
    Am_out[0] = Am
    return 0


cdef int _hess_fill(const double* z, double m1, double m2, double mu,
                    double E, double* H) except -1:
    # Fills H as a row-major 8x8 (64 doubles).
    cdef double R, g, Ap, Am
    cdef double gi[4]
    cdef double Dpi[4]
    cdef double Dmi[4]
    _core(z, m1, m2, mu, E, &R, &g, gi, Dpi, Dmi, &Ap, &Am)

    cdef double Q1 = z[0], Q2 = z[1], Q3 = z[2], Q4 = z[3]
    cdef double P3 = z[6], P4 = z[7]
    cdef double kap = 1.0 / m1 + 2.0 / m2
    cdef double mm = m1 * m2
    cdef double half_mm = 0.5 * mm
    cdef double Ap3 = Ap * Ap * Ap
    cdef double Am3 = Am * Am * Am
    cdef double Ap5 = Ap3 * Ap * Ap
    cdef double Am5 = Am3 * Am * Am
    cdef double mu2t = 2.0 * mu * mu

    cdef double Dpij[4][4]
    cdef double Dmij[4][4]
    Dpij[0][0] = 2.0 * Q1 * Q1 + R + 2.0 * mu * Q3
    Dpij[0][1] = 2.0 * Q1 * Q2 + 2.0 * mu * Q4
    Dpij[0][2] = 2.0 * mu * Q1
    Dpij[0][3] = 2.0 * mu * Q2
    Dpij[1][1] = 2.0 * Q2 * Q2 + R - 2.0 * mu * Q3
    Dpij[1][2] = -2.0 * mu * Q2
    Dpij[1][3] = 2.0 * mu * Q1
    Dpij[2][2] = mu2t
    Dpij[2][3] = 0.0
    Dpij[3][3] = mu2t
    Dmij[0][0] = 2.0 * Q1 * Q1 + R - 2.0 * mu * Q3
    Dmij[0][1] = 2.0 * Q1 * Q2 - 2.0 * mu * Q4
    Dmij[0][2] = -2.0 * mu * Q1
    Dmij[0][3] = -2.0 * mu * Q2
    Dmij[1][1] = 2.0 * Q2 * Q2 + R + 2.0 * mu * Q3
    Dmij[1][2] = 2.0 * mu * Q2
    Dmij[1][3] = -2.0 * mu * Q1
    Dmij[2][2] = mu2t
    Dmij[2][3] = 0.0
    Dmij[3][3] = mu2t

    cdef int i, j
    cdef double gij
    cdef double Ri[4]
    Ri[0] = 2.0 * Q1
    Ri[1] = 2.0 * Q2
    Ri[2] = 0.0
    Ri[3] = 0.0

    for i in range(64):
        H[i] = 0.0

    for i in range(4):
        for j in range(i, 4):
            gij = half_mm * (-1.5 * Ap5 * Dpi[i] * Dpi[j] + Ap3 * Dpij[i][j]
                             - 1.5 * Am5 * Dmi[i] * Dmi[j] + Am3 * Dmij[i][j])
            H[8 * i + j] = Ri[i] * gi[j] + Ri[j] * gi[i] + R * gij
            if i == j and i < 2:
                H[8 * i + j] += 2.0 * g

    cdef double fourk = 4.0 * kap
    H[0 * 8 + 6] = fourk * Q1 * P3
    H[0 * 8 + 7] = fourk * Q1 * P4
    H[1 * 8 + 6] = fourk * Q2 * P3
    H[1 * 8 + 7] = fourk * Q2 * P4

    H[4 * 8 + 4] = 0.5 / m1
    H[5 * 8 + 5] = 0.5 / m1
    H[6 * 8 + 6] = 2.0 * kap * R
    H[7 * 8 + 7] = 2.0 * kap * R

    # Mirror the strict upper triangle.
    for i in range(8):
        for j in range(i + 1, 8):
            H[8 * j + i] = H[8 * i + j]
    return 0


def gamma(double[::1] z, double m1, double m2, double mu, double E):
    """Value of the regularized Hamiltonian at phase point ``z``."""
    cdef double Q1 = z[0], Q2 = z[1], Q3 = z[2], Q4 = z[3]
    cdef double P1 = z[4], P2 = z[5], P3 = z[6], P4 = z[7]
    cdef double R = Q1 * Q1 + Q2 * Q2
    cdef double Qb = (Q1 * Q1 - Q2 * Q2) * Q3 + 2.0 * Q1 * Q2 * Q4
    cdef double base = 0.25 * R * R + mu * mu * (Q3 * Q3 + Q4 * Q4)
    cdef double Dp = base + mu * Qb
    cdef double Dm = base - mu * Qb
    if Dp < SINGULAR_FLOOR or Dm < SINGULAR_FLOOR:
        raise SingularConfigurationError(
            "potential square-root argument <= 1e-30 "
            f"(Dp={Dp:.3e}, Dm={Dm:.3e}): unregularized collision")
    cdef double kap = 1.0 / m1 + 2.0 / m2
    cdef double mm = m1 * m2
    return ((P1 * P1 + P2 * P2) / (4.0 * m1)
            + kap * R * (P3 * P3 + P4 * P4)
            - mm * R * (1.0 / sqrt(Dp) + 1.0 / sqrt(Dm))
            - m1 * m1 - E * R)


def grad(double[::1] z, double m1, double m2, double mu, double E):
    """Exact gradient of Gamma, ordered (dQ1..dQ4, dP1..dP4)."""
    cdef double R, g, Ap, Am
    cdef double gi[4]
    cdef double Dpi[4]
    cdef double Dmi[4]
    _core(&z[0], m1, m2, mu, E, &R, &g, gi, Dpi, Dmi, &Ap, &Am)
    cdef double kap = 1.0 / m1 + 2.0 / m2
    out = np.empty(8)
    cdef double[::1] o = out
    o[0] = 2.0 * z[0] * g + R * gi[0]
    o[1] = 2.0 * z[1] * g + R * gi[1]
    o[2] = R * gi[2]
    o[3] = R * gi[3]
    o[4] = z[4] / (2.0 * m1)
    o[5] = z[5] / (2.0 * m1)
    o[6] = 2.0 * kap * R * z[6]
    o[7] = 2.0 * kap * R * z[7]
    return out


def hess(double[::1] z, double m1, double m2, double mu, double E):
    """Exact symmetric Hessian of Gamma as an 8x8 array."""
    out = np.empty((8, 8))
    cdef double[:, ::1] o = out
    _hess_fill(&z[0], m1, m2, mu, E, &o[0, 0])
    return out


def rhs_flow(double[::1] y, double m1, double m2, double mu, double E):
    """Right-hand side of the 9-dim system (z' = J dGamma, t' = Q1^2+Q2^2)."""
    cdef double R, g, Ap, Am
    cdef double gi[4]
    cdef double Dpi[4]
    cdef double Dmi[4]
    _core(&y[0], m1, m2, mu, E, &R, &g, gi, Dpi, Dmi, &Ap, &Am)
    cdef double kap = 1.0 / m1 + 2.0 / m2
    out = np.empty(9)
    cdef double[::1] o = out
    o[0] = y[4] / (2.0 * m1)
    o[1] = y[5] / (2.0 * m1)
    o[2] = 2.0 * kap * R * y[6]
    o[3] = 2.0 * kap * R * y[7]
    o[4] = -(2.0 * y[0] * g + R * gi[0])
    o[5] = -(2.0 * y[1] * g + R * gi[1])
    o[6] = -R * gi[2]
    o[7] = -R * gi[3]
    o[8] = R
    return out


def rhs_frame(double[::1] y, double m1, double m2, double mu, double E):
    """Right-hand side of the coupled 73-dim flow + variational system."""
    cdef double R, g, Ap, Am
    cdef double gi[4]
    cdef double Dpi[4]
    cdef double Dmi[4]
    _core(&y[0], m1, m2, mu, E, &R, &g, gi, Dpi, Dmi, &Ap, &Am)
    cdef double kap = 1.0 / m1 + 2.0 / m2

    out = np.empty(73)
    cdef double[::1] o = out
    o[0] = y[4] / (2.0 * m1)
    o[1] = y[5] / (2.0 * m1)
    o[2] = 2.0 * kap * R * y[6]
    o[3] = 2.0 * kap * R * y[7]
    o[4] = -(2.0 * y[0] * g + R * gi[0])
    o[5] = -(2.0 * y[1] * g + R * gi[1])
    o[6] = -R * gi[2]
    o[7] = -R * gi[3]
    o[8] = R

    cdef double H[64]
    _hess_fill(&y[0], m1, m2, mu, E, H)

    # dY = (J H) Y with JH rows 0..3 = H rows 4..7, rows 4..7 = -H rows 0..3.
    cdef int i, j, k
    cdef double acc
    cdef const double* Y = &y[9]
    for i in range(4):
        for j in range(8):
            acc = 0.0
            for k in range(8):
                acc += H[8 * (i + 4) + k] * Y[8 * k + j]
            o[9 + 8 * i + j] = acc
    for i in range(4):
        for j in range(8):
            acc = 0.0
            for k in range(8):
                acc += H[8 * i + k] * Y[8 * k + j]
            o[9 + 8 * (i + 4) + j] = -acc
    return out
