"""Invariant suite for a single mass: every runtime-checkable residual.

Backs the ``verify`` CLI subcommand.  Each check carries its tolerance;
the suite fails if any residual breaches it.
"""

from dataclasses import dataclass

import numpy as np

from .dynamics import MassParams, Y0, pattern_mask_8
from .integrate import flow
from .orbit import extend_full_period, find_orbit
from .stability import (analyze_orbit, monodromy_oracle, multiplier_pair,
                        spectral_distance)


@dataclass
class Check:
    name: str
    value: float
    tol: float

    @property
    def ok(self):
        return self.value < self.tol

    def line(self):
        mark = "ok " if self.ok else "FAIL"
        return f"[{mark}] {self.name:<46} {self.value:.3e} < {self.tol:.0e}"


def run_verification(m1, E=-1.0, tol=1e-12, guess=None):
    """Solve the orbit at m1 and evaluate the full residual suite.

    Returns (checks, record); checks is a list of Check entries covering
    conservation, symmetry, frame structure, the reduced-matrix identities
    and the full-period oracle.
    """
    params = MassParams(m1=m1, E=E)
    orb = find_orbit(params, guess=guess, tol=tol)
    md, res, record = analyze_orbit(orb, tol=tol)

    checks = [
        Check("shooting residual |P1(s0)|", abs(orb.residual), 1e-10),
        Check("energy drift over quarter orbit", orb.gamma_drift, 1e-10),
        Check("momentum drift over quarter orbit", orb.a2_drift, 1e-10),
        Check("frame symplecticity residual",
              md.frame.symplectic_residual, 1e-8),
    ]

    # Invariant-subspace leakage along the quarter orbit.
    leak = float(np.max(np.abs(orb.quarter.states[:, [1, 2, 5, 6]])))
    checks.append(Check("invariant-subspace leakage", leak, 1e-9))

    # Frame zero-pattern preservation (block structure of the frame).
    mask = pattern_mask_8()
    pat = max(float(np.max(np.abs(Y[~mask]))) for Y in md.frame.frames)
    checks.append(Check("frame block-pattern leakage", pat, 1e-9))

    # Periodicity of the symmetry-extended orbit under direct integration.
    full = flow(orb.initial(), params, (0.0, orb.T), tol=tol)
    per = float(np.max(np.abs(full.states[-1] - full.states[0])))
    checks.append(Check("periodicity ||z(T) - z(0)||", per, 1e-9))
    checks.append(Check("energy drift over full period",
                        full.gamma_drift, 1e-10))
    checks.append(Check("momentum drift over full period",
                        full.a2_drift, 1e-10))

    # Compare the symmetry-extended samples against dense direct values.
    ext = extend_full_period(orb)
    err = 0.0
    for i in range(0, len(ext.s), max(1, len(ext.s) // 32)):
        err = max(err, float(np.max(np.abs(
            full.sol(ext.s[i])[:8] - ext.states[i]))))
    checks.append(Check("symmetry extension vs direct integration",
                        err, 1e-8))

    for name, value, tolerance in [
        ("k11 + 1", res.k11_plus_one, 1e-6),
        ("K first column", res.first_col, 1e-6),
        ("K sparsity pattern", res.sparsity, 1e-8),
        ("momentum eigenvector relation (i)", res.rel_i, 1e-6),
        ("momentum eigenvector relation (ii)", res.rel_ii, 1e-6),
        ("left eigenvector equation", res.left_vec, 1e-6),
        ("(W + W^-1)/2 block structure", res.wk_block, 1e-8),
        ("W symplecticity", res.w_symplectic, 1e-8),
        ("eig2 trace/determinant consistency", res.eig2_det, 1e-6),
    ]:
        checks.append(Check(name, value, tolerance))

    # Full-period oracle: direct monodromy spectrum vs the factorization.
    eigs_direct, frame_full = monodromy_oracle(orb, tol=tol)
    fact = np.array([1.0, 1.0, 1.0, 1.0,
                     *multiplier_pair(md.e), *multiplier_pair(md.eig2)],
                    dtype=complex)
    checks.append(Check("monodromy spectrum vs factorization",
                        spectral_distance(eigs_direct, fact), 1e-4))
    Mdir = Y0.T @ frame_full.Y_end
    W2 = md.W @ md.W
    rel = float(np.max(np.abs(Mdir - W2)) / max(1.0, np.max(np.abs(Mdir))))
    checks.append(Check("monodromy matrix vs W^2 (relative)", rel, 1e-8))

    return checks, record
