"""Reduced stability matrix: structural identities and classification."""

import numpy as np
import pytest

from broucke.dynamics import J, MassParams, S, Y0, pattern_mask_8, \
    vector_field
from broucke.integrate import flow_with_frame
from broucke.stability import (MonodromyData, central_block_eigenvalues,
                               classify, k_matrix, monodromy_oracle,
                               multiplier_pair, spectral_distance,
                               verify_structure, w_matrix,
                               w_squared_spectrum)


def test_quarter_frame_structure(analysis_m1, orbit_m1):
    md, _, _ = analysis_m1
    B = md.B
    X = B @ Y0.T
    assert np.max(np.abs(X.T @ J @ X - J)) < 1e-8
    assert np.max(np.abs(B[~pattern_mask_8()])) < 1e-8
    # Column 5 transports the orbit tangent: Y(s) e5 = gamma'(s)/sqrt(m1).
    tangent = vector_field(orbit_m1.quarter.states[-1], orbit_m1.params)
    assert np.allclose(B[:, 4], tangent / np.sqrt(orbit_m1.params.m1),
                       atol=1e-8)


def test_k_matrix_against_explicit_inverse(analysis_m1, analysis_065):
    for md, _, _ in (analysis_m1, analysis_065):
        W = md.W
        half = 0.5 * (W + np.linalg.inv(W))
        assert np.max(np.abs(md.K - half[4:, 4:])) < 1e-8
        assert np.max(np.abs(half[:4, :4] - md.K.T)) < 1e-8
        assert np.max(np.abs(half[:4, 4:])) < 1e-8
        assert np.max(np.abs(half[4:, :4])) < 1e-8


def test_w_from_quarter_equals_half_period_frame(orbit_m1, analysis_m1):
    md, _, _ = analysis_m1
    half = flow_with_frame(orbit_m1.initial(), Y0, orbit_m1.params,
                           (0.0, 2.0 * orbit_m1.s0), tol=1e-12)
    # Y(T/2) = S Y0 B^{-1} S B with the symplectic inverse of B.
    Binv = -J @ md.B.T @ J
    assert np.max(np.abs(half.Y_end - S @ Y0 @ Binv @ S @ md.B)) < 1e-7
    assert np.max(np.abs(md.W - Y0.T @ half.Y_end)) < 1e-7


def test_structure_residuals(analysis_m1):
    _, res, _ = analysis_m1
    assert res.k11_plus_one < 1e-6
    assert res.first_col < 1e-6
    assert res.sparsity < 1e-8
    assert res.rel_i < 1e-6
    assert res.rel_ii < 1e-6
    assert res.left_vec < 1e-6
    assert res.wk_block < 1e-8
    assert res.w_symplectic < 1e-8
    assert res.eig2_det < 1e-6


def test_structure_residuals_sensitive_to_faults(orbit_m1, analysis_m1):
    # A planted fault in B must be caught, otherwise the residuals are
    # vacuous.
    md, _, _ = analysis_m1
    B_bad = md.B.copy()
    B_bad[0, 4] += 1e-3
    md_bad = MonodromyData(B=B_bad, W=w_matrix(B_bad), K=k_matrix(B_bad),
                           L1=np.zeros((4, 4)), L2=np.zeros((4, 4)))
    res_bad = verify_structure(md_bad, orbit_m1)
    assert res_bad.max_residual > 1e-4


def test_momentum_gradient_frame_vector(orbit_m1):
    # grad A(gamma(0)) Y0 = (0, zeta4, -m1^{3/2}, 0, ...) exactly, for the
    # conserved rotation invariant A.
    z = orbit_m1.initial().z
    Q1, Q2, Q3, Q4, P1, P2, P3, P4 = z
    grad_a = np.array([0.5 * P2, -0.5 * P1, P4, -P3,
                       -0.5 * Q2, 0.5 * Q1, -Q4, Q3])
    w8 = grad_a @ Y0
    m32 = orbit_m1.params.m1 ** 1.5
    expected = np.zeros(8)
    expected[1] = orbit_m1.zeta4
    expected[2] = -m32
    assert np.array_equal(w8, expected)


def test_central_block_eigenvalues(analysis_m1):
    md, res, rec = analysis_m1
    lam_lo, lam_hi = central_block_eigenvalues(md)
    assert {round(lam_lo, 6), round(lam_hi, 6)} == \
        {round(-1.0, 6), round(rec.eig2, 6)}
    # Forced -1 eigenvalue makes the discriminant a perfect square, so the
    # closed-form roots are exactly real; eig2 also equals -det(block).
    a, b, c, d = md.abcd
    assert rec.eig2 == pytest.approx(-(a * d - b * c), abs=1e-6)


def test_k_eigenvalues_real_numerically(analysis_m1, analysis_065):
    # A general eigensolver on the central and corner 2x2 blocks must
    # agree that all K eigenvalues are real.
    for md, _, _ in (analysis_m1, analysis_065):
        K = md.K
        central = K[1:3, 1:3]
        corner = K[np.ix_([0, 3], [0, 3])]
        for block in (central, corner):
            eigs = np.linalg.eigvals(block)
            assert np.max(np.abs(eigs.imag)) < 1e-8


def test_k_eigenvalue_set(analysis_m1, analysis_065):
    for md, _, rec in (analysis_m1, analysis_065):
        eigs = np.sort(md.k_eigenvalues)
        ref = np.sort(np.linalg.eigvals(md.K).real)
        assert np.allclose(eigs, ref, atol=1e-8)
        # Two forced -1 eigenvalues plus e and eig2.
        assert np.sum(np.abs(md.k_eigenvalues + 1.0) < 1e-6) >= 2
        assert np.any(np.abs(md.k_eigenvalues - rec.e) < 1e-9)
        assert np.any(np.abs(md.k_eigenvalues - rec.eig2) < 1e-9)


def test_classification_flags(analysis_m1, analysis_065):
    _, _, rec1 = analysis_m1
    assert rec1.stable_2df and not rec1.spectral_4df and not rec1.linear_4df
    assert abs(rec1.e) < 1.0 and abs(rec1.eig2) > 1.0
    _, _, rec065 = analysis_065
    assert rec065.stable_2df and rec065.spectral_4df and rec065.linear_4df
    assert rec065.status == "ok"


def _fake_md(e, eig2, k11=-1.0):
    # Synthetic K whose central block has eigenvalues {-1, eig2}.
    K = np.array([[k11, 0.0, 0.0, 0.3],
                  [0.0, eig2, 1.0, 0.0],
                  [0.0, 0.0, -1.0, 0.0],
                  [0.0, 0.0, 0.0, e]])
    return MonodromyData(B=np.eye(8), W=np.eye(8), K=K,
                         L1=np.zeros((4, 4)), L2=np.zeros((4, 4)))


@pytest.mark.parametrize("e,eig2,expect_cause,expect_spectral", [
    (0.9, 0.9, "ad", True),          # same-angle collision at a crossing
    (0.9, -0.9, "d", True),          # supplementary-angle collision
    (0.9995, 0.2, "b", True),        # e against the trivial +1 pair
    (0.0004, 0.5, "c", True),        # e-pair squares to a double -1
    (0.9, 0.2, "", True),            # clean spectrally stable point
    (0.9, 1.7, "", False),           # 4DF unstable
])
def test_degeneracy_causes(e, eig2, expect_cause, expect_spectral):
    md = _fake_md(e, eig2)
    rec = classify(md, MassParams(m1=0.6))
    assert rec.spectral_4df == expect_spectral
    assert rec.degenerate_cause == expect_cause
    assert rec.linear_4df == (expect_spectral and not expect_cause)


def test_boundary_e_is_degenerate_not_stable():
    rec = classify(_fake_md(1.0 - 1e-12, 0.2), MassParams(m1=0.6))
    assert not rec.stable_2df
    assert "b" in rec.degenerate_cause


def test_unreliable_gate(orbit_m1, analysis_m1):
    md, _, _ = analysis_m1
    B_bad = md.B.copy()
    B_bad[0, 4] += 1e-2
    md_bad = MonodromyData(
        B=B_bad, W=w_matrix(B_bad), K=k_matrix(B_bad),
        L1=np.zeros((4, 4)), L2=np.zeros((4, 4)))
    res_bad = verify_structure(md_bad, orbit_m1)
    rec = classify(md_bad, orbit_m1.params, orb=orbit_m1, residuals=res_bad)
    assert rec.status == "unreliable"
    assert not rec.linear_4df


# ---------------------------------------------------------------------------
# full-period oracle
# ---------------------------------------------------------------------------

def test_monodromy_oracle_agreement(orbit_m1, analysis_m1):
    md, _, rec = analysis_m1
    eigs_direct, frame = monodromy_oracle(orbit_m1)
    fact = np.array([1.0, 1.0, 1.0, 1.0,
                     *multiplier_pair(rec.e), *multiplier_pair(rec.eig2)],
                    dtype=complex)
    assert spectral_distance(eigs_direct, fact) < 1e-4
    # Matrix-level identity (well-conditioned form of the equivalence).
    Mdir = Y0.T @ frame.Y_end
    W2 = md.W @ md.W
    rel = np.max(np.abs(Mdir - W2)) / max(1.0, np.max(np.abs(Mdir)))
    assert rel < 1e-8
    # Symplectic spectrum: unit determinant.
    assert np.prod(eigs_direct) == pytest.approx(1.0, abs=1e-6)


def test_multiplier_pairs_on_unit_circle(analysis_065):
    _, _, rec = analysis_065
    for lam in (rec.e, rec.eig2):
        assert abs(lam) <= 1.0
        for mult in multiplier_pair(lam):
            assert abs(abs(mult) - 1.0) < 1e-14


def test_w_squared_spectrum_matches_oracle(orbit_065, analysis_065):
    md, _, _ = analysis_065
    eigs_direct, _ = monodromy_oracle(orbit_065)
    # Raw-eigensolver comparison is limited by the defective trivial
    # quadruple at +1; see the acceptance suite for the sharp version.
    assert spectral_distance(eigs_direct, w_squared_spectrum(md)) < 1e-3


def test_flags_agree_with_direct_spectrum(orbit_m1, analysis_m1,
                                          orbit_065, analysis_065):
    # Spectral stability read off K must match unit-circle membership of
    # the directly integrated monodromy spectrum.
    for orb, (md, _, rec) in ((orbit_m1, analysis_m1),
                              (orbit_065, analysis_065)):
        eigs_direct, _ = monodromy_oracle(orb)
        on_circle = bool(np.all(np.abs(np.abs(eigs_direct) - 1.0) < 1e-5))
        assert rec.spectral_4df == on_circle


def test_spectral_distance_basics():
    a = np.array([1.0, 1j, -1j])
    assert spectral_distance(a, a) == 0.0
    b = np.array([1.0 + 1e-4, 1j, -1j])
    assert spectral_distance(a, b) == pytest.approx(1e-4, rel=1e-6)
