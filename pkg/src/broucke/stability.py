"""Monodromy factorization and linear-stability classification.

The monodromy of the full period factors through the quarter-period
frame B = Y(T/4):  with W = Y0^{-1} S Y0 B^{-1} S B, the full-period
frame satisfies Y0^{-1} Y(T) = W^2, and for the frame Y0 chosen in
``dynamics`` the average (W + W^{-1})/2 is block-diagonal with a 4x4
block K whose eigenvalues are the real parts of square roots of the
monodromy multipliers.  The orbit is spectrally stable exactly when K's
eigenvalues are real in [-1, 1]; its known structure (two forced -1
eigenvalues from the period and rotation invariants) reduces the whole
question to the corner entry e = K[4][4] (the 2-degrees-of-freedom
subsystem) and the second eigenvalue a + d + 1 of the central block.

B is never inverted through a general solver: K comes from bilinear
products of B's columns, and where W itself is needed the symplectic
inverse B^{-1} = -J B^T J is used (W can be poorly conditioned).
"""

from dataclasses import dataclass

import numpy as np

from .dynamics import J, S, Y0, pattern_mask_4
from .integrate import DEFAULT_TOL, FrameTrajectory, flow_with_frame

# Residual level above which a record is marked unreliable.
RELIABLE_RESIDUAL = 1e-4
# Degeneracy tolerance: resolves the reported e/eig2 crossing gap at the
# default sweep grid spacing; configurable per call.
DEGENERACY_DELTA = 1e-3
# |e| this close to 1 is a boundary case: repeated unit-circle
# multipliers, classified degenerate rather than stable.
BOUNDARY_TOL = 1e-9

_SJ = S @ J


def _real_quadratic_roots(tr, det):
    """Roots of x^2 - tr*x + det, clamped to real (disc >= 0 structurally)."""
    root = np.sqrt(max(tr * tr - 4.0 * det, 0.0))
    return 0.5 * (tr - root), 0.5 * (tr + root)


@dataclass
class MonodromyData:
    """Quarter-period frame and the derived reduced matrices."""

    B: np.ndarray               # Y(T/4)
    W: np.ndarray
    K: np.ndarray               # 4x4 reduced stability matrix
    L1: np.ndarray              # upper-right 4x4 block of W
    L2: np.ndarray              # lower-left 4x4 block of W
    frame: FrameTrajectory = None

    @property
    def k11(self):
        return self.K[0, 0]

    @property
    def abcd(self):
        K = self.K
        return K[1, 1], K[1, 2], K[2, 1], K[2, 2]

    @property
    def e(self):
        return self.K[3, 3]

    @property
    def eig2(self):
        a, _, _, d = self.abcd
        return a + d + 1.0

    @property
    def k_eigenvalues(self):
        """All four K eigenvalues from the two 2x2 block quadratics.

        Ordered (corner pair, central pair); nominally
        (-1, e, -1, a + d + 1).
        """
        K = self.K
        corner = _real_quadratic_roots(K[0, 0] + K[3, 3],
                                       K[0, 0] * K[3, 3]
                                       - K[0, 3] * K[3, 0])
        a, b, c, d = self.abcd
        central = _real_quadratic_roots(a + d, a * d - b * c)
        return np.array([*corner, *central])


@dataclass
class StructureResiduals:
    """Residuals of every structural identity K must satisfy."""

    k11_plus_one: float
    first_col: float            # ||K e1 - (-1,0,0,0)||_inf
    sparsity: float             # max |K| over the 8 pattern zeros
    rel_i: float                # -zeta4*a + m1^(3/2)*b - zeta4
    rel_ii: float               # -zeta4*c + m1^(3/2)*d + m1^(3/2)
    left_vec: float             # ||w K^T + w||_inf, w = (0,-zeta4,m1^1.5,0)
    wk_block: float             # ||(W+W^-1)/2 - blockdiag(K^T, K)||_inf
    w_symplectic: float         # ||W^T J W - J||_inf
    eig2_det: float             # |(a+d+1) - (-(ad-bc))|

    @property
    def eigenvector_residual(self):
        return max(self.k11_plus_one, self.first_col, self.rel_i,
                   self.rel_ii, self.left_vec)

    @property
    def max_residual(self):
        return max(self.eigenvector_residual, self.sparsity, self.wk_block)

    def as_dict(self):
        return {k: getattr(self, k) for k in (
            "k11_plus_one", "first_col", "sparsity", "rel_i", "rel_ii",
            "left_vec", "wk_block", "w_symplectic", "eig2_det")}


@dataclass
class StabilityRecord:
    """Per-mass classification result (one CSV row of the sweep)."""

    m1: float
    m2: float = float("nan")
    zeta4: float = float("nan")
    s0: float = float("nan")
    t_period: float = float("nan")
    k11: float = float("nan")
    a: float = float("nan")
    b: float = float("nan")
    c: float = float("nan")
    d: float = float("nan")
    e: float = float("nan")
    eig2: float = float("nan")
    res_left_eig: float = float("nan")
    res_sparsity: float = float("nan")
    res_symplectic: float = float("nan")
    gamma_drift: float = float("nan")
    a2_drift: float = float("nan")
    stable_2df: bool = False
    spectral_4df: bool = False
    linear_4df: bool = False
    degenerate_cause: str = ""
    status: str = "ok"


def quarter_frame(orb, tol=DEFAULT_TOL, n_samples=17):
    """Co-integrate the variational frame over the quarter orbit."""
    return flow_with_frame(orb.initial(), Y0, orb.params, (0.0, orb.s0),
                           tol=tol, n_samples=n_samples)


def k_matrix(B, S_mat=None, J_mat=None):
    """Reduced 4x4 matrix from bilinear products of B's columns.

    K[i][j] = c_i^T S J c_{j+4} with c_1..c_8 the columns of B; no
    inversion is involved.  (Direct expansion of the lower-right block
    of (W + W^{-1})/2 using the symplectic inverse of B.)
    """
    SJ = _SJ if S_mat is None and J_mat is None else (
        (S if S_mat is None else S_mat) @ (J if J_mat is None else J_mat))
    return B[:, :4].T @ SJ @ B[:, 4:]


def w_matrix(B):
    """W = Y0^{-1} S Y0 B^{-1} S B via the symplectic inverse of B."""
    Binv = -J @ B.T @ J
    return Y0.T @ S @ Y0 @ Binv @ S @ B


def monodromy_data(orb, tol=DEFAULT_TOL, frame=None):
    """Build B = Y(T/4), W and K for a converged orbit."""
    if frame is None:
        frame = quarter_frame(orb, tol=tol)
    B = frame.Y_end
    W = w_matrix(B)
    return MonodromyData(B=B, W=W, K=k_matrix(B), L1=W[:4, 4:].copy(),
                         L2=W[4:, :4].copy(), frame=frame)


def verify_structure(md, orb):
    """Residuals of the structural identities for one orbit's K and W.

    The eigenvector relations use the conserved rotation invariant of
    the regularized flow (gradient weights (0, -zeta4, m1^{3/2}, 0) after
    the Y0 change of frame).
    """
    K, W = md.K, md.W
    a, b, c, d = md.abcd
    z4 = orb.zeta4
    m32 = orb.params.m1 ** 1.5

    w_row = np.array([0.0, -z4, m32, 0.0])
    mask = pattern_mask_4()

    Winv = -J @ W.T @ J  # W is symplectic; oracle checks cover this
    half = 0.5 * (W + Winv)
    block = np.zeros((8, 8))
    block[:4, :4] = K.T
    block[4:, 4:] = K

    return StructureResiduals(
        k11_plus_one=abs(K[0, 0] + 1.0),
        first_col=float(np.max(np.abs(K[:, 0] - np.array([-1.0, 0, 0, 0])))),
        sparsity=float(np.max(np.abs(K[~mask]))),
        rel_i=abs(-z4 * a + m32 * b - z4),
        rel_ii=abs(-z4 * c + m32 * d + m32),
        left_vec=float(np.max(np.abs(w_row @ K.T + w_row))),
        wk_block=float(np.max(np.abs(half - block))),
        w_symplectic=float(np.max(np.abs(W.T @ J @ W - J))),
        eig2_det=abs((a + d + 1.0) - (-(a * d - b * c))),
    )


def central_block_eigenvalues(md):
    """Eigenvalues of K's central 2x2 block from the closed-form quadratic.

    The forced -1 eigenvalue makes the discriminant a perfect square,
    (a + d + 2)^2, so both roots are exactly real.
    """
    a, b, c, d = md.abcd
    return _real_quadratic_roots(a + d, a * d - b * c)


def classify(md, params, orb=None, residuals=None, delta=DEGENERACY_DELTA,
             boundary_tol=BOUNDARY_TOL):
    """Stability flags and degeneracy causes from the reduced matrix.

    Degeneracy (repeated monodromy multipliers on the unit circle, which
    downgrades linear to spectral stability) is flagged pointwise with
    tolerance ``delta``:

      (a) e = eig2        -- the two multiplier pairs coincide;
      (b) e = +/-1        -- the 2DF pair collides with the trivial +1
                             multipliers (also triggered by eig2 within
                             ``boundary_tol`` of +/-1);
      (c) e = 0           -- the 2DF pair squares to a double -1;
      (d) T2(e) = T2(eig2) with T2(x) = 2x^2 - 1 -- the squared pairs
                             coincide through supplementary angles.
    """
    e = md.e
    eig2 = md.eig2
    record = StabilityRecord(m1=params.m1, m2=params.m2)
    record.k11 = float(md.k11)
    record.a, record.b, record.c, record.d = (float(x) for x in md.abcd)
    record.e = float(e)
    record.eig2 = float(eig2)
    if orb is not None:
        record.zeta4 = orb.zeta4
        record.s0 = orb.s0
        record.t_period = orb.t_period
    if md.frame is not None:
        record.gamma_drift = md.frame.base.gamma_drift
        record.a2_drift = md.frame.base.a2_drift
        record.res_symplectic = md.frame.symplectic_residual

    if residuals is not None:
        record.res_left_eig = residuals.eigenvector_residual
        record.res_sparsity = residuals.sparsity
        if residuals.max_residual >= RELIABLE_RESIDUAL:
            record.status = "unreliable"

    on_boundary_e = abs(abs(e) - 1.0) < boundary_tol
    record.stable_2df = bool(abs(e) <= 1.0 and not on_boundary_e)
    record.spectral_4df = bool(abs(e) <= 1.0 and abs(eig2) <= 1.0)

    causes = []
    if record.spectral_4df:
        if abs(e - eig2) < delta:
            causes.append("a")
        if min(abs(e - 1.0), abs(e + 1.0)) < delta \
                or abs(abs(eig2) - 1.0) < boundary_tol:
            causes.append("b")
        if abs(e) < delta:
            causes.append("c")
        if abs(2.0 * e * e - 2.0 * eig2 * eig2) < delta:
            causes.append("d")
    elif on_boundary_e:
        causes.append("b")
    record.degenerate_cause = "".join(causes)
    record.linear_4df = bool(record.spectral_4df and not causes
                             and record.status == "ok")
    return record


def analyze_orbit(orb, tol=DEFAULT_TOL, delta=DEGENERACY_DELTA):
    """Full pipeline for one converged orbit: frame, K, residuals, flags."""
    md = monodromy_data(orb, tol=tol)
    residuals = verify_structure(md, orb)
    record = classify(md, orb.params, orb=orb, residuals=residuals,
                      delta=delta)
    return md, residuals, record


def monodromy_oracle(orb, tol=DEFAULT_TOL):
    """Spectrum of Y0^{-1} Y(T) from direct full-period integration.

    Cross-check only: the production path never integrates past the
    quarter period.
    """
    frame = flow_with_frame(orb.initial(), Y0, orb.params, (0.0, orb.T),
                            tol=tol, n_samples=9)
    return np.linalg.eigvals(Y0.T @ frame.Y_end), frame


def spectral_distance(eigs_a, eigs_b):
    """Hausdorff distance between two eigenvalue sets."""
    ea = np.asarray(eigs_a, dtype=complex)
    eb = np.asarray(eigs_b, dtype=complex)
    d = np.abs(ea[:, None] - eb[None, :])
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def w_squared_spectrum(md):
    """Eigenvalues of W^2 (the monodromy similarity class)."""
    return np.linalg.eigvals(md.W @ md.W)


def multiplier_pair(lam):
    """Monodromy multiplier pair generated by a real K eigenvalue.

    lam is the real part of a square root of a multiplier: for
    |lam| <= 1 the pair (lam +/- i sqrt(1-lam^2))^2 lies on the unit
    circle; for |lam| > 1 the square roots lam +/- sqrt(lam^2-1) are real
    reciprocals and the multipliers are real.
    """
    lam = float(lam)
    root = np.sqrt(complex(1.0, 0.0) * (lam * lam - 1.0))
    return (lam + root) ** 2, (lam - root) ** 2
