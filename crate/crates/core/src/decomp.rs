//! Block diagonalization through invariant graph subspaces.
//!
//! Given the angular operators `K` and `K'` solving the two Riccati
//! equations of `L = [[A0, B], [C, A1]]`, the coupling matrix
//! `W = [[I, K'], [K, I]]` diagonalizes `L = W diag(Z0, Z1) W⁻¹` with
//! `Z0 = A0 + BK` and `Z1 = A1 + CK'`. This module builds `W` and its
//! closed-form inverse, the oblique spectral projections onto the graph
//! subspaces, the operator angles between original and perturbed subspaces,
//! and — for J-self-adjoint perturbations with contractive `K` — the
//! explicit similarity `L = T Λ T⁻¹` to a self-adjoint block diagonal.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{
    general_eig, hermitian_eig, min_singular_value, multiset_match_distance, psd_inv_sqrt,
    psd_sqrt, qr_thin_q, spectral_norm, CMatrix, Complex64, LinalgError,
};
use crate::riccati::{self, BlockOperator, RiccatiError};

#[derive(Debug, Error)]
pub enum DecompError {
    #[error("W is singular: smallest singular value of I - K'K is {0:.3e}")]
    SingularW(f64),
    #[error("similarity reconstruction residual {residual:.3e} exceeds {tol:.3e}")]
    SimilarityResidual { residual: f64, tol: f64 },
    #[error("angular operator is not a strict contraction: ‖K‖ = {0:.6}")]
    NotContractive(f64),
    #[error("operator is not J-self-adjoint: ‖C + B†‖ = {0:.3e}")]
    NotJSymmetric(f64),
    #[error("spectral enclosure violated: eigenvalue {value} lies {distance:.3e} from spec(A), allowed {allowed:.3e}")]
    EnclosureViolated { value: Complex64, distance: f64, allowed: f64 },
    #[error("spectra of Λ and Z disagree: multiset distance {0:.3e}")]
    SpectrumMismatch(f64),
    #[error(transparent)]
    Riccati(#[from] RiccatiError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Complete block diagonalization data: angular operators, coupling matrix
/// with closed-form inverse, diagonal blocks, oblique projections, operator
/// angles and the verification residuals.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Diagonalization {
    pub k: CMatrix,
    pub kp: CMatrix,
    pub w: CMatrix,
    pub w_inv: CMatrix,
    pub z0: CMatrix,
    pub z1: CMatrix,
    pub q0: CMatrix,
    pub q1: CMatrix,
    /// Angles (radians, ascending) between H0 and the perturbed graph
    /// subspace; n0 values, padded with structural zeros when rank(K) < n0.
    pub theta0: Vec<f64>,
    /// Same for the complementary pair; n1 values.
    pub theta1: Vec<f64>,
    /// `‖L - W Z W⁻¹‖ / ‖L‖`.
    pub similarity_residual: f64,
    /// Radius of the spectral enclosure around spec(A0) ∪ spec(A1).
    pub enclosure_radius: f64,
}

/// The explicit similarity of a J-self-adjoint block operator matrix to a
/// self-adjoint block diagonal `Λ = diag(Λ0, Λ1)`, through
/// `T = W diag((I-K†K)^{-1/2}, (I-KK†)^{-1/2})`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SelfAdjointForm {
    pub t: CMatrix,
    pub t_inv: CMatrix,
    pub lambda0: CMatrix,
    pub lambda1: CMatrix,
    /// Uniform positivity constant `(1 - ‖K‖²)/(1 + ‖K‖²)` of the graph
    /// subspace in the Krein inner product.
    pub gamma: f64,
}

/// Build `W = [[I, K'], [K, I]]` and its inverse from the closed-form
/// blocks
/// `W⁻¹ = [[(I-K'K)⁻¹, -(I-K'K)⁻¹K'], [-(I-KK')⁻¹K, (I-KK')⁻¹]]`.
pub fn build_w(k: &CMatrix, kp: &CMatrix) -> Result<(CMatrix, CMatrix), DecompError> {
    let n0 = k.cols();
    let n1 = k.rows();
    assert_eq!(kp.rows(), n0, "K' must map the second space into the first");
    assert_eq!(kp.cols(), n1);

    let i0 = CMatrix::identity(n0);
    let i1 = CMatrix::identity(n1);
    let g0 = &i0 - &(kp * k); // I - K'K
    let g1 = &i1 - &(k * kp); // I - KK'

    let smin = min_singular_value(&g0)?;
    if smin <= 1e-12 * (1.0 + spectral_norm(&g0)) {
        return Err(DecompError::SingularW(smin));
    }

    let g0_inv = g0.inverse().map_err(|_| DecompError::SingularW(smin))?;
    let g1_inv = g1.inverse().map_err(|_| DecompError::SingularW(smin))?;

    let w = CMatrix::block2x2(&i0, kp, k, &i1);
    let w_inv = CMatrix::block2x2(
        &g0_inv,
        &-&(&g0_inv * kp),
        &-&(&g1_inv * k),
        &g1_inv,
    );
    Ok((w, w_inv))
}

/// Oblique projections onto the graph subspaces:
/// `Q0 = [I; K](I-K'K)⁻¹[I, -K']` projects onto G(K) along G(K'),
/// `Q1 = [K'; I](I-KK')⁻¹[-K, I]` the complementary one.
pub fn oblique_projections(
    k: &CMatrix,
    kp: &CMatrix,
) -> Result<(CMatrix, CMatrix), DecompError> {
    let n0 = k.cols();
    let n1 = k.rows();
    let i0 = CMatrix::identity(n0);
    let i1 = CMatrix::identity(n1);
    let g0 = &i0 - &(kp * k);
    let g1 = &i1 - &(k * kp);
    let smin = min_singular_value(&g0)?;
    if smin <= 1e-12 * (1.0 + spectral_norm(&g0)) {
        return Err(DecompError::SingularW(smin));
    }
    let g0_inv = g0.inverse().map_err(|_| DecompError::SingularW(smin))?;
    let g1_inv = g1.inverse().map_err(|_| DecompError::SingularW(smin))?;

    let col0 = CMatrix::vstack(&i0, k); // [I; K]
    let row0 = CMatrix::hstack(&i0, &-kp); // [I, -K']
    let q0 = &(&col0 * &g0_inv) * &row0;

    let col1 = CMatrix::vstack(kp, &i1); // [K'; I]
    let row1 = CMatrix::hstack(&-k, &i1); // [-K, I]
    let q1 = &(&col1 * &g1_inv) * &row1;
    Ok((q0, q1))
}

/// Operator angles between the first component space and the graph G(K):
/// `θ_i = arctan(s_i(K))`, reported ascending with one angle per dimension
/// of the reference space (structural zeros included through the Gram
/// spectrum of K†K).
pub fn operator_angle(k: &CMatrix) -> Result<Vec<f64>, DecompError> {
    let gram = &k.adjoint() * k;
    let eig = hermitian_eig(&gram)?;
    Ok(eig.eigenvalues.iter().map(|&l| l.max(0.0).sqrt().atan()).collect())
}

/// The same angles computed from the subspace-geometry side:
/// `Θ = arcsin √(I - P_M P_N |_M)` with `P_N` the orthogonal projection
/// onto G(K) obtained from a QR factorization of `[I; K]`. Used as the
/// formula-independent cross-check of `operator_angle`.
///
/// With `Q = [Q_top; Q_bot]` the orthonormal basis of G(K), the operator
/// `I - P_M P_N |_M = I - Q_top Q_top†` equals `Q_bot† Q_bot` exactly
/// (columns of Q are unit vectors), and the latter form avoids the
/// subtraction that would wash out small angles to √ε.
pub fn operator_angle_via_projection(k: &CMatrix) -> Result<Vec<f64>, DecompError> {
    let n0 = k.cols();
    let stacked = CMatrix::vstack(&CMatrix::identity(n0), k);
    let q = qr_thin_q(&stacked);
    let q_bot = q.submatrix(n0, n0 + k.rows(), 0, n0);
    let sine_gram = &q_bot.adjoint() * &q_bot;
    let eig = hermitian_eig(&sine_gram.hermitian_part())?;
    let mut angles: Vec<f64> =
        eig.eigenvalues.iter().map(|&l| l.clamp(0.0, 1.0).sqrt().asin()).collect();
    angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(angles)
}

/// Solve both Riccati equations of the block operator, assemble the
/// similarity `L = W Z W⁻¹` and verify it, and check that the perturbed
/// spectrum stays inside the closed r-neighborhood of `spec(A0) ∪ spec(A1)`
/// with `r = ‖B‖‖C‖ / (δ/2 + √(δ²/4 - ‖B‖‖C‖))`.
pub fn block_diagonalize(op: &BlockOperator, delta: f64) -> Result<Diagonalization, DecompError> {
    block_diagonalize_tol(op, delta, riccati::DEFAULT_TOL, riccati::DEFAULT_MAX_ITER)
}

/// `block_diagonalize` with explicit solver tolerance and iteration cap.
pub fn block_diagonalize_tol(
    op: &BlockOperator,
    delta: f64,
    tol: f64,
    max_iter: usize,
) -> Result<Diagonalization, DecompError> {
    let sol_k = riccati::solve_fixed_point(op, delta, tol, max_iter)?;
    let sol_kp = riccati::solve_dual(op, delta, tol, max_iter)?;
    diagonalize_with(op, delta, &sol_k.k, &sol_kp.k)
}

/// Assemble and verify the diagonalization for already-solved angular
/// operators.
pub fn diagonalize_with(
    op: &BlockOperator,
    delta: f64,
    k: &CMatrix,
    kp: &CMatrix,
) -> Result<Diagonalization, DecompError> {
    let contraction = spectral_norm(k) * spectral_norm(kp);
    if contraction >= 1.0 {
        return Err(DecompError::SingularW(1.0 - contraction));
    }
    let (w, w_inv) = build_w(k, kp)?;
    let (q0, q1) = oblique_projections(k, kp)?;
    let z0 = op.a0() + &(op.b() * k);
    let z1 = op.a1() + &(op.c() * kp);

    let l = op.assemble();
    let z = CMatrix::block2x2(
        &z0,
        &CMatrix::zeros(op.n0(), op.n1()),
        &CMatrix::zeros(op.n1(), op.n0()),
        &z1,
    );
    let l_norm = spectral_norm(&l).max(1.0);
    let recon = &(&w * &z) * &w_inv;
    let similarity_residual = spectral_norm(&(&l - &recon)) / l_norm;
    let sim_tol = 1e-9;
    if similarity_residual > sim_tol {
        return Err(DecompError::SimilarityResidual {
            residual: similarity_residual,
            tol: sim_tol,
        });
    }

    let theta0 = operator_angle(k)?;
    let theta1 = operator_angle(kp)?;

    // Spectral enclosure: every eigenvalue of Z0 and Z1 stays within r of
    // the unperturbed spectrum.
    let nb = spectral_norm(op.b());
    let nc = spectral_norm(op.c());
    let enclosure_radius = if nb * nc > 0.0 {
        nb * nc / (delta / 2.0 + (delta * delta / 4.0 - nb * nc).max(0.0).sqrt())
    } else {
        0.0
    };
    let spec_a: Vec<f64> = hermitian_eig(op.a0())?
        .eigenvalues
        .into_iter()
        .chain(hermitian_eig(op.a1())?.eigenvalues)
        .collect();
    let allowed = enclosure_radius + 1e-8 * l_norm;
    for zblock in [&z0, &z1] {
        for lam in general_eig(zblock)?.eigenvalues {
            let dist = spec_a
                .iter()
                .map(|&a| (lam - Complex64::new(a, 0.0)).norm())
                .fold(f64::INFINITY, f64::min);
            if dist > allowed {
                return Err(DecompError::EnclosureViolated { value: lam, distance: dist, allowed });
            }
        }
    }

    Ok(Diagonalization {
        k: k.clone(),
        kp: kp.clone(),
        w,
        w_inv,
        z0,
        z1,
        q0,
        q1,
        theta0,
        theta1,
        similarity_residual,
        enclosure_radius,
    })
}

/// The explicit similarity to a self-adjoint operator for J-self-adjoint
/// perturbations (`C = -B†`) with strictly contractive `K`:
/// `Λ0 = (I-K†K)^{1/2} (A0+BK) (I-K†K)^{-1/2}` and
/// `Λ1 = (I-KK†)^{1/2} (A1-B†K†) (I-KK†)^{-1/2}` are Hermitian and
/// `L = T Λ T⁻¹` with `T = W diag((I-K†K)^{-1/2}, (I-KK†)^{-1/2})`.
pub fn selfadjoint_form(op: &BlockOperator, k: &CMatrix) -> Result<SelfAdjointForm, DecompError> {
    let defect = op.j_defect();
    if !op.is_j_selfadjoint() {
        return Err(DecompError::NotJSymmetric(defect));
    }
    let knorm = spectral_norm(k);
    if knorm >= 1.0 {
        return Err(DecompError::NotContractive(knorm));
    }
    let kd = k.adjoint();
    let i0 = CMatrix::identity(op.n0());
    let i1 = CMatrix::identity(op.n1());
    let g0 = &i0 - &(&kd * k); // I - K†K
    let g1 = &i1 - &(k * &kd); // I - KK†

    let s0 = psd_sqrt(&g0)?;
    let s0_inv = psd_inv_sqrt(&g0)?;
    let s1 = psd_sqrt(&g1)?;
    let s1_inv = psd_inv_sqrt(&g1)?;

    let z0 = op.a0() + &(op.b() * k);
    let z1 = op.a1() - &(&op.b().adjoint() * &kd);

    let lambda0 = &(&s0 * &z0) * &s0_inv;
    let lambda1 = &(&s1 * &z1) * &s1_inv;

    let (w, w_inv) = build_w(k, &kd)?;
    let zero01 = CMatrix::zeros(op.n0(), op.n1());
    let zero10 = CMatrix::zeros(op.n1(), op.n0());
    let t = &w * &CMatrix::block2x2(&s0_inv, &zero01, &zero10, &s1_inv);
    let t_inv = &CMatrix::block2x2(&s0, &zero01, &zero10, &s1) * &w_inv;

    // spec(Λ_j) = spec(Z_j) by similarity; verify the multiset identity.
    let lam0_spec: Vec<Complex64> = hermitian_eig(&lambda0.hermitian_part())?
        .eigenvalues
        .iter()
        .map(|&x| Complex64::new(x, 0.0))
        .collect();
    let z0_spec = general_eig(&z0)?.eigenvalues;
    let d0 = multiset_match_distance(&lam0_spec, &z0_spec);
    let lam1_spec: Vec<Complex64> = hermitian_eig(&lambda1.hermitian_part())?
        .eigenvalues
        .iter()
        .map(|&x| Complex64::new(x, 0.0))
        .collect();
    let z1_spec = general_eig(&z1)?.eigenvalues;
    let d1 = multiset_match_distance(&lam1_spec, &z1_spec);
    let l_norm = spectral_norm(&op.assemble()).max(1.0);
    if d0.max(d1) > 1e-8 * l_norm {
        return Err(DecompError::SpectrumMismatch(d0.max(d1)));
    }

    let gamma = (1.0 - knorm * knorm) / (1.0 + knorm * knorm);
    Ok(SelfAdjointForm { t, t_inv, lambda0, lambda1, gamma })
}

/// Residuals of the two commutation identities tying the solved angular
/// operators to the diagonal blocks:
/// `(I-K'K)(A0+BK) = (A0-K'C)(I-K'K)` and
/// `(I-KK')(A1+CK') = (A1-KB)(I-KK')`.
pub fn commutation_identities(op: &BlockOperator, k: &CMatrix, kp: &CMatrix) -> (f64, f64) {
    let i0 = CMatrix::identity(op.n0());
    let i1 = CMatrix::identity(op.n1());
    let g0 = &i0 - &(kp * k);
    let g1 = &i1 - &(k * kp);

    let lhs0 = &g0 * &(op.a0() + &(op.b() * k));
    let rhs0 = &(op.a0() - &(kp * op.c())) * &g0;
    let lhs1 = &g1 * &(op.a1() + &(op.c() * kp));
    let rhs1 = &(op.a1() - &(k * op.b())) * &g1;

    (spectral_norm(&(&lhs0 - &rhs0)), spectral_norm(&(&lhs1 - &rhs1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::riccati::{solve_dual, solve_fixed_point, DEFAULT_MAX_ITER, DEFAULT_TOL};

    fn c64(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn scalar(v: f64) -> CMatrix {
        CMatrix::from_real_diag(&[v])
    }

    fn ex1(d: f64, b: f64, c: f64) -> BlockOperator {
        BlockOperator::new(
            scalar(-d / 2.0),
            scalar(d / 2.0),
            scalar(b),
            scalar(-c),
        )
        .unwrap()
    }

    struct Lcg(u64);
    impl Lcg {
        fn next_f64(&mut self) -> f64 {
            self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((self.0 >> 11) as f64) / ((1u64 << 53) as f64) * 2.0 - 1.0
        }
        fn next_c(&mut self) -> Complex64 {
            c64(self.next_f64(), self.next_f64())
        }
    }

    #[test]
    fn w_identity_for_zero_angular_operators() {
        let k = CMatrix::zeros(2, 3);
        let kp = CMatrix::zeros(3, 2);
        let (w, w_inv) = build_w(&k, &kp).unwrap();
        assert!((&w - &CMatrix::identity(5)).frobenius_norm() < 1e-15);
        assert!((&w_inv - &CMatrix::identity(5)).frobenius_norm() < 1e-15);
    }

    #[test]
    fn w_inverse_closed_form_scalar() {
        let k = scalar(0.5);
        let kp = scalar(0.5);
        let (w, w_inv) = build_w(&k, &kp).unwrap();
        assert!((w_inv[(0, 0)] - c64(4.0 / 3.0, 0.0)).norm() < 1e-14);
        assert!((&(&w * &w_inv) - &CMatrix::identity(2)).frobenius_norm() < 1e-14);
    }

    #[test]
    fn w_singular_at_unit_product() {
        let k = scalar(1.0);
        let kp = scalar(1.0);
        assert!(matches!(build_w(&k, &kp), Err(DecompError::SingularW(_))));
    }

    #[test]
    fn w_inverse_matches_generic_inversion() {
        let mut rng = Lcg(7);
        let k = CMatrix::from_fn(3, 2, |_, _| rng.next_c().scale(0.35));
        let kp = CMatrix::from_fn(2, 3, |_, _| rng.next_c().scale(0.35));
        let (w, w_inv) = build_w(&k, &kp).unwrap();
        let generic = w.inverse().unwrap();
        assert!((&w_inv - &generic).frobenius_norm() < 1e-12);
    }

    #[test]
    fn projections_are_complementary_idempotents() {
        let mut rng = Lcg(13);
        let k = CMatrix::from_fn(3, 2, |_, _| rng.next_c().scale(0.4));
        let kp = CMatrix::from_fn(2, 3, |_, _| rng.next_c().scale(0.4));
        let (q0, q1) = oblique_projections(&k, &kp).unwrap();
        let n = 5;
        assert!((&(&q0 * &q0) - &q0).frobenius_norm() < 1e-11);
        assert!((&(&q1 * &q1) - &q1).frobenius_norm() < 1e-11);
        assert!((&(&q0 + &q1) - &CMatrix::identity(n)).frobenius_norm() < 1e-12);
        assert!((&q0 * &q1).frobenius_norm() < 1e-11);

        // Columns of [I; K] span G(K) and are fixed by Q0.
        let basis = CMatrix::vstack(&CMatrix::identity(2), &k);
        let fixed = &q0 * &basis;
        assert!((&fixed - &basis).frobenius_norm() < 1e-12);

        // Q0 = diag(I, 0) in the unperturbed case.
        let (q0, _) = oblique_projections(&CMatrix::zeros(3, 2), &CMatrix::zeros(2, 3)).unwrap();
        let want = CMatrix::block2x2(
            &CMatrix::identity(2),
            &CMatrix::zeros(2, 3),
            &CMatrix::zeros(3, 2),
            &CMatrix::zeros(3, 3),
        );
        assert!((&q0 - &want).frobenius_norm() < 1e-15);
    }

    #[test]
    fn ex1_block_diagonalization_reproduces_closed_form_spectrum() {
        let op = ex1(1.0, 0.4, 0.4);
        let diag = block_diagonalize(&op, 1.0).unwrap();
        // λ₋ = A0 + B K⁽¹⁾ = -0.5 + 0.4·0.5 = -0.3 = -√(d²/4 - bc).
        assert!((diag.z0[(0, 0)] - c64(-0.3, 0.0)).norm() < 1e-10, "Z0 = {:?}", diag.z0);
        assert!((diag.z1[(0, 0)] - c64(0.3, 0.0)).norm() < 1e-10);
        assert!(diag.similarity_residual < 1e-9);
        // r = bc/(δ/2 + √(δ²/4 - bc)) = 0.16/0.8 = 0.2.
        assert!((diag.enclosure_radius - 0.2).abs() < 1e-12);
        // tan θ0 = ‖K‖ = 0.5.
        assert!((diag.theta0[0].tan() - 0.5).abs() < 1e-10);
    }

    #[test]
    fn unperturbed_operator_diagonalizes_trivially() {
        let op = BlockOperator::new(
            CMatrix::from_real_diag(&[-1.0, -2.0]),
            CMatrix::from_real_diag(&[1.0]),
            CMatrix::zeros(2, 1),
            CMatrix::zeros(1, 2),
        )
        .unwrap();
        let diag = block_diagonalize(&op, 2.0).unwrap();
        assert!((&diag.w - &CMatrix::identity(3)).frobenius_norm() < 1e-14);
        assert!(diag.theta0.iter().all(|&t| t.abs() < 1e-14));
        assert_eq!(diag.enclosure_radius, 0.0);
    }

    #[test]
    fn random_gap_instance_reconstructs() {
        let mut rng = Lcg(41);
        // A0 inside the gap of A1, d = 1.
        let a0 = CMatrix::from_real_diag(&[-0.3, 0.2, 0.4]);
        let a1 = CMatrix::from_real_diag(&[-1.4, 1.5, 2.0, 1.7]);
        let b_raw = CMatrix::from_fn(3, 4, |_, _| rng.next_c());
        let target = 0.31; // ‖V‖ < d/2 with d = 1
        let b = b_raw.scale_re(target / spectral_norm(&b_raw));
        let c = b.adjoint().scale_re(-1.0);
        let op = BlockOperator::new(a0, a1, b, c).unwrap();
        let diag = block_diagonalize(&op, 1.0).unwrap();
        assert!(diag.similarity_residual <= 1e-9);

        // Graph subspaces are L-invariant: (I - Q0) L Q0 ≈ 0.
        let l = op.assemble();
        let inv_defect = &(&(&CMatrix::identity(7) - &diag.q0) * &l) * &diag.q0;
        assert!(spectral_norm(&inv_defect) <= 1e-9 * spectral_norm(&l).max(1.0));

        // spec(L) = spec(Z0) ⊎ spec(Z1).
        let mut zspec = general_eig(&diag.z0).unwrap().eigenvalues;
        zspec.extend(general_eig(&diag.z1).unwrap().eigenvalues);
        let lspec = general_eig(&l).unwrap().eigenvalues;
        assert!(multiset_match_distance(&zspec, &lspec) < 1e-8);

        // Identities Id0/Id1 hold at the solved angular operators.
        let (r0, r1) = commutation_identities(&op, &diag.k, &diag.kp);
        assert!(r0 < 1e-9 && r1 < 1e-9, "identity residuals {r0}, {r1}");
    }

    #[test]
    fn angle_formulas_agree() {
        // Scalar: tan θ = |k|, and the arcsin route agrees.
        let k = scalar(1.0);
        let a = operator_angle(&k).unwrap();
        assert!((a[0] - std::f64::consts::FRAC_PI_4).abs() < 1e-14);

        let k = scalar(0.5);
        let a = operator_angle(&k).unwrap();
        let b = operator_angle_via_projection(&k).unwrap();
        assert!((a[0] - 0.5f64.atan()).abs() < 1e-12);
        assert!((a[0] - b[0]).abs() < 1e-12);

        assert!(operator_angle(&CMatrix::zeros(2, 2)).unwrap().iter().all(|&t| t == 0.0));

        // Square full-rank K with ‖K‖ = 10: agreement to 1e-10 throughout.
        let mut rng = Lcg(4);
        let raw = CMatrix::from_fn(4, 4, |_, _| rng.next_c());
        let k = raw.scale_re(10.0 / spectral_norm(&raw));
        let a = operator_angle(&k).unwrap();
        let b = operator_angle_via_projection(&k).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-10, "angle mismatch {x} vs {y}");
        }

        // Rectangular K: the n0 - rank(K) structural zeros carry √ε·‖K‖
        // jitter in both routes (the Gram eigenvalues cancel to ε‖K‖²),
        // so they are compared against an ε floor instead.
        let k = CMatrix::from_fn(2, 4, |_, _| rng.next_c().scale(5.0));
        let a = operator_angle(&k).unwrap();
        let b = operator_angle_via_projection(&k).unwrap();
        assert_eq!(a.len(), 4);
        let zero_floor = 5e-7;
        for (x, y) in a.iter().zip(&b) {
            if *x < zero_floor && *y < zero_floor {
                continue;
            }
            assert!((x - y).abs() < 1e-10, "angle mismatch {x} vs {y}");
        }
    }

    #[test]
    fn selfadjoint_form_scalar_and_random() {
        // Scalar J-self-adjoint instance: Λ0 is 1x1, trivially Hermitian.
        let op = ex1(1.0, 0.4, 0.4);
        let sol = solve_fixed_point(&op, 1.0, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        let form = selfadjoint_form(&op, &sol.k).unwrap();
        assert!((form.lambda0[(0, 0)] - c64(-0.3, 0.0)).norm() < 1e-10);
        assert!((form.gamma - (1.0 - 0.25) / (1.0 + 0.25)).abs() < 1e-10);

        // Random 4x3 J-self-adjoint instance.
        let mut rng = Lcg(77);
        let a0 = CMatrix::from_real_diag(&[-2.0, -1.5, -1.2, -1.0]);
        let a1 = CMatrix::from_real_diag(&[1.0, 1.3, 2.2]);
        let b_raw = CMatrix::from_fn(4, 3, |_, _| rng.next_c());
        let b = b_raw.scale_re(0.8 / spectral_norm(&b_raw)); // ‖V‖ < δ/2 = 1
        let c = b.adjoint().scale_re(-1.0);
        let op = BlockOperator::new(a0, a1, b, c).unwrap();
        let sol = solve_fixed_point(&op, 2.0, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        let form = selfadjoint_form(&op, &sol.k).unwrap();

        let l = op.assemble();
        let l_norm = spectral_norm(&l);
        assert!(form.lambda0.hermiticity_defect() <= 1e-9 * l_norm.max(1.0));
        assert!(form.lambda1.hermiticity_defect() <= 1e-9 * l_norm.max(1.0));

        let zero01 = CMatrix::zeros(4, 3);
        let zero10 = CMatrix::zeros(3, 4);
        let lam = CMatrix::block2x2(&form.lambda0, &zero01, &zero10, &form.lambda1);
        let recon = &(&form.t * &lam) * &form.t_inv;
        assert!(spectral_norm(&(&recon - &l)) <= 1e-9 * l_norm.max(1.0));

        // K' = K† for J-self-adjoint instances.
        let dual = solve_dual(&op, 2.0, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        assert!((&dual.k - &sol.k.adjoint()).frobenius_norm() < 1e-9);
    }

    #[test]
    fn selfadjoint_form_rejects_wrong_structure() {
        // Not J-self-adjoint: C ≠ -B†.
        let op = BlockOperator::new(scalar(-0.5), scalar(0.5), scalar(0.4), scalar(0.4)).unwrap();
        let k = scalar(0.1);
        assert!(matches!(selfadjoint_form(&op, &k), Err(DecompError::NotJSymmetric(_))));

        // Non-contractive K.
        let op = ex1(1.0, 0.4, 0.4);
        let k = scalar(1.2);
        assert!(matches!(selfadjoint_form(&op, &k), Err(DecompError::NotContractive(_))));
    }

    #[test]
    fn identities_vanish_without_perturbation() {
        let op = BlockOperator::new(
            scalar(-1.0),
            scalar(1.0),
            CMatrix::zeros(1, 1),
            CMatrix::zeros(1, 1),
        )
        .unwrap();
        let (r0, r1) = commutation_identities(&op, &CMatrix::zeros(1, 1), &CMatrix::zeros(1, 1));
        assert_eq!(r0, 0.0);
        assert_eq!(r1, 0.0);

        // Ex1 closed-form solutions satisfy the identities to roundoff.
        let op = ex1(1.0, 0.4, 0.4);
        let k = scalar(0.5);
        let kp = scalar(0.5); // K' = K† here
        let (r0, r1) = commutation_identities(&op, &k, &kp);
        assert!(r0 < 1e-12 && r1 < 1e-12);
    }
}
