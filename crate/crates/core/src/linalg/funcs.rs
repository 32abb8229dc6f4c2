//! Matrix functions: exponential and Hermitian PSD square roots.

use num_complex::Complex64;

use super::eig::hermitian_eig;
use super::matrix::CMatrix;
use super::{LinalgError, HERMITICITY_TOL};

/// Matrix exponential by scaling-and-squaring with a [6/6] Padé approximant.
/// Hermitian inputs take the eigendecomposition path instead.
pub fn matrix_exp(m: &CMatrix) -> CMatrix {
    assert!(m.is_square(), "matrix_exp needs a square matrix");
    let n = m.rows();
    if n == 0 {
        return CMatrix::zeros(0, 0);
    }
    if m.is_hermitian(HERMITICITY_TOL) {
        let eig = hermitian_eig(m).expect("hermiticity already checked");
        let exp_diag =
            CMatrix::from_diag(&eig.eigenvalues.iter().map(|&l| Complex64::new(l.exp(), 0.0)).collect::<Vec<_>>());
        return &(&eig.vectors * &exp_diag) * &eig.vectors.adjoint();
    }

    // Scale so that ‖M/2^s‖ ≲ 0.5, apply the Padé approximant, square back.
    let norm = m.frobenius_norm();
    let s = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let scaled = m.scale_re(0.5f64.powi(s as i32));
    let mut result = pade6_exp(&scaled);
    for _ in 0..s {
        result = &result * &result;
    }
    result
}

/// [6/6] Padé approximant of exp at a matrix with small norm.
fn pade6_exp(a: &CMatrix) -> CMatrix {
    // Coefficients c_k = (2m-k)! m! / ((2m)! (m-k)! k!) for m = 6.
    const COEFF: [f64; 7] = [
        1.0,
        0.5,
        3.0 / 26.0,
        5.0 / 312.0,
        5.0 / 3432.0,
        1.0 / 11440.0,
        1.0 / 308880.0,
    ];
    let n = a.rows();
    let mut powers: Vec<CMatrix> = Vec::with_capacity(7);
    powers.push(CMatrix::identity(n));
    for k in 1..7 {
        let next = &powers[k - 1] * a;
        powers.push(next);
    }
    let mut num = CMatrix::zeros(n, n);
    let mut den = CMatrix::zeros(n, n);
    for k in 0..7 {
        let term = powers[k].scale_re(COEFF[k]);
        num = &num + &term;
        if k % 2 == 0 {
            den = &den + &term;
        } else {
            den = &den - &term;
        }
    }
    den.lu().expect("Padé denominator is nonsingular for scaled inputs").solve_mat(&num)
}

/// Principal square root of a Hermitian PSD matrix; eigenvalues in
/// `[-tol, 0)` are clamped to zero, anything more negative is rejected.
pub fn psd_sqrt(m: &CMatrix) -> Result<CMatrix, LinalgError> {
    let eig = hermitian_eig(m)?;
    let scale = m.frobenius_norm().max(1.0);
    let tol = 1e-10 * scale;
    if eig.min() < -tol {
        return Err(LinalgError::NotPositive(eig.min()));
    }
    let sqrt_diag = CMatrix::from_real_diag(
        &eig.eigenvalues.iter().map(|&l| l.max(0.0).sqrt()).collect::<Vec<_>>(),
    );
    Ok(&(&eig.vectors * &sqrt_diag) * &eig.vectors.adjoint())
}

/// Inverse square root of a Hermitian positive definite matrix.
pub fn psd_inv_sqrt(m: &CMatrix) -> Result<CMatrix, LinalgError> {
    let eig = hermitian_eig(m)?;
    let scale = m.frobenius_norm().max(1.0);
    let threshold = 1e-12 * scale;
    if eig.min() <= threshold {
        return Err(LinalgError::NotPositive(eig.min()));
    }
    let diag = CMatrix::from_real_diag(
        &eig.eigenvalues.iter().map(|&l| 1.0 / l.sqrt()).collect::<Vec<_>>(),
    );
    Ok(&(&eig.vectors * &diag) * &eig.vectors.adjoint())
}
