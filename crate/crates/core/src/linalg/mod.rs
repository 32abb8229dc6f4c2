//! Self-contained dense complex linear algebra kernel.
//!
//! Double-precision complex matrices with the decompositions the rest of
//! the crate is built on: Hermitian and general eigensolvers (Householder
//! reduction plus shifted QL/QR iterations), LU and thin-QR factorizations,
//! matrix exponential, PSD square roots, and Gauss quadrature rules.
//! Everything is written for dense matrices up to a few hundred rows;
//! there is no attempt at sparsity or parallelism.

mod eig;
mod funcs;
mod matrix;
pub mod quad;

pub use eig::{
    general_eig, hermitian_eig, min_singular_value, schur, singular_values, spectral_norm,
    GeneralEig, HermitianEig,
};
pub use funcs::{matrix_exp, psd_inv_sqrt, psd_sqrt};
pub use matrix::{qr_thin_q, CMatrix, Lu};
pub use num_complex::Complex64;

use thiserror::Error;

/// Base relative tolerance used by scale-dependent checks.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Acceptance threshold for treating a matrix as Hermitian; inputs inside
/// the threshold are symmetrized before decomposition.
pub const HERMITICITY_TOL: f64 = 1e-10;

/// Errors of the dense kernel.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum LinalgError {
    #[error("matrix is not Hermitian: defect {defect:.3e} exceeds {tol:.3e}")]
    NonHermitian { defect: f64, tol: f64 },
    #[error("eigenvalue iteration did not converge within {0} sweeps")]
    NoConvergence(usize),
    #[error("matrix is singular to working precision (pivot {0:.3e})")]
    Singular(f64),
    #[error("matrix is not positive definite (eigenvalue {0:.3e})")]
    NotPositive(f64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("non-finite entry at ({0}, {1})")]
    NonFinite(usize, usize),
}

/// Scale-relative tolerance `base * max(1, scale)`.
pub fn rel_tol(base: f64, scale: f64) -> f64 {
    base * scale.max(1.0)
}

/// Greedy nearest-neighbor matching distance between two eigenvalue
/// multisets: the largest gap over matched pairs, or infinity when the
/// lengths differ. Complex spectra have no canonical order, so set
/// comparisons go through this.
pub fn multiset_match_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; b.len()];
    let mut worst = 0.0f64;
    for &x in a {
        let mut best: Option<(usize, f64)> = None;
        for (j, &y) in b.iter().enumerate() {
            if used[j] {
                continue;
            }
            let d = (x - y).norm();
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((j, d));
            }
        }
        let (j, d) = best.expect("nonempty by length check");
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}
