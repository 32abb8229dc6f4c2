//! Dense numerical machinery for 2x2 block operator matrices
//! `L = [[A0, B], [C, A1]]`: Sylvester and Riccati equation solvers,
//! block diagonalization through invariant graph subspaces, operator
//! angles between spectral subspaces, and verification of the
//! `tan Θ ≤ tanh(arctanh(2‖V‖/δ)/2)` bound for J-self-adjoint
//! off-diagonal perturbations, including a PT-symmetric harmonic
//! oscillator case study.
//!
//! Everything is finite-dimensional: operators are dense complex
//! matrices and the oscillator Hamiltonian is truncated to its first
//! `N` Hermite levels.
//!
//! ```
//! use blockop::krein;
//! use blockop::linalg::CMatrix;
//! use blockop::riccati::BlockOperator;
//!
//! // Rank-one J-self-adjoint perturbation of subordinated spectra.
//! let op = BlockOperator::new(
//!     CMatrix::from_real_diag(&[-0.5]),
//!     CMatrix::from_real_diag(&[0.5]),
//!     CMatrix::from_real_rows(&[&[0.4]]),
//!     CMatrix::from_real_rows(&[&[-0.4]]),
//! )?;
//! let report = krein::verify_tpi(&op)?;
//! assert!(report.spectrum_real);
//! let bound = report.theta_bound.unwrap();
//! assert!(report.theta0_max.unwrap().tan() <= bound + 1e-8);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod decomp;
pub mod harness;
pub mod krein;
pub mod linalg;
pub mod matio;
pub mod oscillator;
pub mod riccati;
pub mod sylvester;

pub use linalg::{CMatrix, Complex64, GeneralEig, HermitianEig, LinalgError};
pub use riccati::{BlockOperator, RiccatiError, RiccatiSolution};
pub use sylvester::{
    Disposition, DispositionGuarantee, SylvesterError, SylvesterProblem, SylvesterSolution,
};
