//! Operator Riccati equation `K A0 - A1 K + K B K = C` solved by the
//! contraction fixed-point map `K ↦ S⁻¹(C - K B K)`, where `S` is the
//! Sylvester operator `S(X) = X A0 - A1 X`.
//!
//! Under `√(‖B‖‖C‖) < δ/2` with `‖S⁻¹‖ ≤ 1/δ` the iteration started at
//! `K = 0` converges to the unique solution in the ball of radius
//! `δ/(2‖B‖)`, and that solution obeys the a priori bound
//! `‖K‖ ≤ ‖C‖ / (δ/2 + √(δ²/4 - ‖B‖‖C‖))`, equivalently
//! `√(‖C‖/‖B‖) tanh(arctanh(2√(‖B‖‖C‖)/δ)/2)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{spectral_norm, CMatrix, Complex64, LinalgError, Lu, HERMITICITY_TOL};
use crate::sylvester::{self, SylvesterError};

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 10_000;

#[derive(Debug, Error)]
pub enum RiccatiError {
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("fixed-point iteration did not converge in {iterations} steps (last step {last_step:.3e})")]
    NoConvergence { iterations: usize, last_step: f64 },
    #[error("dual solution fails to verify against the primal equation: {0}")]
    VerificationFailed(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error(transparent)]
    Sylvester(#[from] SylvesterError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// The 2x2 block operator matrix `L = [[A0, B], [C, A1]]` with Hermitian
/// diagonal entries. `B` maps the second component space into the first,
/// `C` the other way around; the off-diagonal part is J-self-adjoint
/// exactly when `C = -B†`.
///
/// Documents deserialize through `new`, so shape and hermiticity are
/// validated on the way in.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "RawBlockOperator")]
pub struct BlockOperator {
    a0: CMatrix,
    a1: CMatrix,
    b: CMatrix,
    c: CMatrix,
}

#[derive(Deserialize)]
struct RawBlockOperator {
    a0: CMatrix,
    a1: CMatrix,
    b: CMatrix,
    c: CMatrix,
}

impl TryFrom<RawBlockOperator> for BlockOperator {
    type Error = RiccatiError;
    fn try_from(raw: RawBlockOperator) -> Result<Self, RiccatiError> {
        BlockOperator::new(raw.a0, raw.a1, raw.b, raw.c)
    }
}

impl BlockOperator {
    pub fn new(
        a0: CMatrix,
        a1: CMatrix,
        b: CMatrix,
        c: CMatrix,
    ) -> Result<Self, RiccatiError> {
        if !a0.is_square() || !a1.is_square() {
            return Err(RiccatiError::DimensionMismatch("A0 and A1 must be square".into()));
        }
        let (n0, n1) = (a0.rows(), a1.rows());
        if b.rows() != n0 || b.cols() != n1 {
            return Err(RiccatiError::DimensionMismatch(format!(
                "B must be {}x{}, got {}x{}",
                n0,
                n1,
                b.rows(),
                b.cols()
            )));
        }
        if c.rows() != n1 || c.cols() != n0 {
            return Err(RiccatiError::DimensionMismatch(format!(
                "C must be {}x{}, got {}x{}",
                n1,
                n0,
                c.rows(),
                c.cols()
            )));
        }
        if !a0.is_hermitian(HERMITICITY_TOL) || !a1.is_hermitian(HERMITICITY_TOL) {
            return Err(RiccatiError::HypothesisViolated(
                "A0 and A1 must be Hermitian".into(),
            ));
        }
        Ok(Self { a0: a0.hermitian_part(), a1: a1.hermitian_part(), b, c })
    }

    pub fn n0(&self) -> usize {
        self.a0.rows()
    }

    pub fn n1(&self) -> usize {
        self.a1.rows()
    }

    pub fn a0(&self) -> &CMatrix {
        &self.a0
    }

    pub fn a1(&self) -> &CMatrix {
        &self.a1
    }

    pub fn b(&self) -> &CMatrix {
        &self.b
    }

    pub fn c(&self) -> &CMatrix {
        &self.c
    }

    /// The assembled block matrix `L = [[A0, B], [C, A1]]`.
    pub fn assemble(&self) -> CMatrix {
        CMatrix::block2x2(&self.a0, &self.b, &self.c, &self.a1)
    }

    /// Diagonal part `A = diag(A0, A1)`.
    pub fn diagonal_part(&self) -> CMatrix {
        CMatrix::block2x2(
            &self.a0,
            &CMatrix::zeros(self.n0(), self.n1()),
            &CMatrix::zeros(self.n1(), self.n0()),
            &self.a1,
        )
    }

    /// Off-diagonal perturbation `V = [[0, B], [C, 0]]`.
    pub fn perturbation(&self) -> CMatrix {
        CMatrix::block2x2(
            &CMatrix::zeros(self.n0(), self.n0()),
            &self.b,
            &self.c,
            &CMatrix::zeros(self.n1(), self.n1()),
        )
    }

    /// `‖V‖ = max(‖B‖, ‖C‖)` for the off-diagonal block matrix.
    pub fn v_norm(&self) -> f64 {
        spectral_norm(&self.b).max(spectral_norm(&self.c))
    }

    /// `‖C + B†‖`: zero exactly when the perturbation is J-self-adjoint.
    pub fn j_defect(&self) -> f64 {
        spectral_norm(&(&self.c + &self.b.adjoint()))
    }

    pub fn is_j_selfadjoint(&self) -> bool {
        let scale = spectral_norm(&self.b).max(1.0);
        self.j_defect() <= 1e-10 * scale
    }
}

/// Converged solution of the Riccati equation together with its
/// certificates: residual, norm, the contraction ball radius
/// `δ/(2‖B‖)` and the a priori norm bound.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RiccatiSolution {
    pub k: CMatrix,
    pub iterations: usize,
    pub residual: f64,
    pub norm: f64,
    pub ball_radius: f64,
    pub bound_estl: f64,
}

/// Norm bound in its algebraic and hypertrigonometric forms; the two agree
/// to roundoff whenever both exist.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct NormBound {
    pub value: f64,
    pub hyperbolic: Option<f64>,
}

/// Roots of the scalar quadratic `b k² - d k + c = 0` written in the
/// discriminant form; only `k1` lies in the contraction ball `|k| < d/(2b)`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ScalarRoots {
    pub k1: f64,
    pub k2: f64,
    /// Set when `√(bc) = d/2`: the discriminant vanishes and both roots
    /// coincide at `2c/d`.
    pub boundary: bool,
}

/// Sylvester solve `S(X) = Y` with the vectorized factorization computed
/// once and reused across fixed-point iterations. Exactly diagonal entries
/// reduce the Kronecker matrix to its diagonal `λ0_j - λ1_i`.
pub(crate) struct SylvesterFactorization {
    n0: usize,
    n1: usize,
    inner: FactorizationKind,
}

enum FactorizationKind {
    Diagonal(Vec<Complex64>),
    Dense(Lu),
}

impl SylvesterFactorization {
    pub fn new(a0: &CMatrix, a1: &CMatrix) -> Result<Self, RiccatiError> {
        let (n0, n1) = (a0.rows(), a1.rows());
        let tol = 1e-10 * (1.0 + spectral_norm(a0) + spectral_norm(a1));
        if a0.is_exactly_diagonal() && a1.is_exactly_diagonal() {
            let mut div = Vec::with_capacity(n0 * n1);
            let mut dmin = f64::INFINITY;
            for j in 0..n0 {
                for i in 0..n1 {
                    let q = a0[(j, j)] - a1[(i, i)];
                    dmin = dmin.min(q.norm());
                    div.push(q);
                }
            }
            if dmin <= tol {
                return Err(RiccatiError::Sylvester(SylvesterError::SingularOperator(dmin)));
            }
            return Ok(Self { n0, n1, inner: FactorizationKind::Diagonal(div) });
        }
        let m = sylvester::kron_matrix(a0, a1);
        let lu = m
            .lu()
            .map_err(|e| RiccatiError::Sylvester(SylvesterError::SingularOperator(match e {
                LinalgError::Singular(p) => p,
                _ => 0.0,
            })))?;
        Ok(Self { n0, n1, inner: FactorizationKind::Dense(lu) })
    }

    pub fn solve(&self, y: &CMatrix) -> CMatrix {
        match &self.inner {
            FactorizationKind::Diagonal(div) => CMatrix::from_fn(self.n1, self.n0, |i, j| {
                y[(i, j)] / div[j * self.n1 + i]
            }),
            FactorizationKind::Dense(lu) => {
                let yv = sylvester::vec_of(y);
                let xv = lu.solve_vec(&yv);
                sylvester::unvec(&xv, self.n1, self.n0)
            }
        }
    }
}

/// Residual `‖K A0 - A1 K + K B K - C‖` (spectral norm).
pub fn riccati_residual(k: &CMatrix, op: &BlockOperator) -> f64 {
    let lhs = &(&(k * op.a0()) - &(op.a1() * k)) + &(&(k * op.b()) * k);
    spectral_norm(&(&lhs - op.c()))
}

/// Solve the Riccati equation by the fixed-point map starting at `K = 0`.
///
/// `delta` certifies `‖S⁻¹‖ ≤ 1/δ`; pass the value produced by
/// `sylvester::guarantee` for Hermitian entries. Stops once both the step
/// and the residual drop below tolerance. The returned `K` is the unique
/// solution inside the ball of radius `δ/(2‖B‖)`.
pub fn solve_fixed_point(
    op: &BlockOperator,
    delta: f64,
    tol: f64,
    max_iter: usize,
) -> Result<RiccatiSolution, RiccatiError> {
    let start = CMatrix::zeros(op.n1(), op.n0());
    solve_fixed_point_from(op, delta, tol, max_iter, &start)
}

/// Fixed-point iteration from an arbitrary start inside the contraction
/// ball (uniqueness makes the limit independent of the start).
pub fn solve_fixed_point_from(
    op: &BlockOperator,
    delta: f64,
    tol: f64,
    max_iter: usize,
    start: &CMatrix,
) -> Result<RiccatiSolution, RiccatiError> {
    let nb = spectral_norm(op.b());
    let nc = spectral_norm(op.c());
    check_smallness(nb, nc, delta)?;
    if start.rows() != op.n1() || start.cols() != op.n0() {
        return Err(RiccatiError::DimensionMismatch(format!(
            "start must be {}x{}",
            op.n1(),
            op.n0()
        )));
    }

    let ball_radius = if nb > 0.0 { delta / (2.0 * nb) } else { f64::INFINITY };
    let bound_estl = norm_bound(nb, nc, delta)?.value;

    let solver = SylvesterFactorization::new(op.a0(), op.a1())?;
    let mut k = start.clone();
    let mut iterations = 0;
    let mut last_step = f64::INFINITY;
    while iterations < max_iter {
        let kbk = &(&k * op.b()) * &k;
        let next = solver.solve(&(op.c() - &kbk));
        let step = spectral_norm(&(&next - &k));
        k = next;
        iterations += 1;
        last_step = step;
        if step <= tol * spectral_norm(&k).max(1.0) {
            let residual = riccati_residual(&k, op);
            if residual <= 10.0 * tol * (1.0 + spectral_norm(op.c())) {
                let norm = spectral_norm(&k);
                return Ok(RiccatiSolution {
                    k,
                    iterations,
                    residual,
                    norm,
                    ball_radius,
                    bound_estl,
                });
            }
        }
    }
    Err(RiccatiError::NoConvergence { iterations: max_iter, last_step })
}

/// Solve the dual Riccati equation `K' A1 - A0 K' + K' C K' = B`, the same
/// fixed-point scheme with the roles of the two component spaces swapped.
/// For J-self-adjoint operators the result is verified to solve the primal
/// equation after taking adjoints (`K' = K†` by uniqueness in the ball).
pub fn solve_dual(
    op: &BlockOperator,
    delta: f64,
    tol: f64,
    max_iter: usize,
) -> Result<RiccatiSolution, RiccatiError> {
    let swapped = BlockOperator {
        a0: op.a1.clone(),
        a1: op.a0.clone(),
        b: op.c.clone(),
        c: op.b.clone(),
    };
    let sol = solve_fixed_point(&swapped, delta, tol, max_iter)?;
    if op.is_j_selfadjoint() {
        let primal_res = riccati_residual(&sol.k.adjoint(), op);
        let allow = 1e-8 * (1.0 + spectral_norm(op.c()));
        if primal_res > allow {
            return Err(RiccatiError::VerificationFailed(format!(
                "adjoint of dual solution has primal residual {primal_res:.3e} > {allow:.3e}"
            )));
        }
    }
    Ok(sol)
}

fn check_smallness(nb: f64, nc: f64, delta: f64) -> Result<(), RiccatiError> {
    if delta.is_nan() || delta <= 0.0 {
        return Err(RiccatiError::HypothesisViolated("delta must be positive".into()));
    }
    let g = (nb * nc).sqrt();
    if g >= delta / 2.0 {
        return Err(RiccatiError::HypothesisViolated(format!(
            "√(‖B‖‖C‖) = {:.6} must be < δ/2 = {:.6}",
            g,
            delta / 2.0
        )));
    }
    Ok(())
}

/// A priori norm bound `‖C‖ / (δ/2 + √(δ²/4 - ‖B‖‖C‖))` together with the
/// hypertrigonometric form `√(‖C‖/‖B‖) tanh(arctanh(2√(‖B‖‖C‖)/δ)/2)`
/// (defined for `B ≠ 0`).
pub fn norm_bound(norm_b: f64, norm_c: f64, delta: f64) -> Result<NormBound, RiccatiError> {
    check_smallness(norm_b, norm_c, delta)?;
    let root = (delta * delta / 4.0 - norm_b * norm_c).sqrt();
    let value = norm_c / (delta / 2.0 + root);
    let hyperbolic = if norm_b > 0.0 {
        let ratio = 2.0 * (norm_b * norm_c).sqrt() / delta;
        Some((norm_c / norm_b).sqrt() * (0.5 * ratio.atanh()).tanh())
    } else {
        None
    };
    Ok(NormBound { value, hyperbolic })
}

/// Contraction window `[lower, upper)` of admissible ball radii: the map
/// is a strict contraction of the radius-`r` ball into itself exactly for
/// `r` between the norm bound and `δ/(2‖B‖)`.
pub fn contraction_window(
    norm_b: f64,
    norm_c: f64,
    delta: f64,
) -> Result<(f64, f64), RiccatiError> {
    if norm_b <= 0.0 {
        return Err(RiccatiError::HypothesisViolated(
            "contraction window needs ‖B‖ > 0".into(),
        ));
    }
    let lower = norm_bound(norm_b, norm_c, delta)?.value;
    Ok((lower, delta / (2.0 * norm_b)))
}

/// Both roots of the scalar Riccati quadratic for the rank-one model with
/// subordinated entries at distance `d`:
/// `k1 = c/(d/2 + √(d²/4 - bc))` and `k2 = (d/2 + √(d²/4 - bc))/b`
/// (the numerically stable form of `c/(d/2 - √(d²/4 - bc))`).
pub fn scalar_closed_form(d: f64, b: f64, c: f64) -> Result<ScalarRoots, RiccatiError> {
    if d.is_nan() || d <= 0.0 || b.is_nan() || b <= 0.0 || c.is_nan() || c < 0.0 {
        return Err(RiccatiError::HypothesisViolated(
            "scalar closed form needs d > 0, b > 0, c ≥ 0".into(),
        ));
    }
    let disc = d * d / 4.0 - b * c;
    let boundary_tol = 1e-14 * d * d;
    if disc < -boundary_tol {
        return Err(RiccatiError::HypothesisViolated(format!(
            "√(bc) = {:.6} exceeds d/2 = {:.6}",
            (b * c).sqrt(),
            d / 2.0
        )));
    }
    let boundary = disc.abs() <= boundary_tol;
    let root = disc.max(0.0).sqrt();
    let k1 = c / (d / 2.0 + root);
    let k2 = (d / 2.0 + root) / b;
    Ok(ScalarRoots { k1, k2, boundary })
}
