//! Truncated quantum harmonic oscillator under a PT-symmetric perturbation.
//!
//! In units `ħ = m = ω = 1` the oscillator Hamiltonian is diagonal in the
//! Hermite-function basis with eigenvalues `n + 1/2`; even and odd states
//! span the two parity subspaces, the spectra interleave with distance
//! `d = 1`, and the parity operator is the natural involution of the split.
//! A bounded potential `V(x) = a(x) + i b(x)` with even `a` and odd `b` is
//! PT-symmetric; for `a = 0` its matrix is off-diagonal in the parity
//! blocks and J-self-adjoint, which feeds the truncated model straight
//! into the verification pipeline with generic disposition (`δ = 2/π`).
//!
//! Matrix elements are evaluated by Gauss-Hermite quadrature against
//! weight-compensated Hermite functions, all by stable three-term
//! recurrences on the normalized functions.

use thiserror::Error;

use crate::krein::{self, Involution, KreinError, KreinReport};
use crate::linalg::{hermitian_eig, quad, spectral_norm, CMatrix, Complex64, LinalgError};
use crate::riccati::{BlockOperator, RiccatiError};
use crate::sylvester::{Disposition, DispositionGuarantee};

#[derive(Debug, Error)]
pub enum OscillatorError {
    #[error("truncation level must be at least 2, got {0}")]
    TooSmall(usize),
    #[error("quadrature unstable: {0}")]
    QuadratureUnstable(String),
    #[error("potential violates PT parity: {0}")]
    ParityViolation(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error(transparent)]
    Krein(#[from] KreinError),
    #[error(transparent)]
    Riccati(#[from] RiccatiError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// The oscillator truncated to the first `n` Hermite levels, reordered so
/// even-parity states come first.
#[derive(Debug, Clone)]
pub struct OscillatorModel {
    n: usize,
    /// Maps parity-ordered index to the original Hermite index.
    parity_perm: Vec<usize>,
    a0: CMatrix,
    a1: CMatrix,
    j: Involution,
}

impl OscillatorModel {
    pub fn n(&self) -> usize {
        self.n
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

    pub fn involution(&self) -> Involution {
        self.j
    }

    pub fn parity_perm(&self) -> &[usize] {
        &self.parity_perm
    }

    /// Distance between the even and odd spectra of the truncation
    /// (equals 1 at every level).
    pub fn spectral_distance(&self) -> Result<f64, OscillatorError> {
        let s0 = hermitian_eig(&self.a0)?.eigenvalues;
        let s1 = hermitian_eig(&self.a1)?.eigenvalues;
        let mut d = f64::INFINITY;
        for &a in &s0 {
            for &b in &s1 {
                d = d.min((a - b).abs());
            }
        }
        Ok(d)
    }
}

/// Build the truncated model: diagonal `n + 1/2` in the Hermite basis,
/// parity-ordered into blocks of size ⌈N/2⌉ (even) and ⌊N/2⌋ (odd).
pub fn build_model(n: usize) -> Result<OscillatorModel, OscillatorError> {
    if n < 2 {
        return Err(OscillatorError::TooSmall(n));
    }
    let evens: Vec<usize> = (0..n).step_by(2).collect();
    let odds: Vec<usize> = (1..n).step_by(2).collect();
    let a0 = CMatrix::from_real_diag(&evens.iter().map(|&k| k as f64 + 0.5).collect::<Vec<_>>());
    let a1 = CMatrix::from_real_diag(&odds.iter().map(|&k| k as f64 + 0.5).collect::<Vec<_>>());
    let mut parity_perm = evens;
    let n0 = parity_perm.len();
    parity_perm.extend(odds);
    let j = Involution::new(n0, n - n0);
    Ok(OscillatorModel { n, parity_perm, a0, a1, j })
}

/// A PT-symmetric multiplication potential `V(x) = β (a(x) + i b(x))` with
/// even real `a` and odd real `b`. Parity is checked on a sample grid at
/// construction.
pub struct PTPotential {
    even: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    odd: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    beta: f64,
}

impl PTPotential {
    pub fn new(
        even: Box<dyn Fn(f64) -> f64 + Send + Sync>,
        odd: Box<dyn Fn(f64) -> f64 + Send + Sync>,
        beta: f64,
    ) -> Result<Self, OscillatorError> {
        for k in 0..40 {
            let x = 0.25 * (k as f64 + 0.5);
            let ea = (even(x) - even(-x)).abs();
            let eb = (odd(x) + odd(-x)).abs();
            let scale = even(x).abs().max(odd(x).abs()).max(1.0);
            if ea > 1e-10 * scale {
                return Err(OscillatorError::ParityViolation(format!(
                    "a({x}) differs from a(-{x}) by {ea:.3e}"
                )));
            }
            if eb > 1e-10 * scale {
                return Err(OscillatorError::ParityViolation(format!(
                    "b({x}) + b(-{x}) = {eb:.3e}"
                )));
            }
        }
        Ok(Self { even, odd, beta })
    }

    /// Purely off-diagonal potential `i β b(x)` with odd `b`.
    pub fn odd_only(
        odd: Box<dyn Fn(f64) -> f64 + Send + Sync>,
        beta: f64,
    ) -> Result<Self, OscillatorError> {
        Self::new(Box::new(|_| 0.0), odd, beta)
    }

    /// The default case-study potential `b(x) = x e^{-x²/2}`.
    pub fn xgauss(beta: f64) -> Self {
        Self::odd_only(Box::new(|x: f64| x * (-0.5 * x * x).exp()), beta)
            .expect("xgauss is odd by construction")
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn value(&self, x: f64) -> Complex64 {
        Complex64::new((self.even)(x), (self.odd)(x)) * self.beta
    }

    /// True when the even part vanishes on the sample grid, i.e. the
    /// matrix will be purely off-diagonal in the parity blocks.
    pub fn is_off_diagonal(&self) -> bool {
        (0..40).all(|k| ((self.even)(0.25 * (k as f64 + 0.5))).abs() <= 1e-14)
    }

    /// Largest |V(x)| over the sample grid, a lower bound for `sup |V|`.
    pub fn sup_sample(&self) -> f64 {
        (0..200)
            .map(|k| self.value(0.05 * k as f64).norm())
            .fold(0.0, f64::max)
    }
}

/// Normalized Hermite functions `h_0(x) .. h_{n-1}(x)` by the stable
/// recurrence `h_{k+1} = x √(2/(k+1)) h_k - √(k/(k+1)) h_{k-1}` seeded with
/// the Gaussian `h_0 = π^{-1/4} e^{-x²/2}`.
pub fn hermite_functions(n: usize, x: f64) -> Vec<f64> {
    let mut h = Vec::with_capacity(n);
    let h0 = std::f64::consts::PI.powf(-0.25) * (-0.5 * x * x).exp();
    h.push(h0);
    if n == 1 {
        return h;
    }
    h.push(std::f64::consts::SQRT_2 * x * h0);
    for k in 1..n - 1 {
        let kf = k as f64;
        let next = x * (2.0 / (kf + 1.0)).sqrt() * h[k] - (kf / (kf + 1.0)).sqrt() * h[k - 1];
        h.push(next);
    }
    h
}

/// Suggested Gauss-Hermite order for an `n`-level model: enough for
/// polynomial-times-Gaussian potentials and the smooth case-study `b`.
pub fn default_quad_points(n: usize) -> usize {
    2 * n + 64
}

/// Matrix of the multiplication operator `V(x) = β(a(x) + i b(x))` in the
/// parity-ordered truncated basis, by Gauss-Hermite quadrature with
/// weight-compensated Hermite functions:
/// `V_mn = Σ_i (w_i e^{x_i²}) h_m(x_i) V(x_i) h_n(x_i)`.
pub fn potential_matrix(
    model: &OscillatorModel,
    pot: &PTPotential,
    quad_points: usize,
) -> Result<CMatrix, OscillatorError> {
    let n = model.n();
    if quad_points < n {
        return Err(OscillatorError::QuadratureUnstable(format!(
            "{quad_points} nodes cannot resolve {n} basis functions"
        )));
    }
    let (nodes, weights) = quad::gauss_hermite(quad_points)
        .map_err(|e| OscillatorError::QuadratureUnstable(e.to_string()))?;

    // Compensated weights w e^{x²} stay O(1); failure to be finite and
    // positive signals quadrature breakdown at this order.
    let mut lambda = Vec::with_capacity(quad_points);
    for (&x, &w) in nodes.iter().zip(&weights) {
        let lw = w * (x * x).exp();
        if !lw.is_finite() || lw <= 0.0 {
            return Err(OscillatorError::QuadratureUnstable(format!(
                "compensated weight at node {x:.3} is {lw:.3e}"
            )));
        }
        lambda.push(lw);
    }

    let mut v = CMatrix::zeros(n, n);
    for (i, &x) in nodes.iter().enumerate() {
        let h = hermite_functions(n, x);
        let f = pot.value(x) * lambda[i];
        if f == Complex64::new(0.0, 0.0) {
            continue;
        }
        for m in 0..n {
            let hm = h[m];
            if hm == 0.0 {
                continue;
            }
            for nn in 0..n {
                v[(m, nn)] += f * (hm * h[nn]);
            }
        }
    }
    Ok(v.permute_symmetric(&model.parity_perm))
}

/// Run the truncated case through the verification pipeline with the
/// generic-disposition guarantee `δ = 2d/π` (the disposition of the full,
/// untruncated model). Requires a purely off-diagonal potential (`a = 0`).
/// Returns the report together with the assembled block operator so
/// callers can emit the truncated matrices.
pub fn run_case(
    model: &OscillatorModel,
    pot: &PTPotential,
    quad_points: usize,
) -> Result<(KreinReport, BlockOperator), OscillatorError> {
    run_case_tol(
        model,
        pot,
        quad_points,
        crate::riccati::DEFAULT_TOL,
        crate::riccati::DEFAULT_MAX_ITER,
    )
}

/// `run_case` with explicit Riccati solver tolerance and cap.
pub fn run_case_tol(
    model: &OscillatorModel,
    pot: &PTPotential,
    quad_points: usize,
    tol: f64,
    max_iter: usize,
) -> Result<(KreinReport, BlockOperator), OscillatorError> {
    if !pot.is_off_diagonal() {
        return Err(OscillatorError::HypothesisViolated(
            "the pipeline needs an off-diagonal potential (a = 0)".into(),
        ));
    }
    let v = potential_matrix(model, pot, quad_points)?;
    let n0 = model.n0();
    let n = model.n();

    // Parity selection makes the diagonal blocks vanish up to quadrature
    // rounding; anything visible means the quadrature broke down.
    let v00 = v.submatrix(0, n0, 0, n0);
    let v11 = v.submatrix(n0, n, n0, n);
    let scale = v.max_abs().max(1.0);
    let offdiag_defect = v00.max_abs().max(v11.max_abs());
    if offdiag_defect > 1e-10 * scale {
        return Err(OscillatorError::QuadratureUnstable(format!(
            "diagonal parity blocks reach {offdiag_defect:.3e}"
        )));
    }

    let b = v.submatrix(0, n0, n0, n);
    let c_block = v.submatrix(n0, n, 0, n0);
    let j_defect = spectral_norm(&(&c_block + &b.adjoint()));
    if j_defect > 1e-10 * scale {
        return Err(OscillatorError::QuadratureUnstable(format!(
            "J-self-adjointness defect {j_defect:.3e} after quadrature"
        )));
    }
    // Use the exact J-self-adjoint completion of the computed B block.
    let c_exact = b.adjoint().scale_re(-1.0);
    let op = BlockOperator::new(model.a0.clone(), model.a1.clone(), b, c_exact)?;

    let d = model.spectral_distance()?;
    let guarantee = DispositionGuarantee {
        disposition: Disposition::Generic,
        d,
        delta: 2.0 * d / std::f64::consts::PI,
    };
    let report = krein::verify_tpi_tol(&op, guarantee, tol, max_iter)?;
    Ok((report, op))
}
