//! Sylvester equation `X A0 - A1 X = Y` solved three independent ways:
//!
//! * `solve_kron` — dense LU on the vectorized (Kronecker) system; the
//!   brute-force oracle the other two are checked against.
//! * `solve_contour` — trapezoidal evaluation of the resolvent contour
//!   integral `(2πi)⁻¹ ∮ (A1-z)⁻¹ Y (A0-z)⁻¹ dz` over a circle enclosing
//!   `spec(A1)` and excluding `spec(A0)`.
//! * `solve_semigroup` — Gauss-Legendre evaluation of
//!   `X = -∫₀^∞ e^{-A1 t} Y e^{A0 t} dt`, valid under the dissipativity
//!   margin `Re spec(A0) ≤ -δ/2 < δ/2 ≤ Re spec(A1)`, with the norm
//!   guarantee `‖X‖ ≤ ‖Y‖/δ`.
//!
//! `guarantee` classifies the mutual disposition of two Hermitian spectra
//! and yields the invertibility bound `‖S⁻¹‖ ≤ 1/δ` for the Sylvester
//! operator `S(X) = X A0 - A1 X`, with `δ = 2d/π` in the generic case and
//! the stronger `δ = d` when the spectra are subordinated or one lies in a
//! finite gap of the other.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{
    self, general_eig, hermitian_eig, matrix_exp, spectral_norm, CMatrix, LinalgError,
    HERMITICITY_TOL,
};

const CONTOUR_START_NODES: usize = 64;
const CONTOUR_MAX_NODES: usize = 4096;
const SEMIGROUP_MAX_PANELS: usize = 512;
const PANEL_POINTS: usize = 32;

#[derive(Debug, Error)]
pub enum SylvesterError {
    #[error("spectra of A0 and A1 share an eigenvalue within tolerance (distance {0:.3e})")]
    SingularOperator(f64),
    #[error("no separating circle exists for the computed spectra: {0}")]
    ContourConflict(String),
    #[error("quadrature did not stabilize within {0} nodes")]
    NoConvergence(usize),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("spectra touch: distance {0:.3e} is below tolerance")]
    TouchingSpectra(f64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// The data of `X A0 - A1 X = Y`: `A0` is n0 x n0, `A1` is n1 x n1 and
/// `Y` (like the solution `X`) maps the first space to the second, n1 x n0.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SylvesterProblem {
    pub a0: CMatrix,
    pub a1: CMatrix,
    pub y: CMatrix,
}

impl SylvesterProblem {
    pub fn new(a0: CMatrix, a1: CMatrix, y: CMatrix) -> Result<Self, SylvesterError> {
        if !a0.is_square() || !a1.is_square() {
            return Err(SylvesterError::DimensionMismatch("A0 and A1 must be square".into()));
        }
        if y.rows() != a1.rows() || y.cols() != a0.rows() {
            return Err(SylvesterError::DimensionMismatch(format!(
                "Y must be {}x{}, got {}x{}",
                a1.rows(),
                a0.rows(),
                y.rows(),
                y.cols()
            )));
        }
        Ok(Self { a0, a1, y })
    }

    fn n0(&self) -> usize {
        self.a0.rows()
    }

    fn n1(&self) -> usize {
        self.a1.rows()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMethod {
    Kron,
    Contour,
    Semigroup,
}

/// A solved instance: `X`, the method that produced it, the residual
/// `‖X A0 - A1 X - Y‖` and how many quadrature nodes were spent (0 for the
/// direct Kronecker solve). `norm_bound` carries `‖Y‖/δ` when the method
/// certifies it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SylvesterSolution {
    pub x: CMatrix,
    pub method: SolveMethod,
    pub residual: f64,
    pub quadrature_nodes: usize,
    pub norm_bound: Option<f64>,
}

/// Mutual arrangement of two Hermitian spectra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Disposition {
    Generic,
    Subordinated,
    AnnularGap,
}

/// Distance `d` between the spectra and the certified bound `‖S⁻¹‖ ≤ 1/δ`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DispositionGuarantee {
    pub disposition: Disposition,
    pub d: f64,
    pub delta: f64,
}

/// Residual `‖X A0 - A1 X - Y‖` (spectral norm).
pub fn residual(p: &SylvesterProblem, x: &CMatrix) -> f64 {
    spectral_norm(&(&(&(x * &p.a0) - &(&p.a1 * x)) - &p.y))
}

/// The vectorized Sylvester matrix `A0ᵀ ⊗ I - I ⊗ A1` acting on
/// column-stacked `vec(X)`.
pub fn kron_matrix(a0: &CMatrix, a1: &CMatrix) -> CMatrix {
    let n0 = a0.rows();
    let n1 = a1.rows();
    let n = n0 * n1;
    let mut m = CMatrix::zeros(n, n);
    for j in 0..n0 {
        for i in 0..n1 {
            let row = j * n1 + i;
            for l in 0..n0 {
                let col = l * n1 + i;
                m[(row, col)] += a0[(l, j)];
            }
            for k in 0..n1 {
                let col = j * n1 + k;
                m[(row, col)] -= a1[(i, k)];
            }
        }
    }
    m
}

pub(crate) fn vec_of(x: &CMatrix) -> Vec<Complex64> {
    let mut v = Vec::with_capacity(x.rows() * x.cols());
    for j in 0..x.cols() {
        for i in 0..x.rows() {
            v.push(x[(i, j)]);
        }
    }
    v
}

pub(crate) fn unvec(v: &[Complex64], rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |i, j| v[j * rows + i])
}

fn spectrum(a: &CMatrix) -> Result<Vec<Complex64>, LinalgError> {
    if a.is_hermitian(HERMITICITY_TOL) {
        Ok(hermitian_eig(a)?.eigenvalues.iter().map(|&l| Complex64::new(l, 0.0)).collect())
    } else {
        Ok(general_eig(a)?.eigenvalues)
    }
}

fn min_spectral_distance(s0: &[Complex64], s1: &[Complex64]) -> f64 {
    let mut d = f64::INFINITY;
    for &a in s0 {
        for &b in s1 {
            d = d.min((a - b).norm());
        }
    }
    d
}

fn shared_spectrum_tol(p: &SylvesterProblem) -> f64 {
    1e-10 * (1.0 + spectral_norm(&p.a0) + spectral_norm(&p.a1))
}

/// Direct solve of the vectorized system. The oracle method: exact up to
/// LU roundoff, no quadrature involved.
pub fn solve_kron(p: &SylvesterProblem) -> Result<SylvesterSolution, SylvesterError> {
    let s0 = spectrum(&p.a0)?;
    let s1 = spectrum(&p.a1)?;
    let d = min_spectral_distance(&s0, &s1);
    if d <= shared_spectrum_tol(p) {
        return Err(SylvesterError::SingularOperator(d));
    }
    let m = kron_matrix(&p.a0, &p.a1);
    let lu = m.lu().map_err(|_| SylvesterError::SingularOperator(d))?;
    let xv = lu.solve_vec(&vec_of(&p.y));
    let x = unvec(&xv, p.n1(), p.n0());
    let res = residual(p, &x);
    Ok(SylvesterSolution {
        x,
        method: SolveMethod::Kron,
        residual: res,
        quadrature_nodes: 0,
        norm_bound: None,
    })
}

/// Contour-integral solve over a circle centered on the real hull of
/// `spec(A1)` with radius extended by `d/2`, so both resolvents stay
/// bounded by `2/d` on the contour. When the A1-hull circle cannot avoid
/// `spec(A0)` (the annular-gap layout), the complementary circle around
/// `spec(A0)` is used instead: the two encirclements realize the same
/// winding data up to a vanishing circle at infinity, and hence the same
/// solution. Node count starts at `nodes` and doubles until two successive
/// evaluations agree.
pub fn solve_contour(
    p: &SylvesterProblem,
    nodes: usize,
) -> Result<SylvesterSolution, SylvesterError> {
    let s0 = spectrum(&p.a0)?;
    let s1 = spectrum(&p.a1)?;
    let d = min_spectral_distance(&s0, &s1);
    if d <= shared_spectrum_tol(p) {
        return Err(SylvesterError::SingularOperator(d));
    }

    // (enclosed set, excluded set, sign): encircling spec(A1) needs the
    // compensating minus sign because (2πi)⁻¹∮(A1 - z)⁻¹dz = -I for a
    // counterclockwise circle with the (A - z)⁻¹ resolvent convention;
    // encircling spec(A0) instead yields +Y directly.
    let candidates: [(&[Complex64], &[Complex64], f64); 2] =
        [(&s1, &s0, -1.0), (&s0, &s1, 1.0)];
    let mut chosen = None;
    for (inside, outside, sign) in candidates {
        let re_min = inside.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
        let re_max = inside.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
        let center = Complex64::new(0.5 * (re_min + re_max), 0.0);
        let r_in = inside.iter().map(|z| (z - center).norm()).fold(0.0, f64::max);
        let radius = r_in + 0.5 * d;
        // The excluded spectrum must stay at least d/2 outside the circle.
        let clearance = outside.iter().map(|z| (z - center).norm()).fold(f64::INFINITY, f64::min);
        if clearance >= radius + 0.5 * d - 1e-12 * (1.0 + radius) {
            chosen = Some((center, radius, sign));
            break;
        }
    }
    let Some((center, radius, sign)) = chosen else {
        return Err(SylvesterError::ContourConflict(
            "neither spectral hull admits a circle clearing the other spectrum by d/2".into(),
        ));
    };

    let eval = |m: usize| -> Result<CMatrix, SylvesterError> {
        let mut acc = CMatrix::zeros(p.n1(), p.n0());
        for k in 0..m {
            let theta = 2.0 * std::f64::consts::PI * (k as f64) / (m as f64);
            let w = Complex64::new(0.0, theta).exp();
            let z = center + w * radius;
            let r1m = resolvent(&p.a1, z)?;
            let r0m = resolvent(&p.a0, z)?;
            let term = &(&r1m * &p.y) * &r0m;
            acc = &acc + &term.scale(w);
        }
        Ok(acc.scale_re(sign * radius / m as f64))
    };

    let mut m = nodes.max(2);
    let mut current = eval(m)?;
    while 2 * m <= CONTOUR_MAX_NODES {
        let next = eval(2 * m)?;
        let diff = (&next - &current).frobenius_norm();
        let settled = diff <= 1e-11 * (1.0 + next.frobenius_norm());
        current = next;
        m *= 2;
        if settled {
            let res = residual(p, &current);
            return Ok(SylvesterSolution {
                x: current,
                method: SolveMethod::Contour,
                residual: res,
                quadrature_nodes: m,
                norm_bound: None,
            });
        }
    }
    Err(SylvesterError::NoConvergence(CONTOUR_MAX_NODES))
}

fn resolvent(a: &CMatrix, z: Complex64) -> Result<CMatrix, SylvesterError> {
    let shifted = a - &CMatrix::from_diag(&vec![z; a.rows()]);
    Ok(shifted.lu()?.inverse()?)
}

/// Semigroup-integral solve `X = -∫₀^T e^{-A1 t} Y e^{A0 t} dt` by composite
/// Gauss-Legendre panels; `T = (2/δ) ln((1+‖Y‖)/tol)` truncates the tail
/// below the stopping tolerance. Requires the dissipativity margins
/// `spec(A0) ≤ -δ/2` and `spec(A1) ≥ δ/2` (Hermitian-part check for
/// non-Hermitian entries). The certified bound `‖X‖ ≤ ‖Y‖/δ` is reported
/// in `norm_bound`.
pub fn solve_semigroup(
    p: &SylvesterProblem,
    delta: f64,
) -> Result<SylvesterSolution, SylvesterError> {
    if delta.is_nan() || delta <= 0.0 {
        return Err(SylvesterError::HypothesisViolated("delta must be positive".into()));
    }
    let margin_tol = 1e-10 * (1.0 + spectral_norm(&p.a0) + spectral_norm(&p.a1));

    // Dissipativity margin via the Hermitian parts (equals the spectral
    // bound for Hermitian entries, the numerical-range bound otherwise).
    let h0 = hermitian_eig(&p.a0.hermitian_part())?;
    let h1 = hermitian_eig(&p.a1.hermitian_part())?;
    if h0.max() > -0.5 * delta + margin_tol {
        return Err(SylvesterError::HypothesisViolated(format!(
            "numerical range of A0 reaches {:.6}, needs ≤ -delta/2 = {:.6}",
            h0.max(),
            -0.5 * delta
        )));
    }
    if h1.min() < 0.5 * delta - margin_tol {
        return Err(SylvesterError::HypothesisViolated(format!(
            "numerical range of A1 reaches {:.6}, needs ≥ delta/2 = {:.6}",
            h1.min(),
            0.5 * delta
        )));
    }

    let ynorm = spectral_norm(&p.y);
    let bound = ynorm / delta;
    if ynorm == 0.0 {
        return Ok(SylvesterSolution {
            x: CMatrix::zeros(p.n1(), p.n0()),
            method: SolveMethod::Semigroup,
            residual: 0.0,
            quadrature_nodes: 0,
            norm_bound: Some(bound),
        });
    }

    let tol: f64 = 1e-12;
    let horizon = (2.0 / delta) * ((1.0 + ynorm) / tol).ln();
    let (gl_nodes, gl_weights) = linalg::quad::gauss_legendre(PANEL_POINTS);

    // Hermitian entries admit the exact per-node exponential through their
    // eigendecompositions; otherwise fall back to matrix_exp per node.
    let herm = p.a0.is_hermitian(HERMITICITY_TOL) && p.a1.is_hermitian(HERMITICITY_TOL);
    let eig0 = if herm { Some(hermitian_eig(&p.a0.hermitian_part())?) } else { None };
    let eig1 = if herm { Some(hermitian_eig(&p.a1.hermitian_part())?) } else { None };

    let integrand = |t: f64| -> CMatrix {
        match (&eig0, &eig1) {
            (Some(e0), Some(e1)) => {
                let d0 = CMatrix::from_real_diag(
                    &e0.eigenvalues.iter().map(|&l| (l * t).exp()).collect::<Vec<_>>(),
                );
                let d1 = CMatrix::from_real_diag(
                    &e1.eigenvalues.iter().map(|&l| (-l * t).exp()).collect::<Vec<_>>(),
                );
                let exp0 = &(&e0.vectors * &d0) * &e0.vectors.adjoint();
                let exp1 = &(&e1.vectors * &d1) * &e1.vectors.adjoint();
                &(&exp1 * &p.y) * &exp0
            }
            _ => {
                let exp0 = matrix_exp(&p.a0.scale_re(t));
                let exp1 = matrix_exp(&p.a1.scale_re(-t));
                &(&exp1 * &p.y) * &exp0
            }
        }
    };

    let eval = |panels: usize| -> CMatrix {
        let mut acc = CMatrix::zeros(p.n1(), p.n0());
        let width = horizon / panels as f64;
        for pi in 0..panels {
            let a = pi as f64 * width;
            let mid = a + 0.5 * width;
            let half = 0.5 * width;
            for (xi, wi) in gl_nodes.iter().zip(&gl_weights) {
                let t = mid + half * xi;
                acc = &acc + &integrand(t).scale_re(wi * half);
            }
        }
        acc.scale_re(-1.0)
    };

    let mut panels = 4;
    let mut current = eval(panels);
    while 2 * panels <= SEMIGROUP_MAX_PANELS {
        let next = eval(2 * panels);
        let diff = (&next - &current).frobenius_norm();
        let settled = diff <= tol * (1.0 + next.frobenius_norm());
        current = next;
        panels *= 2;
        if settled {
            let res = residual(p, &current);
            return Ok(SylvesterSolution {
                x: current,
                method: SolveMethod::Semigroup,
                residual: res,
                quadrature_nodes: panels * PANEL_POINTS,
                norm_bound: Some(bound),
            });
        }
    }
    Err(SylvesterError::NoConvergence(SEMIGROUP_MAX_PANELS * PANEL_POINTS))
}

/// All pairwise differences `spec(A0) - spec(A1)`: the spectrum of the
/// Sylvester operator in finite dimension.
pub fn sylvester_eigenvalues(a0: &CMatrix, a1: &CMatrix) -> Result<Vec<Complex64>, SylvesterError> {
    let s0 = spectrum(a0)?;
    let s1 = spectrum(a1)?;
    let mut out = Vec::with_capacity(s0.len() * s1.len());
    for &l0 in &s0 {
        for &l1 in &s1 {
            out.push(l0 - l1);
        }
    }
    Ok(out)
}

/// Classify the disposition of two real (Hermitian) spectra and return the
/// certified `δ`: `d` for the subordinated and annular-gap cases, `2d/π`
/// otherwise. Subordination is checked first; both (S)-cases share `δ = d`.
pub fn guarantee(spec0: &[f64], spec1: &[f64]) -> Result<DispositionGuarantee, SylvesterError> {
    if spec0.is_empty() || spec1.is_empty() {
        return Err(SylvesterError::DimensionMismatch("empty spectrum".into()));
    }
    let mut d = f64::INFINITY;
    for &a in spec0 {
        for &b in spec1 {
            d = d.min((a - b).abs());
        }
    }
    let scale = spec0.iter().chain(spec1).map(|v| v.abs()).fold(0.0, f64::max);
    if d <= 1e-10 * (1.0 + scale) {
        return Err(SylvesterError::TouchingSpectra(d));
    }

    let (min0, max0) = bounds(spec0);
    let (min1, max1) = bounds(spec1);
    let disposition = if max0 < min1 || max1 < min0 {
        Disposition::Subordinated
    } else if !spec1.iter().any(|&v| min0 <= v && v <= max0)
        || !spec0.iter().any(|&v| min1 <= v && v <= max1)
    {
        Disposition::AnnularGap
    } else {
        Disposition::Generic
    };
    let delta = match disposition {
        Disposition::Generic => 2.0 * d / std::f64::consts::PI,
        _ => d,
    };
    Ok(DispositionGuarantee { disposition, d, delta })
}

fn bounds(s: &[f64]) -> (f64, f64) {
    let min = s.iter().copied().fold(f64::INFINITY, f64::min);
    let max = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (min, max)
}

/// Default starting node count for `solve_contour`.
pub fn contour_default_nodes() -> usize {
    CONTOUR_START_NODES
}
