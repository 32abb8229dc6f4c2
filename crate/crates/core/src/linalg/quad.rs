//! Gauss quadrature rules used by the semigroup integral and the
//! oscillator matrix elements.

use super::matrix::CMatrix;
use super::LinalgError;

/// Nodes and weights of an n-point Gauss-Legendre rule on [-1, 1],
/// by Newton iteration on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi-style initial guess for the i-th positive root.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_and_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
        let (_, d) = legendre_and_derivative(n, 0.0);
        weights[n / 2] = 2.0 / (d * d);
    }
    (nodes, weights)
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = (n as f64) * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Nodes and weights of an n-point Gauss-Hermite rule (weight e^{-x²}),
/// via the Golub-Welsch eigenproblem for the Jacobi matrix.
///
/// Errors with `NotPositive` when a weight underflows to zero, which caps
/// the usable order around n ≈ 350 in double precision.
pub fn gauss_hermite(n: usize) -> Result<(Vec<f64>, Vec<f64>), LinalgError> {
    assert!(n >= 1);
    // Jacobi matrix: zero diagonal, off-diagonal sqrt(k/2).
    let mut jacobi = CMatrix::zeros(n, n);
    for k in 1..n {
        let b = (k as f64 / 2.0).sqrt();
        jacobi[(k, k - 1)] = num_complex::Complex64::new(b, 0.0);
        jacobi[(k - 1, k)] = num_complex::Complex64::new(b, 0.0);
    }
    let eig = super::eig::hermitian_eig(&jacobi)?;
    let mu0 = std::f64::consts::PI.sqrt();
    let mut weights = Vec::with_capacity(n);
    for j in 0..n {
        let v0 = eig.vectors[(0, j)].norm_sqr();
        let w = mu0 * v0;
        if !(w.is_finite() && w > 0.0) {
            return Err(LinalgError::NotPositive(w));
        }
        weights.push(w);
    }
    Ok((eig.eigenvalues, weights))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_integrates_polynomials_exactly() {
        // n-point rule is exact through degree 2n-1.
        let (x, w) = gauss_legendre(5);
        let integral: f64 = x.iter().zip(&w).map(|(&xi, &wi)| wi * xi.powi(8)).sum();
        assert!((integral - 2.0 / 9.0).abs() < 1e-14);
        let total: f64 = w.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
    }

    #[test]
    fn legendre_32_point_smooth_integrand() {
        let (x, w) = gauss_legendre(32);
        // ∫_{-1}^{1} e^x dx = e - 1/e.
        let integral: f64 = x.iter().zip(&w).map(|(&xi, &wi)| wi * xi.exp()).sum();
        assert!((integral - (1.0f64.exp() - (-1.0f64).exp())).abs() < 1e-14);
    }

    #[test]
    fn hermite_moments() {
        let (x, w) = gauss_hermite(12).unwrap();
        // ∫ e^{-x²} dx = √π, ∫ x² e^{-x²} dx = √π/2, odd moments vanish.
        let m0: f64 = w.iter().sum();
        let m1: f64 = x.iter().zip(&w).map(|(&xi, &wi)| wi * xi).sum();
        let m2: f64 = x.iter().zip(&w).map(|(&xi, &wi)| wi * xi * xi).sum();
        let sqrt_pi = std::f64::consts::PI.sqrt();
        assert!((m0 - sqrt_pi).abs() < 1e-13);
        assert!(m1.abs() < 1e-13);
        assert!((m2 - sqrt_pi / 2.0).abs() < 1e-13);
    }

    #[test]
    fn hermite_nodes_symmetric() {
        let (x, _) = gauss_hermite(21).unwrap();
        for i in 0..x.len() {
            assert!((x[i] + x[x.len() - 1 - i]).abs() < 1e-12);
        }
    }
}
