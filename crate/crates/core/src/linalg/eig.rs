//! Eigendecompositions: Hermitian (Householder tridiagonalization + implicit
//! QL with Wilkinson shifts) and general complex (Hessenberg reduction +
//! single-shift QR, eigenvectors by back-substitution on the Schur factor).

use num_complex::Complex64;

use super::matrix::CMatrix;
use super::{LinalgError, HERMITICITY_TOL};

/// Spectral decomposition of a Hermitian matrix: `M = U diag(λ) U†`.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    /// Ascending real eigenvalues.
    pub eigenvalues: Vec<f64>,
    /// Unitary matrix whose columns are the eigenvectors.
    pub vectors: CMatrix,
}

/// Eigendecomposition of a general square complex matrix.
#[derive(Debug, Clone)]
pub struct GeneralEig {
    /// Eigenvalues with multiplicity, sorted by (re, im).
    pub eigenvalues: Vec<Complex64>,
    /// Unit-norm right eigenvectors (columns), aligned with `eigenvalues`.
    pub vectors: CMatrix,
    /// 2-norm condition number of the eigenvector matrix; large values flag
    /// non-diagonalizable (or nearly so) inputs.
    pub condition: f64,
}

impl HermitianEig {
    pub fn min(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }
}

/// Diagonalize a Hermitian matrix.
///
/// Inputs with hermiticity defect within `HERMITICITY_TOL * max(1, ‖M‖)` are
/// symmetrized to `(M + M†)/2` before reduction; anything worse is rejected.
pub fn hermitian_eig(m: &CMatrix) -> Result<HermitianEig, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::DimensionMismatch(format!(
            "hermitian_eig needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let scale = m.frobenius_norm().max(1.0);
    let defect = m.hermiticity_defect();
    let tol = HERMITICITY_TOL * scale;
    if defect > tol {
        return Err(LinalgError::NonHermitian { defect, tol });
    }
    let n = m.rows();
    if n == 0 {
        return Ok(HermitianEig { eigenvalues: vec![], vectors: CMatrix::zeros(0, 0) });
    }
    let h = m.hermitian_part();
    let (t, mut q) = hessenberg(&h);

    // A Hermitian Hessenberg form is tridiagonal; pull out the real diagonal
    // and rotate the subdiagonal phases into Q so the subdiagonal is real.
    let mut d: Vec<f64> = (0..n).map(|i| t[(i, i)].re).collect();
    let mut e = vec![0.0f64; n];
    let mut phase = Complex64::new(1.0, 0.0);
    for k in 0..n - 1 {
        let sub = t[(k + 1, k)];
        let a = sub.norm();
        e[k] = a;
        let next_phase = if a > 0.0 { phase * (sub / a) } else { phase };
        if next_phase != Complex64::new(1.0, 0.0) {
            for r in 0..n {
                let v = q[(r, k + 1)] * next_phase;
                q[(r, k + 1)] = v;
            }
        }
        phase = next_phase;
    }

    tridiagonal_ql(&mut d, &mut e, &mut q)?;

    // Sort ascending, carrying eigenvector columns along.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| q[(i, order[j])]);

    Ok(HermitianEig { eigenvalues, vectors })
}

/// Eigenvalues and right eigenvectors of a general square complex matrix.
pub fn general_eig(m: &CMatrix) -> Result<GeneralEig, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::DimensionMismatch(format!(
            "general_eig needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    if n == 0 {
        return Ok(GeneralEig {
            eigenvalues: vec![],
            vectors: CMatrix::zeros(0, 0),
            condition: 1.0,
        });
    }
    let (t, q) = schur(m)?;
    let raw_vectors = eigenvectors_from_schur(&t, &q);
    let raw_values: Vec<Complex64> = t.diag();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        (raw_values[a].re, raw_values[a].im)
            .partial_cmp(&(raw_values[b].re, raw_values[b].im))
            .unwrap()
    });
    let eigenvalues: Vec<Complex64> = order.iter().map(|&i| raw_values[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| raw_vectors[(i, order[j])]);

    let sv = singular_values(&vectors)?;
    let smax = sv.first().copied().unwrap_or(0.0);
    let smin = sv.last().copied().unwrap_or(0.0);
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };

    Ok(GeneralEig { eigenvalues, vectors, condition })
}

/// Largest singular value, computed from the Hermitian Gram matrix.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.rows() == 0 || m.cols() == 0 {
        return 0.0;
    }
    // Use the smaller Gram matrix of the two.
    let gram = if m.rows() <= m.cols() { m * &m.adjoint() } else { &m.adjoint() * m };
    let eig = hermitian_eig(&gram).expect("Gram matrix is Hermitian by construction");
    eig.max().max(0.0).sqrt()
}

/// All `min(rows, cols)` singular values, descending.
pub fn singular_values(m: &CMatrix) -> Result<Vec<f64>, LinalgError> {
    let gram = if m.rows() <= m.cols() { m * &m.adjoint() } else { &m.adjoint() * m };
    let eig = hermitian_eig(&gram)?;
    let mut sv: Vec<f64> = eig.eigenvalues.iter().map(|&l| l.max(0.0).sqrt()).collect();
    sv.reverse();
    Ok(sv)
}

/// Smallest singular value of a square matrix (invertibility margin).
pub fn min_singular_value(m: &CMatrix) -> Result<f64, LinalgError> {
    Ok(singular_values(m)?.last().copied().unwrap_or(0.0))
}

/// Hessenberg reduction by Householder reflections: `M = P H P†` with `H`
/// upper Hessenberg and `P` unitary.
pub fn hessenberg(a: &CMatrix) -> (CMatrix, CMatrix) {
    let n = a.rows();
    let mut h = a.clone();
    let mut p = CMatrix::identity(n);
    if n < 3 {
        return (h, p);
    }
    for k in 0..n - 2 {
        let m = n - (k + 1);
        let mut v: Vec<Complex64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let phase =
            if v[0].norm() > 0.0 { v[0] / v[0].norm() } else { Complex64::new(1.0, 0.0) };
        let alpha = -phase * norm;
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let beta = 2.0 / vnorm2;

        // Left update: rows k+1.. of columns k.. (earlier columns are zero).
        for c in k..n {
            let mut dot = Complex64::new(0.0, 0.0);
            for i in 0..m {
                dot += v[i].conj() * h[(k + 1 + i, c)];
            }
            let f = dot * beta;
            for i in 0..m {
                let upd = f * v[i];
                h[(k + 1 + i, c)] -= upd;
            }
        }
        // Right update: columns k+1.. of every row.
        for r in 0..n {
            let mut dot = Complex64::new(0.0, 0.0);
            for i in 0..m {
                dot += h[(r, k + 1 + i)] * v[i];
            }
            let f = dot * beta;
            for i in 0..m {
                let upd = f * v[i].conj();
                h[(r, k + 1 + i)] -= upd;
            }
        }
        // Accumulate P <- P * reflector.
        for r in 0..n {
            let mut dot = Complex64::new(0.0, 0.0);
            for i in 0..m {
                dot += p[(r, k + 1 + i)] * v[i];
            }
            let f = dot * beta;
            for i in 0..m {
                let upd = f * v[i].conj();
                p[(r, k + 1 + i)] -= upd;
            }
        }
        // Entries below the subdiagonal are zero by construction.
        h[(k + 1, k)] = alpha;
        for i in k + 2..n {
            h[(i, k)] = Complex64::new(0.0, 0.0);
        }
    }
    (h, p)
}

/// Complex Schur decomposition `M = Q T Q†` (T upper triangular) by
/// single-shift QR iteration with Wilkinson and occasional exceptional shifts.
pub fn schur(a: &CMatrix) -> Result<(CMatrix, CMatrix), LinalgError> {
    let n = a.rows();
    let (mut h, mut q) = hessenberg(a);
    if n <= 1 {
        return Ok((h, q));
    }
    let hnorm = h.frobenius_norm();
    if hnorm == 0.0 {
        return Ok((h, q));
    }

    let mut ihi = n;
    let mut iters_here = 0usize;
    const MAX_ITERS_PER_EIGENVALUE: usize = 60;
    while ihi > 1 {
        // Deflation scan: zero negligible subdiagonals in the trailing block.
        let mut l = ihi - 1;
        while l > 0 {
            let mut tst = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            if tst == 0.0 {
                tst = hnorm;
            }
            if h[(l, l - 1)].norm() <= f64::EPSILON * tst {
                h[(l, l - 1)] = Complex64::new(0.0, 0.0);
                break;
            }
            l -= 1;
        }
        if l == ihi - 1 {
            ihi -= 1;
            iters_here = 0;
            continue;
        }

        iters_here += 1;
        if iters_here > MAX_ITERS_PER_EIGENVALUE {
            return Err(LinalgError::NoConvergence(MAX_ITERS_PER_EIGENVALUE));
        }
        let sigma = if iters_here.is_multiple_of(10) {
            // Exceptional shift to break potential cycles.
            let extra = h[(ihi - 1, ihi - 2)].norm()
                + if ihi > 2 && ihi - 2 > l { h[(ihi - 2, ihi - 3)].norm() } else { 0.0 };
            h[(ihi - 1, ihi - 1)] + Complex64::new(0.75 * extra, 0.0)
        } else {
            wilkinson_shift(
                h[(ihi - 2, ihi - 2)],
                h[(ihi - 2, ihi - 1)],
                h[(ihi - 1, ihi - 2)],
                h[(ihi - 1, ihi - 1)],
            )
        };
        single_shift_sweep(&mut h, &mut q, l, ihi, sigma);
    }

    // Clean the strict lower triangle.
    for i in 0..n {
        for j in 0..i {
            h[(i, j)] = Complex64::new(0.0, 0.0);
        }
    }
    Ok((h, q))
}

/// Eigenvalue of `[[a, b], [c, d]]` closest to `d`.
fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let t = (a - d) * 0.5;
    let s = (t * t + b * c).sqrt();
    if (t - s).norm() <= (t + s).norm() {
        d + (t - s)
    } else {
        d + (t + s)
    }
}

/// Complex Givens rotation `G = [[c, s], [-conj(s), c]]` (c real) with
/// `G (a, b)ᵀ = (r, 0)ᵀ`.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let an = a.norm();
    let bn = b.norm();
    if bn == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    if an == 0.0 {
        return (0.0, b.conj() / bn);
    }
    let t = an.hypot(bn);
    let c = an / t;
    let s = (a / an) * b.conj() / t;
    (c, s)
}

/// One implicit single-shift QR sweep on the active block `l..ihi`.
fn single_shift_sweep(h: &mut CMatrix, q: &mut CMatrix, l: usize, ihi: usize, sigma: Complex64) {
    let n = h.rows();
    let mut x = h[(l, l)] - sigma;
    let mut y = h[(l + 1, l)];
    for k in l..ihi - 1 {
        let (c, s) = givens(x, y);
        let sc = s.conj();

        // Left: rows k, k+1 from the first structurally nonzero column.
        let c0 = if k > l { k - 1 } else { l };
        for col in c0..n {
            let hk = h[(k, col)];
            let hk1 = h[(k + 1, col)];
            h[(k, col)] = hk * c + s * hk1;
            h[(k + 1, col)] = hk1 * c - sc * hk;
        }
        // Right: columns k, k+1; rows up to the bulge row.
        let rend = (k + 3).min(n);
        for row in 0..rend {
            let hk = h[(row, k)];
            let hk1 = h[(row, k + 1)];
            h[(row, k)] = hk * c + sc * hk1;
            h[(row, k + 1)] = hk1 * c - s * hk;
        }
        // Accumulate Q <- Q G†.
        for row in 0..n {
            let qk = q[(row, k)];
            let qk1 = q[(row, k + 1)];
            q[(row, k)] = qk * c + sc * qk1;
            q[(row, k + 1)] = qk1 * c - s * qk;
        }
        if k > l {
            // The bulge at (k+1, k-1) is annihilated by construction.
            h[(k + 1, k - 1)] = Complex64::new(0.0, 0.0);
        }
        if k + 2 < ihi {
            x = h[(k + 1, k)];
            y = h[(k + 2, k)];
        }
    }
}

/// Right eigenvectors from a Schur decomposition by back-substitution on the
/// triangular factor: for each k solve `(T - λ_k) y = 0` with `y_k = 1`,
/// then map back with Q. Tiny pivots are replaced by a floor so defective
/// eigenvalues yield (nearly parallel) vectors instead of dividing by zero.
fn eigenvectors_from_schur(t: &CMatrix, q: &CMatrix) -> CMatrix {
    let n = t.rows();
    let tnorm = t.frobenius_norm();
    let smin = (f64::EPSILON * tnorm).max(f64::MIN_POSITIVE * 1e16);
    let mut vectors = CMatrix::zeros(n, n);
    let mut y = vec![Complex64::new(0.0, 0.0); n];
    for k in 0..n {
        let lam = t[(k, k)];
        for v in y.iter_mut() {
            *v = Complex64::new(0.0, 0.0);
        }
        y[k] = Complex64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let mut s = t[(i, k)];
            for j in i + 1..k {
                s += t[(i, j)] * y[j];
            }
            let mut den = t[(i, i)] - lam;
            if den.norm() < smin {
                den = Complex64::new(smin, 0.0);
            }
            y[i] = -s / den;
            // Guard against overflow in long near-defective chains.
            if y[i].norm() > 1e120 {
                let scale = 1.0 / y[i].norm();
                for v in y[i..=k].iter_mut() {
                    *v *= scale;
                }
            }
        }
        let v = q.matvec(&y);
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let inv = if norm > 0.0 { 1.0 / norm } else { 1.0 };
        for (i, z) in v.into_iter().enumerate() {
            vectors[(i, k)] = z * inv;
        }
    }
    vectors
}

/// Implicit-shift QL iteration for a real symmetric tridiagonal matrix,
/// rotations accumulated into the (complex) column basis `q`.
///
/// `d` holds the diagonal, `e[0..n-1]` the subdiagonal (`e[n-1]` scratch).
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64], q: &mut CMatrix) -> Result<(), LinalgError> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 50 {
                return Err(LinalgError::NoConvergence(50));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            let denom = g + if g >= 0.0 { r.abs() } else { -r.abs() };
            g = d[m] - d[l] + e[l] / denom;
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut broke_early = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    broke_early = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for row in 0..q.rows() {
                    let qi1 = q[(row, i + 1)];
                    let qi = q[(row, i)];
                    q[(row, i + 1)] = qi.scale(s) + qi1.scale(c);
                    q[(row, i)] = qi.scale(c) - qi1.scale(s);
                }
            }
            if broke_early {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Deterministic pseudo-random stream for test matrices.
    struct Lcg(u64);
    impl Lcg {
        fn next_f64(&mut self) -> f64 {
            self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((self.0 >> 11) as f64) / ((1u64 << 53) as f64) * 2.0 - 1.0
        }
        fn next_c(&mut self) -> Complex64 {
            c(self.next_f64(), self.next_f64())
        }
    }

    fn random_hermitian(n: usize, seed: u64) -> CMatrix {
        let mut rng = Lcg(seed);
        let a = CMatrix::from_fn(n, n, |_, _| rng.next_c());
        a.hermitian_part()
    }

    #[test]
    fn hermitian_diagonal_input() {
        let m = CMatrix::from_real_diag(&[3.0, 1.0, 2.0]);
        let eig = hermitian_eig(&m).unwrap();
        assert_eq!(eig.eigenvalues.len(), 3);
        for (got, want) in eig.eigenvalues.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn hermitian_symmetry_forced_pair() {
        let m = CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let eig = hermitian_eig(&m).unwrap();
        assert!((eig.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((eig.eigenvalues[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn hermitian_reconstruction_oracle() {
        for seed in [1u64, 7, 42] {
            let m = random_hermitian(6, seed);
            let eig = hermitian_eig(&m).unwrap();
            let u = &eig.vectors;
            let lam = CMatrix::from_real_diag(&eig.eigenvalues);
            let recon = &(u * &lam) * &u.adjoint();
            let scale = m.frobenius_norm();
            assert!(
                (&recon - &m).frobenius_norm() <= 1e-12 * scale.max(1.0),
                "reconstruction failed for seed {seed}"
            );
            let gram = &u.adjoint() * u;
            assert!((&gram - &CMatrix::identity(6)).frobenius_norm() <= 1e-12);
        }
    }

    #[test]
    fn hermitian_rejects_asymmetric() {
        let m = CMatrix::from_real_rows(&[&[0.0, 1.0], &[2.0, 0.0]]);
        assert!(matches!(hermitian_eig(&m), Err(LinalgError::NonHermitian { .. })));
    }

    #[test]
    fn general_triangular_input() {
        let m = CMatrix::from_real_rows(&[&[1.0, 5.0, -2.0], &[0.0, 4.0, 1.0], &[0.0, 0.0, -3.0]]);
        let eig = general_eig(&m).unwrap();
        let mut re: Vec<f64> = eig.eigenvalues.iter().map(|z| z.re).collect();
        re.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (got, want) in re.iter().zip([-3.0, 1.0, 4.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn general_complex_pair() {
        // [[-1, 2], [-2, 1]] has eigenvalues ±i√3.
        let m = CMatrix::from_real_rows(&[&[-1.0, 2.0], &[-2.0, 1.0]]);
        let eig = general_eig(&m).unwrap();
        let target = 3.0f64.sqrt();
        let mut ims: Vec<f64> = eig.eigenvalues.iter().map(|z| z.im).collect();
        ims.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((ims[0] + target).abs() < 1e-12);
        assert!((ims[1] - target).abs() < 1e-12);
        for z in &eig.eigenvalues {
            assert!(z.re.abs() < 1e-12);
        }
    }

    #[test]
    fn general_jordan_block_flags_condition() {
        let m = CMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let eig = general_eig(&m).unwrap();
        for z in &eig.eigenvalues {
            assert!(z.norm() < 1e-12);
        }
        assert!(eig.condition > 1e8, "condition {}", eig.condition);
    }

    #[test]
    fn general_residual_trace_and_det() {
        let mut rng = Lcg(99);
        let m = CMatrix::from_fn(7, 7, |_, _| rng.next_c());
        let eig = general_eig(&m).unwrap();
        let scale = m.frobenius_norm();

        // Per-pair residual ‖Mv - λv‖.
        for (j, lam) in eig.eigenvalues.iter().enumerate() {
            let v = eig.vectors.column(j);
            let mv = m.matvec(&v);
            let res: f64 = mv
                .iter()
                .zip(&v)
                .map(|(a, b)| (a - lam * b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(res <= 1e-10 * scale, "pair {j} residual {res}");
        }

        // Eigenvalue sum = trace.
        let sum: Complex64 = eig.eigenvalues.iter().sum();
        assert!((sum - m.trace()).norm() <= 1e-10 * scale);

        // Eigenvalue product = determinant.
        let prod: Complex64 = eig.eigenvalues.iter().product();
        let det = m.determinant().unwrap();
        assert!((prod - det).norm() <= 1e-8 * det.norm().max(1.0));
    }

    #[test]
    fn schur_factorization_is_similar() {
        let mut rng = Lcg(3);
        let m = CMatrix::from_fn(8, 8, |_, _| rng.next_c());
        let (t, q) = schur(&m).unwrap();
        let recon = &(&q * &t) * &q.adjoint();
        assert!((&recon - &m).frobenius_norm() <= 1e-12 * m.frobenius_norm());
        let gram = &q.adjoint() * &q;
        assert!((&gram - &CMatrix::identity(8)).frobenius_norm() <= 1e-12);
        for i in 0..8 {
            for j in 0..i {
                assert_eq!(t[(i, j)], c(0.0, 0.0));
            }
        }
    }

    #[test]
    fn spectral_norm_cases() {
        let m = CMatrix::from_real_diag(&[1.0, -3.0, 2.0]);
        assert!((spectral_norm(&m) - 3.0).abs() < 1e-12);

        // Rank one u v†.
        let u = CMatrix::from_fn(4, 1, |i, _| c(i as f64 + 1.0, -(i as f64)));
        let v = CMatrix::from_fn(3, 1, |i, _| c(0.5 - i as f64, 1.0));
        let outer = &u * &v.adjoint();
        let unorm = u.frobenius_norm();
        let vnorm = v.frobenius_norm();
        assert!((spectral_norm(&outer) - unorm * vnorm).abs() < 1e-12 * unorm * vnorm);
    }

    #[test]
    fn spectral_norm_matches_hermitian_dilation() {
        let mut rng = Lcg(17);
        let m = CMatrix::from_fn(5, 3, |_, _| rng.next_c());
        let zero_tl = CMatrix::zeros(5, 5);
        let zero_br = CMatrix::zeros(3, 3);
        let dilation = CMatrix::block2x2(&zero_tl, &m, &m.adjoint(), &zero_br);
        let eig = hermitian_eig(&dilation).unwrap();
        let lam_max = eig.max();
        assert!((spectral_norm(&m) - lam_max).abs() <= 1e-10 * lam_max.max(1.0));
    }

    #[test]
    fn repeated_eigenvalues_diagonalizable_input() {
        // diag(1, 1, 2) is diagonalizable; condition stays modest.
        let m = CMatrix::from_real_diag(&[1.0, 1.0, 2.0]);
        let eig = general_eig(&m).unwrap();
        assert!(eig.condition < 1e3, "condition {}", eig.condition);
    }
}
