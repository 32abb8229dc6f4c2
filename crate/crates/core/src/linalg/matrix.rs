//! Dense complex matrix type and factorizations (LU, thin QR).

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use super::LinalgError;

/// Dense complex matrix, row-major storage.
///
/// The universal operator representation of the crate: every block entry
/// (`A0`, `A1`, `B`, `C`), solution (`K`, `X`), similarity (`W`, `T`) and
/// projection lives in one of these.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.4e}{:+.4e}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl CMatrix {
    /// Build from a flat row-major entry list, validating shape and finiteness.
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self, LinalgError> {
        if entries.len() != rows * cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} needs {} entries, got {}",
                rows,
                cols,
                rows * cols,
                entries.len()
            )));
        }
        for (k, z) in entries.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(LinalgError::NonFinite(k / cols.max(1), k % cols.max(1)));
            }
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: vec![Complex64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self { rows, cols, entries }
    }

    /// Square matrix with the given complex diagonal.
    pub fn from_diag(diag: &[Complex64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Square matrix with the given real diagonal.
    pub fn from_real_diag(diag: &[f64]) -> Self {
        Self::from_diag(&diag.iter().map(|&d| Complex64::new(d, 0.0)).collect::<Vec<_>>())
    }

    /// Build from rows of real numbers (test convenience).
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = if r > 0 { rows[0].len() } else { 0 };
        Self::from_fn(r, c, |i, j| Complex64::new(rows[i][j], 0.0))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn diag(&self) -> Vec<Complex64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)].conj())
    }

    /// Conjugate transpose `M†`.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, z: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|&e| e * z).collect(),
        }
    }

    pub fn scale_re(&self, x: f64) -> Self {
        self.scale(Complex64::new(x, 0.0))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> Complex64 {
        self.diag().iter().sum()
    }

    /// Hermiticity defect `‖M − M†‖_F`.
    pub fn hermiticity_defect(&self) -> f64 {
        (self - &self.adjoint()).frobenius_norm()
    }

    pub fn is_hermitian(&self, rel: f64) -> bool {
        self.is_square() && self.hermiticity_defect() <= rel * self.frobenius_norm().max(1.0)
    }

    /// `(M + M†)/2`.
    pub fn hermitian_part(&self) -> Self {
        (self + &self.adjoint()).scale_re(0.5)
    }

    /// True when every off-diagonal entry is exactly zero.
    pub fn is_exactly_diagonal(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| i == j || self[(i, j)] == Complex64::new(0.0, 0.0))
            })
    }

    pub fn submatrix(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Self {
        Self::from_fn(r1 - r0, c1 - c0, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn set_submatrix(&mut self, r0: usize, c0: usize, block: &CMatrix) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(r0 + i, c0 + j)] = block[(i, j)];
            }
        }
    }

    /// Assemble `[[m00, m01], [m10, m11]]`.
    pub fn block2x2(m00: &CMatrix, m01: &CMatrix, m10: &CMatrix, m11: &CMatrix) -> Self {
        assert_eq!(m00.rows, m01.rows);
        assert_eq!(m10.rows, m11.rows);
        assert_eq!(m00.cols, m10.cols);
        assert_eq!(m01.cols, m11.cols);
        let mut m = Self::zeros(m00.rows + m10.rows, m00.cols + m01.cols);
        m.set_submatrix(0, 0, m00);
        m.set_submatrix(0, m00.cols, m01);
        m.set_submatrix(m00.rows, 0, m10);
        m.set_submatrix(m00.rows, m00.cols, m11);
        m
    }

    /// Stack vertically: `[top; bottom]`.
    pub fn vstack(top: &CMatrix, bottom: &CMatrix) -> Self {
        assert_eq!(top.cols, bottom.cols);
        let mut m = Self::zeros(top.rows + bottom.rows, top.cols);
        m.set_submatrix(0, 0, top);
        m.set_submatrix(top.rows, 0, bottom);
        m
    }

    /// Concatenate horizontally: `[left, right]`.
    pub fn hstack(left: &CMatrix, right: &CMatrix) -> Self {
        assert_eq!(left.rows, right.rows);
        let mut m = Self::zeros(left.rows, left.cols + right.cols);
        m.set_submatrix(0, 0, left);
        m.set_submatrix(0, left.cols, right);
        m
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    /// Apply a symmetric permutation `P M Pᵀ` where `P` maps old index
    /// `perm[k]` to new index `k`.
    pub fn permute_symmetric(&self, perm: &[usize]) -> Self {
        assert!(self.is_square());
        Self::from_fn(self.rows, self.cols, |i, j| self[(perm[i], perm[j])])
    }

    pub fn matmul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(
            self.cols, other.rows,
            "matmul: {}x{} * {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let mut out = CMatrix::zeros(self.rows, other.cols);
        // ikj loop order keeps the inner traversal contiguous.
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let src = &other.entries[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.entries[i * other.cols..(i + 1) * other.cols];
                for (d, s) in dst.iter_mut().zip(src.iter()) {
                    *d += a * s;
                }
            }
        }
        out
    }

    /// Matrix-vector product.
    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// LU factorization with partial pivoting.
    pub fn lu(&self) -> Result<Lu, LinalgError> {
        Lu::new(self)
    }

    /// Inverse through LU; prefer closed forms where the formulas exist.
    pub fn inverse(&self) -> Result<CMatrix, LinalgError> {
        self.lu()?.inverse()
    }

    pub fn determinant(&self) -> Result<Complex64, LinalgError> {
        Ok(self.lu()?.det())
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.entries[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.entries[i * self.cols + j]
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        self.scale_re(-1.0)
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs)
    }
}

/// LU factorization with partial pivoting, `PA = LU`.
pub struct Lu {
    lu: CMatrix,
    perm: Vec<usize>,
    swaps: usize,
    min_pivot: f64,
}

impl Lu {
    pub fn new(a: &CMatrix) -> Result<Self, LinalgError> {
        assert!(a.is_square(), "LU requires a square matrix");
        let n = a.rows;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        let mut min_pivot = f64::INFINITY;
        let scale = a.max_abs().max(f64::MIN_POSITIVE);

        for k in 0..n {
            let mut p = k;
            let mut pmax = lu[(k, k)].norm();
            for i in k + 1..n {
                let v = lu[(i, k)].norm();
                if v > pmax {
                    pmax = v;
                    p = i;
                }
            }
            if pmax <= f64::EPSILON * scale * (n as f64) {
                return Err(LinalgError::Singular(pmax));
            }
            min_pivot = min_pivot.min(pmax);
            if p != k {
                perm.swap(p, k);
                swaps += 1;
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
            }
            let piv = lu[(k, k)];
            for i in k + 1..n {
                let m = lu[(i, k)] / piv;
                lu[(i, k)] = m;
                if m != Complex64::new(0.0, 0.0) {
                    let (head, tail) = lu.entries.split_at_mut(i * n);
                    let krow = &head[k * n + k + 1..k * n + n];
                    let irow = &mut tail[k + 1..n];
                    for (d, s) in irow.iter_mut().zip(krow.iter()) {
                        *d -= m * s;
                    }
                }
            }
        }
        Ok(Self { lu, perm, swaps, min_pivot })
    }

    pub fn min_pivot(&self) -> f64 {
        self.min_pivot
    }

    pub fn solve_vec(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.lu.rows;
        assert_eq!(b.len(), n);
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 1..n {
            let mut s = x[i];
            for (j, xj) in x.iter().enumerate().take(i) {
                s -= self.lu[(i, j)] * xj;
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for (j, xj) in x.iter().enumerate().take(n).skip(i + 1) {
                s -= self.lu[(i, j)] * xj;
            }
            x[i] = s / self.lu[(i, i)];
        }
        x
    }

    /// Solve `AX = B` column by column.
    pub fn solve_mat(&self, b: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(b.rows(), b.cols());
        for j in 0..b.cols() {
            let col = self.solve_vec(&b.column(j));
            for (i, v) in col.into_iter().enumerate() {
                out[(i, j)] = v;
            }
        }
        out
    }

    pub fn inverse(&self) -> Result<CMatrix, LinalgError> {
        Ok(self.solve_mat(&CMatrix::identity(self.lu.rows())))
    }

    pub fn det(&self) -> Complex64 {
        let mut d = Complex64::new(if self.swaps.is_multiple_of(2) { 1.0 } else { -1.0 }, 0.0);
        for i in 0..self.lu.rows() {
            d *= self.lu[(i, i)];
        }
        d
    }
}

/// Thin QR of a tall matrix: returns `Q` with orthonormal columns spanning
/// the column space (Householder reflections).
pub fn qr_thin_q(a: &CMatrix) -> CMatrix {
    let (m, k) = (a.rows(), a.cols());
    assert!(m >= k, "qr_thin_q expects a tall matrix");
    let mut r = a.clone();
    // Store the reflector vectors to apply them to the identity afterwards.
    let mut reflectors: Vec<Vec<Complex64>> = Vec::with_capacity(k);
    for j in 0..k {
        let mut v: Vec<Complex64> = (j..m).map(|i| r[(i, j)]).collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            reflectors.push(vec![Complex64::new(0.0, 0.0); m - j]);
            continue;
        }
        let phase = if v[0].norm() > 0.0 { v[0] / v[0].norm() } else { Complex64::new(1.0, 0.0) };
        let alpha = -phase * norm;
        v[0] -= alpha;
        let vnorm2 = v.iter().map(|z| z.norm_sqr()).sum::<f64>();
        if vnorm2 > 0.0 {
            let beta = 2.0 / vnorm2;
            for c in j..k {
                let dot: Complex64 = (0..m - j).map(|i| v[i].conj() * r[(j + i, c)]).sum();
                let f = dot * beta;
                for i in 0..m - j {
                    let upd = f * v[i];
                    r[(j + i, c)] -= upd;
                }
            }
        }
        reflectors.push(v);
    }
    // Q = H_0 H_1 ... H_{k-1} applied to the first k columns of I.
    let mut q = CMatrix::from_fn(m, k, |i, j| {
        if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) }
    });
    for j in (0..k).rev() {
        let v = &reflectors[j];
        let vnorm2 = v.iter().map(|z| z.norm_sqr()).sum::<f64>();
        if vnorm2 == 0.0 {
            continue;
        }
        let beta = 2.0 / vnorm2;
        for c in 0..k {
            let dot: Complex64 = (0..m - j).map(|i| v[i].conj() * q[(j + i, c)]).sum();
            let f = dot * beta;
            for i in 0..m - j {
                let upd = f * v[i];
                q[(j + i, c)] -= upd;
            }
        }
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn new_rejects_bad_shapes_and_nan() {
        assert!(CMatrix::new(2, 2, vec![c(1.0, 0.0); 3]).is_err());
        let mut e = vec![c(1.0, 0.0); 4];
        e[2] = c(f64::NAN, 0.0);
        assert!(matches!(CMatrix::new(2, 2, e), Err(LinalgError::NonFinite(1, 0))));
    }

    #[test]
    fn matmul_and_adjoint() {
        let a = CMatrix::from_fn(2, 3, |i, j| c((i + j) as f64, i as f64 - j as f64));
        let b = CMatrix::from_fn(3, 2, |i, j| c(1.0, (i * j) as f64));
        let p = &a * &b;
        assert_eq!(p.rows(), 2);
        // (AB)† = B†A†
        let lhs = p.adjoint();
        let rhs = &b.adjoint() * &a.adjoint();
        assert!((&lhs - &rhs).frobenius_norm() < 1e-14);
    }

    #[test]
    fn lu_solves_and_det() {
        let a = CMatrix::from_fn(4, 4, |i, j| {
            c(((i * 7 + j * 3) % 5) as f64 + if i == j { 6.0 } else { 0.0 }, (i as f64) - (j as f64))
        });
        let lu = a.lu().unwrap();
        let b: Vec<Complex64> = (0..4).map(|i| c(i as f64, 1.0)).collect();
        let x = lu.solve_vec(&b);
        let r = a.matvec(&x);
        let err: f64 = r.iter().zip(&b).map(|(u, v)| (u - v).norm()).sum();
        assert!(err < 1e-12, "residual {err}");

        let inv = lu.inverse().unwrap();
        let id = &a * &inv;
        assert!((&id - &CMatrix::identity(4)).frobenius_norm() < 1e-12);

        // det of triangular-ish known case
        let t = CMatrix::from_real_rows(&[&[2.0, 1.0], &[0.0, 3.0]]);
        assert!((t.determinant().unwrap() - c(6.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn lu_singular_detected() {
        let a = CMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 4.0]]);
        assert!(matches!(a.lu(), Err(LinalgError::Singular(_))));
    }

    #[test]
    fn qr_gives_orthonormal_basis() {
        let a = CMatrix::from_fn(5, 3, |i, j| c((i as f64 + 1.0) * (j as f64 + 1.0), i as f64 - 2.0 * j as f64));
        let q = qr_thin_q(&a);
        let g = &q.adjoint() * &q;
        assert!((&g - &CMatrix::identity(3)).frobenius_norm() < 1e-13);
        // Range check: columns of A must be reproduced by Q Q† A.
        let pa = &(&q * &q.adjoint()) * &a;
        assert!((&pa - &a).frobenius_norm() < 1e-12);
    }

    #[test]
    fn permute_symmetric_reorders() {
        let a = CMatrix::from_real_rows(&[&[0.0, 1.0, 2.0], &[10.0, 11.0, 12.0], &[20.0, 21.0, 22.0]]);
        let p = a.permute_symmetric(&[2, 0, 1]);
        assert_eq!(p[(0, 0)], c(22.0, 0.0));
        assert_eq!(p[(0, 1)], c(20.0, 0.0));
        assert_eq!(p[(1, 2)], c(1.0, 0.0));
    }
}
