//! Dense complex linear algebra kernels.
//!
//! Everything else in the crate works on finite sections of operators, and
//! those sections all live in [`CMatrix`]. The eigensolvers are written
//! in-house: Householder tridiagonalization followed by implicit QL for
//! Hermitian input, Hessenberg reduction followed by Wilkinson-shifted QR for
//! general input.

mod general;
mod hermitian;
mod lu;
mod polar;
mod svd;

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use general::{general_eig, generalized_eig, hessenberg_eigenvalues};
pub use hermitian::{
    hermitian_eig, hermitian_eigvals, hermitian_lambda_max, symmetric_tridiagonal_max, tridiagonal_count_above,
    HermitianEig,
};
pub use lu::Lu;
pub use polar::{hpd_invsqrt, polar_multiplier};
pub use svd::{singular_values, smallest_singular_value, svd, Svd};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Relative tolerance used by [`CMatrix::is_hermitian`].
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Condition number above which `generalized_eig` refuses to invert `B`.
pub const SINGULAR_B_COND: f64 = 1e10;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum KernelError {
    #[error("matrix is not Hermitian (max |M - M*| = {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("eigenvalue iteration did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("B is singular or ill-conditioned (cond = {cond:e})")]
    SingularB { cond: f64 },
    #[error("matrix is not positive definite (min eigenvalue = {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {left:?} vs {right:?}")]
    DimensionMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("matrix is singular at pivot {pivot}")]
    Singular { pivot: usize },
}

/// Dense complex matrix stored row-major.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows.min(8) {
            write!(f, "  ")?;
            for j in 0..self.cols.min(8) {
                let z = self[(i, j)];
                write!(f, "{:>10.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_diag(diag: &[C64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let d: Vec<C64> = diag.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::from_diag(&d)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row slices. Panics on ragged input.
    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self {
            rows: r,
            cols: c,
            data: rows.concat(),
        }
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Self {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Self {
        assert_eq!(rows * cols, data.len(), "entry count must equal rows*cols");
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [C64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn diag(&self) -> Vec<C64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn trace(&self) -> C64 {
        self.diag().into_iter().sum()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, z: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x * z).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    /// `self + z·I`.
    pub fn shift(&self, z: C64) -> Self {
        let mut m = self.clone();
        for i in 0..self.rows.min(self.cols) {
            m[(i, i)] += z;
        }
        m
    }

    /// `self - λ·other`, the pencil evaluated at `λ`.
    pub fn sub_scaled(&self, lambda: C64, other: &CMatrix) -> Self {
        assert_eq!(self.shape(), other.shape());
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a - lambda * b)
                .collect(),
        }
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(&a, &b)| a * b).sum())
            .collect()
    }

    /// `⟨Mx, x⟩ = x* M x`.
    pub fn quadratic_form(&self, x: &[C64]) -> C64 {
        let mx = self.matvec(x);
        mx.iter().zip(x).map(|(&a, &b)| a * b.conj()).sum()
    }

    pub fn matmul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a == ZERO {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// Principal submatrix on the given index set (compression to a
    /// coordinate subspace).
    pub fn principal_submatrix(&self, idx: &[usize]) -> CMatrix {
        CMatrix::from_fn(idx.len(), idx.len(), |i, j| self[(idx[i], idx[j])])
    }

    pub fn submatrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> CMatrix {
        CMatrix::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn norm_max(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn norm_fro(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn norm_1(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Spectral norm (largest singular value).
    pub fn norm_2(&self) -> f64 {
        if self.data.is_empty() {
            return 0.0;
        }
        if self.is_diagonal() {
            return self.diag().iter().map(|z| z.norm()).fold(0.0, f64::max);
        }
        if self.rows.min(self.cols) <= 96 {
            return singular_values(self).into_iter().fold(0.0, f64::max);
        }
        // ‖M‖² = λ_max(M*M).
        let gram = self.adjoint().matmul(self);
        match hermitian_lambda_max(&gram) {
            Ok(l) => l.max(0.0).sqrt(),
            Err(_) => self.norm_fro(),
        }
    }

    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// `max|M − M*| ≤ 1e-12·‖M‖_max`.
    pub fn is_hermitian(&self) -> bool {
        self.is_square() && self.hermitian_deviation() <= HERMITIAN_TOL * self.norm_max()
    }

    pub fn is_diagonal(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| self.row(i).iter().enumerate().all(|(j, z)| i == j || *z == ZERO))
    }

    /// True when every entry with `|i − j| > 1` is exactly zero.
    pub fn is_tridiagonal(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                self.row(i)
                    .iter()
                    .enumerate()
                    .all(|(j, z)| i.abs_diff(j) <= 1 || *z == ZERO)
            })
    }

    /// True when every entry below the first subdiagonal is exactly zero.
    pub fn is_upper_hessenberg(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i.saturating_sub(1)).all(|j| self[(i, j)] == ZERO))
    }

    /// Is the matrix a scalar multiple of the identity? Returns the scalar.
    pub fn as_scalar(&self) -> Option<C64> {
        if !self.is_diagonal() || self.rows == 0 {
            return None;
        }
        let d = self[(0, 0)];
        self.diag().iter().all(|&z| z == d).then_some(d)
    }

    /// Hermitian part of `e^{-iθ}·M`, i.e. `cos θ·Re M + sin θ·Im M`.
    pub fn rotated_hermitian_part(&self, theta: f64) -> CMatrix {
        let rot = C64::from_polar(1.0, -theta);
        let n = self.rows;
        CMatrix::from_fn(n, n, |i, j| (rot * self[(i, j)] + (rot * self[(j, i)]).conj()) * 0.5)
    }

    /// Row scaling `diag(d)·M`.
    pub fn scale_rows(&self, d: &[C64]) -> CMatrix {
        assert_eq!(d.len(), self.rows);
        CMatrix::from_fn(self.rows, self.cols, |i, j| d[i] * self[(i, j)])
    }

    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!(self.shape(), other.shape());
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Determinant via LU with partial pivoting.
    pub fn det(&self) -> Result<C64, KernelError> {
        Ok(Lu::factor(self)?.det())
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.shape(), rhs.shape());
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.shape(), rhs.shape());
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs)
    }
}

pub(crate) fn ensure_square(m: &CMatrix) -> Result<usize, KernelError> {
    if m.is_square() {
        Ok(m.rows)
    } else {
        Err(KernelError::NotSquare {
            rows: m.rows,
            cols: m.cols,
        })
    }
}

pub fn vec_norm(x: &[C64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn dot(x: &[C64], y: &[C64]) -> C64 {
    // ⟨x, y⟩ linear in the first argument.
    x.iter().zip(y).map(|(&a, &b)| a * b.conj()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn structure_predicates() {
        let d = CMatrix::from_real_diag(&[1.0, 2.0, 3.0]);
        assert!(d.is_diagonal() && d.is_tridiagonal() && d.is_hermitian());
        assert_eq!(
            CMatrix::identity(3).scale_real(2.5).as_scalar(),
            Some(C64::new(2.5, 0.0))
        );
        let j = CMatrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]);
        assert!(!j.is_hermitian());
        assert!(j.is_upper_hessenberg());
        assert_eq!(j.as_scalar(), None);
    }

    #[test]
    fn rotated_hermitian_part_matches_definition() {
        let m = CMatrix::from_rows(&[
            vec![C64::new(1.0, 2.0), C64::new(0.5, -1.0)],
            vec![C64::new(3.0, 0.0), C64::new(-1.0, 1.0)],
        ]);
        let theta = 0.7;
        let rot = C64::from_polar(1.0, -theta);
        let direct = &m.scale(rot) + &m.scale(rot).adjoint();
        let h = m.rotated_hermitian_part(theta);
        assert!(h.max_abs_diff(&direct.scale_real(0.5)) < 1e-15);
        assert!(h.is_hermitian());
    }

    #[test]
    fn quadratic_form_is_rayleigh_numerator() {
        let m = CMatrix::from_real_diag(&[2.0, 4.0]);
        let x = [C64::new(0.6, 0.0), C64::new(0.0, 0.8)];
        let q = m.quadratic_form(&x);
        assert!((q - C64::new(2.0 * 0.36 + 4.0 * 0.64, 0.0)).norm() < 1e-15);
    }
}
