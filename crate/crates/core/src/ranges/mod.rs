//! Numerical ranges of matrices and pencils.
//!
//! `W(A,B) = {λ : 0 ∈ closure W(A − λB)}`. Membership is decided per `λ` by
//! a [`PencilOracle`] that picks the cheapest exact route for the pencil's
//! structure; everything else (rasters, boundaries, resolvent bounds) is
//! built on top of it.

mod oracle;
mod pencil;
mod qnr;
mod shape;
mod tail;

use std::f64::consts::{PI, TAU};

use crate::matkernel::{CMatrix, KernelError, C64};
use crate::region::{geometry, RegionError, SupportFn, DEFAULT_ANGLES};

pub use oracle::{hull_distance_to_origin, PencilOracle};
pub use pencil::{pencil_range, pencil_range_with_tol, refine_boundary, resolvent_bound, w_range_hpd, ResolventBound};
pub use qnr::{qnr_pair, qnr_sample};
pub use tail::{ess_range_tail, TailOptions};

use shape::Shape;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RangeError {
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Region(#[from] RegionError),
    #[error("pencil members have shapes {a:?} and {b:?}")]
    DimensionMismatch { a: (usize, usize), b: (usize, usize) },
    #[error("family has no coordinate structure for tail compressions: {0}")]
    UnsupportedFamily(String),
    #[error("invalid block split {p} of a {n}x{n} matrix")]
    InvalidBlocks { p: usize, n: usize },
    #[error("tail window does not fit: {0}")]
    InvalidWindow(String),
    #[error(transparent)]
    Gallery(#[from] Box<crate::gallery::GalleryError>),
}

impl From<crate::gallery::GalleryError> for RangeError {
    fn from(e: crate::gallery::GalleryError) -> Self {
        RangeError::Gallery(Box::new(e))
    }
}

/// Finite section `(A, B)` of the pencil `λ ↦ A − λB`.
#[derive(Debug, Clone, PartialEq)]
pub struct PencilSection {
    pub a: CMatrix,
    pub b: CMatrix,
}

impl PencilSection {
    pub fn new(a: CMatrix, b: CMatrix) -> Result<Self, RangeError> {
        if !a.is_square() || a.shape() != b.shape() {
            return Err(RangeError::DimensionMismatch {
                a: a.shape(),
                b: b.shape(),
            });
        }
        Ok(Self { a, b })
    }

    /// `(A, I)`.
    pub fn operator(a: CMatrix) -> Self {
        let n = a.rows();
        Self {
            a,
            b: CMatrix::identity(n),
        }
    }

    pub fn dim(&self) -> usize {
        self.a.rows()
    }

    pub fn at(&self, lambda: C64) -> CMatrix {
        self.a.sub_scaled(lambda, &self.b)
    }

    /// Compression to a coordinate subspace.
    pub fn compress(&self, idx: &[usize]) -> PencilSection {
        PencilSection {
            a: self.a.principal_submatrix(idx),
            b: self.b.principal_submatrix(idx),
        }
    }

    pub fn generalized_eigenvalues(&self) -> Result<Vec<C64>, KernelError> {
        crate::matkernel::generalized_eig(&self.a, &self.b)
    }
}

/// Support function of `W(M)` on `k` angles.
pub fn nrange_with(m: &CMatrix, k: usize) -> Result<SupportFn, RangeError> {
    crate::matkernel::ensure_square(m)?;
    let shape = Shape::of(m);
    if let Shape::Diagonal(d) = &shape {
        return Ok(SupportFn::from_points(d, k));
    }
    let values = (0..k)
        .map(|i| shape.support(TAU * i as f64 / k as f64))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SupportFn::from_values(values))
}

/// Support function of `W(M)` on the default angle grid.
pub fn nrange(m: &CMatrix) -> Result<SupportFn, RangeError> {
    nrange_with(m, DEFAULT_ANGLES)
}

/// Is `0` within `tol` of `W(M)`: `min_θ h_M(θ) ≥ −tol`.
///
/// Diagonal (normal) input uses the exact hull distance. Otherwise the angle
/// grid is scanned starting opposite `tr M`, where a separating direction
/// usually sits, and stops at the first separating angle. A failed
/// eigensolve counts as membership.
pub fn zero_in_nrange(m: &CMatrix, tol: f64) -> bool {
    zero_in_shape(&Shape::of(m), tol, DEFAULT_ANGLES)
}

pub(crate) fn zero_in_shape(shape: &Shape, tol: f64, k: usize) -> bool {
    if let Shape::Diagonal(d) = shape {
        return hull_distance_to_origin(d) <= tol;
    }
    let tr = shape.trace();
    let start = if tr.norm() > 0.0 { tr.arg() + PI } else { 0.0 };
    if let Shape::Dense(m) = shape {
        if m.rows() <= 64 && k >= 8 {
            // support points lie in W, so 0 near their hull settles membership
            let mut pts = Vec::with_capacity(8);
            for j in 0..8 {
                let theta = start + TAU * (j * k / 8) as f64 / k as f64;
                if let Some((h, p)) = shape.support_point(theta) {
                    if h < -tol {
                        return false;
                    }
                    pts.push(p);
                }
            }
            if hull_distance_to_origin(&pts) <= tol {
                return true;
            }
        }
    }
    for i in 0..k {
        // interleave around the starting direction
        let step = (i + 1) / 2;
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        let theta = start + sign * TAU * step as f64 / k as f64;
        match shape.support(theta) {
            Ok(h) if h < -tol => return false,
            _ => {}
        }
    }
    true
}

/// Euclidean distance from `z` to the circumscribed polygon of `s`.
pub fn support_distance(s: &SupportFn, z: C64) -> f64 {
    let hull = geometry::convex_hull(&s.polygon());
    geometry::polygon_distance(z, &hull)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::region::support_contains;

    #[test]
    fn diagonal_range_is_interval() {
        let n = 50;
        let d: Vec<f64> = (1..=n).map(|k| 1.0 + 1.0 / k as f64).collect();
        let s = nrange(&CMatrix::from_real_diag(&d)).unwrap();
        let (lo, hi) = s.real_extent();
        assert!((lo - (1.0 + 1.0 / n as f64)).abs() < 1e-12);
        assert!((hi - 2.0).abs() < 1e-12);
    }

    #[test]
    fn jordan_block_is_half_disk() {
        let j = CMatrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]);
        let s = nrange(&j).unwrap();
        assert!(s.values().iter().all(|&h| (h - 0.5).abs() < 1e-12));
    }

    #[test]
    fn normal_matrix_gives_triangle() {
        let m = CMatrix::from_diag(&[C64::new(0.0, 0.0), C64::new(0.0, 1.0), C64::new(1.0, 0.0)]);
        let s = nrange(&m).unwrap();
        assert!(support_contains(&s, C64::new(0.3, 0.3), 0.0));
        assert!(!support_contains(&s, C64::new(0.6, 0.6), 1e-9));
        // dense copy of the same matrix through a unitary change of basis
        let u = CMatrix::from_real_rows(&[vec![0.6, 0.8, 0.0], vec![-0.8, 0.6, 0.0], vec![0.0, 0.0, 1.0]]);
        let dense = u.matmul(&m).matmul(&u.adjoint());
        let s2 = nrange(&dense).unwrap();
        for (a, b) in s.values().iter().zip(s2.values()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_membership_examples() {
        assert!(zero_in_nrange(&CMatrix::from_real_diag(&[-1.0, 1.0]), 0.0));
        assert!(!zero_in_nrange(&CMatrix::identity(3), 0.0));
        for n in [1usize, 2, 5, 40, 200] {
            let a: Vec<f64> = (1..=n).map(|k| (k * k + k) as f64).collect();
            let b: Vec<f64> = (1..=n).map(|k| (k * k) as f64).collect();
            let m = CMatrix::from_real_diag(&a).sub_scaled(C64::new(1.0, 0.0), &CMatrix::from_real_diag(&b));
            assert!(!zero_in_nrange(&m, 0.0));
        }
        let j = CMatrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]);
        assert!(zero_in_nrange(&j.shift(C64::new(0.49, 0.0)), 0.0));
        assert!(!zero_in_nrange(&j.shift(C64::new(0.51, 0.0)), 0.0));
    }
}
