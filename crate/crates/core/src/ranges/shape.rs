//! Structure-aware evaluation of `h(θ) = λ_max(Re(e^{−iθ}M))`.

use crate::matkernel::{hermitian_eig, hermitian_lambda_max, symmetric_tridiagonal_max, CMatrix, KernelError, C64};

#[derive(Debug, Clone)]
pub(crate) enum Shape {
    Diagonal(Vec<C64>),
    /// `sub[i] = M[i+1,i]`, `sup[i] = M[i,i+1]`.
    Tridiagonal {
        diag: Vec<C64>,
        sub: Vec<C64>,
        sup: Vec<C64>,
    },
    Dense(CMatrix),
}

impl Shape {
    pub(crate) fn of(m: &CMatrix) -> Shape {
        if m.is_diagonal() {
            Shape::Diagonal(m.diag())
        } else if m.is_tridiagonal() {
            let n = m.rows();
            Shape::Tridiagonal {
                diag: m.diag(),
                sub: (0..n - 1).map(|i| m[(i + 1, i)]).collect(),
                sup: (0..n - 1).map(|i| m[(i, i + 1)]).collect(),
            }
        } else {
            Shape::Dense(m.clone())
        }
    }

    pub(crate) fn trace(&self) -> C64 {
        match self {
            Shape::Diagonal(d) => d.iter().sum(),
            Shape::Tridiagonal { diag, .. } => diag.iter().sum(),
            Shape::Dense(m) => m.trace(),
        }
    }

    /// `self − λ·other` for shapes of the same kind; falls back to dense.
    pub(crate) fn pencil(&self, lambda: C64, other: &Shape) -> Shape {
        let lin = |x: &[C64], y: &[C64]| -> Vec<C64> { x.iter().zip(y).map(|(&a, &b)| a - lambda * b).collect() };
        match (self, other) {
            (Shape::Diagonal(a), Shape::Diagonal(b)) => Shape::Diagonal(lin(a, b)),
            (
                Shape::Tridiagonal { diag, sub, sup },
                Shape::Tridiagonal {
                    diag: d2,
                    sub: s2,
                    sup: u2,
                },
            ) => Shape::Tridiagonal {
                diag: lin(diag, d2),
                sub: lin(sub, s2),
                sup: lin(sup, u2),
            },
            (Shape::Tridiagonal { diag, sub, sup }, Shape::Diagonal(d2)) => Shape::Tridiagonal {
                diag: lin(diag, d2),
                sub: sub.clone(),
                sup: sup.clone(),
            },
            (Shape::Diagonal(d), Shape::Tridiagonal { diag, sub, sup }) => Shape::Tridiagonal {
                diag: lin(d, diag),
                sub: sub.iter().map(|&z| -lambda * z).collect(),
                sup: sup.iter().map(|&z| -lambda * z).collect(),
            },
            _ => Shape::Dense(self.to_dense().sub_scaled(lambda, &other.to_dense())),
        }
    }

    pub(crate) fn to_dense(&self) -> CMatrix {
        match self {
            Shape::Diagonal(d) => CMatrix::from_diag(d),
            Shape::Tridiagonal { diag, sub, sup } => {
                let n = diag.len();
                let mut m = CMatrix::from_diag(diag);
                for i in 0..n.saturating_sub(1) {
                    m[(i + 1, i)] = sub[i];
                    m[(i, i + 1)] = sup[i];
                }
                m
            }
            Shape::Dense(m) => m.clone(),
        }
    }

    /// `h(θ)` and a point of `W(M)` attaining it; dense shapes only.
    pub(crate) fn support_point(&self, theta: f64) -> Option<(f64, C64)> {
        let Shape::Dense(m) = self else { return None };
        let e = hermitian_eig(&m.rotated_hermitian_part(theta)).ok()?;
        let k = e.values.len().checked_sub(1)?;
        Some((e.values[k], m.quadratic_form(&e.vectors.column(k))))
    }

    pub(crate) fn support(&self, theta: f64) -> Result<f64, KernelError> {
        let rot = C64::from_polar(1.0, -theta);
        match self {
            Shape::Diagonal(d) => Ok(d.iter().map(|&z| (rot * z).re).fold(f64::NEG_INFINITY, f64::max)),
            Shape::Tridiagonal { diag, sub, sup } => {
                let d: Vec<f64> = diag.iter().map(|&z| (rot * z).re).collect();
                let off: Vec<f64> = sub
                    .iter()
                    .zip(sup)
                    .map(|(&l, &u)| ((rot * l + (rot * u).conj()) * 0.5).norm())
                    .collect();
                Ok(symmetric_tridiagonal_max(&d, &off))
            }
            Shape::Dense(m) => hermitian_lambda_max(&m.rotated_hermitian_part(theta)),
        }
    }
}
