//! LU factorization with partial pivoting.

use super::{ensure_square, CMatrix, KernelError, C64, ONE, ZERO};

#[derive(Debug, Clone)]
pub struct Lu {
    /// Packed `L` (unit lower, below the diagonal) and `U`.
    lu: CMatrix,
    perm: Vec<usize>,
    sign: f64,
    singular_at: Option<usize>,
}

impl Lu {
    /// Factors `PA = LU`. Exactly singular matrices still factor; `solve`
    /// then reports [`KernelError::Singular`].
    pub fn factor(a: &CMatrix) -> Result<Lu, KernelError> {
        let n = ensure_square(a)?;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        let mut singular_at = None;
        for k in 0..n {
            let (p, pmax) =
                (k..n)
                    .map(|i| (i, lu[(i, k)].norm()))
                    .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pmax == 0.0 {
                singular_at.get_or_insert(k);
                continue;
            }
            if p != k {
                for j in 0..n {
                    let t = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = t;
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let pivot = lu[(k, k)];
            let (upper, lower) = lu.as_mut_slice().split_at_mut((k + 1) * n);
            let krow = &upper[k * n..];
            for row in lower.chunks_mut(n) {
                let f = row[k] / pivot;
                row[k] = f;
                if f == ZERO {
                    continue;
                }
                for j in k + 1..n {
                    row[j] -= f * krow[j];
                }
            }
        }
        Ok(Lu {
            lu,
            perm,
            sign,
            singular_at,
        })
    }

    pub fn dim(&self) -> usize {
        self.lu.rows()
    }

    pub fn det(&self) -> C64 {
        let n = self.dim();
        (0..n).fold(C64::new(self.sign, 0.0), |acc, i| acc * self.lu[(i, i)])
    }

    pub fn is_singular(&self) -> bool {
        self.singular_at.is_some()
    }

    pub fn solve(&self, b: &[C64]) -> Result<Vec<C64>, KernelError> {
        if let Some(pivot) = self.singular_at {
            return Err(KernelError::Singular { pivot });
        }
        let n = self.dim();
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = self.lu.row(i);
            let s: C64 = row[..i].iter().zip(&x[..i]).map(|(&l, &v)| l * v).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let s: C64 = row[i + 1..].iter().zip(&x[i + 1..]).map(|(&u, &v)| u * v).sum();
            x[i] = (x[i] - s) / row[i];
        }
        Ok(x)
    }

    /// Solves `A* x = b`.
    pub fn solve_adjoint(&self, b: &[C64]) -> Result<Vec<C64>, KernelError> {
        if let Some(pivot) = self.singular_at {
            return Err(KernelError::Singular { pivot });
        }
        let n = self.dim();
        // A = Pᵀ L U, A* = U* L* P.
        let mut y = b.to_vec();
        for i in 0..n {
            let s: C64 = (0..i).map(|k| self.lu[(k, i)].conj() * y[k]).sum();
            y[i] = (y[i] - s) / self.lu[(i, i)].conj();
        }
        for i in (0..n).rev() {
            let s: C64 = (i + 1..n).map(|k| self.lu[(k, i)].conj() * y[k]).sum();
            y[i] -= s;
        }
        let mut x = vec![ZERO; n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = y[i];
        }
        Ok(x)
    }

    /// `A⁻¹·M`, column by column.
    pub fn solve_matrix(&self, m: &CMatrix) -> Result<CMatrix, KernelError> {
        let n = self.dim();
        let mut out = CMatrix::zeros(n, m.cols());
        for j in 0..m.cols() {
            let x = self.solve(&m.column(j))?;
            for (i, v) in x.into_iter().enumerate() {
                out[(i, j)] = v;
            }
        }
        Ok(out)
    }

    pub fn inverse(&self) -> Result<CMatrix, KernelError> {
        self.solve_matrix(&CMatrix::identity(self.dim()))
    }

    /// Hager's estimate of `‖A⁻¹‖₁`, exact on small matrices in practice.
    pub fn inverse_norm1_estimate(&self) -> Result<f64, KernelError> {
        let n = self.dim();
        if n == 0 {
            return Ok(0.0);
        }
        let mut x = vec![C64::new(1.0 / n as f64, 0.0); n];
        let mut est = 0.0;
        for _ in 0..5 {
            let y = self.solve(&x)?;
            let norm: f64 = y.iter().map(|z| z.norm()).sum();
            if norm <= est {
                break;
            }
            est = norm;
            let xi: Vec<C64> = y
                .iter()
                .map(|z| if z.norm() > 0.0 { z / z.norm() } else { ONE })
                .collect();
            let z = self.solve_adjoint(&xi)?;
            let (j, zmax) = z
                .iter()
                .enumerate()
                .map(|(j, v)| (j, v.norm()))
                .fold((0, -1.0), |b, c| if c.1 > b.1 { c } else { b });
            let zx: f64 = z.iter().zip(&x).map(|(a, b)| (a.conj() * b).re).sum();
            if zmax <= zx {
                break;
            }
            x = vec![ZERO; n];
            x[j] = ONE;
        }
        Ok(est)
    }
}

/// 1-norm condition number, `∞` for exactly singular input.
pub(crate) fn cond_1(a: &CMatrix) -> Result<f64, KernelError> {
    let lu = Lu::factor(a)?;
    if lu.is_singular() {
        return Ok(f64::INFINITY);
    }
    let inv = if a.rows() <= 200 {
        lu.inverse()?.norm_1()
    } else {
        lu.inverse_norm1_estimate()?
    };
    Ok(a.norm_1() * inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_system() {
        let a = CMatrix::from_rows(&[
            vec![C64::new(0.0, 0.0), C64::new(2.0, 1.0)],
            vec![C64::new(1.0, 0.0), C64::new(3.0, 0.0)],
        ]);
        let lu = Lu::factor(&a).unwrap();
        let b = [C64::new(1.0, 0.0), C64::new(0.0, 1.0)];
        let x = lu.solve(&b).unwrap();
        let ax = a.matvec(&x);
        for (u, v) in ax.iter().zip(&b) {
            assert!((u - v).norm() < 1e-14);
        }
        let y = lu.solve_adjoint(&b).unwrap();
        let ay = a.adjoint().matvec(&y);
        for (u, v) in ay.iter().zip(&b) {
            assert!((u - v).norm() < 1e-14);
        }
        assert!((lu.det() - C64::new(-2.0, -1.0)).norm() < 1e-14);
    }

    #[test]
    fn singular_is_reported() {
        let a = CMatrix::from_real_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
        let lu = Lu::factor(&a).unwrap();
        assert!(matches!(lu.solve(&[ONE, ONE]), Err(KernelError::Singular { .. })));
        assert_eq!(cond_1(&a).unwrap(), f64::INFINITY);
    }

    #[test]
    fn condition_number_of_diagonal() {
        let a = CMatrix::from_real_diag(&[1.0, 1e-3]);
        assert!((cond_1(&a).unwrap() - 1e3).abs() < 1e-9);
    }
}
