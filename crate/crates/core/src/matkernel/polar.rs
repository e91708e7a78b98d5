//! Polar multipliers and inverse square roots of positive matrices.

use super::{ensure_square, hermitian_eig, svd, CMatrix, KernelError, C64};

/// Smallest eigenvalue accepted by [`hpd_invsqrt`].
pub const HPD_MIN_EIGENVALUE: f64 = 1e-12;

/// `B = U*` where `T − λ = U|T − λ|`, so that `B(T − λ) = |T − λ|`.
///
/// When `T − λ` is singular the partial isometry on the range is returned,
/// extended by zero.
pub fn polar_multiplier(t: &CMatrix, lambda: C64) -> Result<CMatrix, KernelError> {
    let n = ensure_square(t)?;
    let shifted = t.shift(-lambda);
    let d = svd(&shifted);
    let cutoff = d.s.first().copied().unwrap_or(0.0) * n as f64 * f64::EPSILON;
    let mut u = CMatrix::zeros(n, n);
    for k in 0..n {
        if d.s[k] <= cutoff {
            continue;
        }
        for i in 0..n {
            let uik = d.u[(i, k)];
            for j in 0..n {
                u[(i, j)] += uik * d.v[(j, k)].conj();
            }
        }
    }
    Ok(u.adjoint())
}

/// `B^{-1/2}` for Hermitian positive definite `B`.
pub fn hpd_invsqrt(b: &CMatrix) -> Result<CMatrix, KernelError> {
    let n = ensure_square(b)?;
    if b.is_diagonal() {
        let d = b.diag();
        let min = d.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
        if min < HPD_MIN_EIGENVALUE || d.iter().any(|z| z.im != 0.0) {
            if d.iter().any(|z| z.im != 0.0) {
                return Err(KernelError::NotHermitian {
                    deviation: d.iter().map(|z| z.im.abs()).fold(0.0, f64::max),
                });
            }
            return Err(KernelError::NotPositive { min_eigenvalue: min });
        }
        let inv: Vec<f64> = d.iter().map(|z| 1.0 / z.re.sqrt()).collect();
        return Ok(CMatrix::from_real_diag(&inv));
    }
    let e = hermitian_eig(b)?;
    let min = e.values.first().copied().unwrap_or(f64::INFINITY);
    if min < HPD_MIN_EIGENVALUE {
        return Err(KernelError::NotPositive { min_eigenvalue: min });
    }
    let w: Vec<f64> = e.values.iter().map(|&l| 1.0 / l.sqrt()).collect();
    let v = &e.vectors;
    let mut s = CMatrix::from_fn(n, n, |i, j| (0..n).map(|k| v[(i, k)] * w[k] * v[(j, k)].conj()).sum());
    // Symmetrize away rounding so downstream Hermitian checks stay tight.
    let sa = s.adjoint();
    s = (&s + &sa).scale_real(0.5);
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matkernel::{hermitian_eigvals, smallest_singular_value};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(n: usize, seed: u64) -> CMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        CMatrix::from_fn(n, n, |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
    }

    #[test]
    fn psd_input_gives_identity() {
        let g = random(4, 1);
        let t = g.adjoint().matmul(&g);
        let b = polar_multiplier(&t, C64::new(-1.0, 0.0)).unwrap();
        assert!(b.max_abs_diff(&CMatrix::identity(4)) < 1e-12);
    }

    #[test]
    fn sign_flip() {
        let b = polar_multiplier(&CMatrix::from_real_diag(&[-1.0, 2.0]), C64::new(0.0, 0.0)).unwrap();
        assert!(b.max_abs_diff(&CMatrix::from_real_diag(&[-1.0, 1.0])) < 1e-15);
    }

    #[test]
    fn multiplied_pencil_is_modulus() {
        let t = random(5, 7);
        let lambda = C64::new(0.3, -0.2);
        let b = polar_multiplier(&t, lambda).unwrap();
        assert!(b.matmul(&b.adjoint()).max_abs_diff(&CMatrix::identity(5)) < 1e-10);
        let p = b.matmul(&t.shift(-lambda));
        assert!(p.hermitian_deviation() < 1e-9);
        let herm = (&p + &p.adjoint()).scale_real(0.5);
        let min = hermitian_eigvals(&herm).unwrap()[0];
        let sigma = smallest_singular_value(&t.shift(-lambda));
        assert!((min - sigma).abs() < 1e-9);
    }

    #[test]
    fn invsqrt_examples() {
        let s = hpd_invsqrt(&CMatrix::from_real_diag(&[4.0, 9.0])).unwrap();
        assert!(s.max_abs_diff(&CMatrix::from_real_diag(&[0.5, 1.0 / 3.0])) < 1e-15);
        let s = hpd_invsqrt(&CMatrix::identity(3)).unwrap();
        assert!(s.max_abs_diff(&CMatrix::identity(3)) < 1e-15);
        let g = random(5, 3);
        let b = g.adjoint().matmul(&g).shift(C64::new(0.1, 0.0));
        let s = hpd_invsqrt(&b).unwrap();
        assert!(s.matmul(&b).matmul(&s).max_abs_diff(&CMatrix::identity(5)) < 1e-9);
        assert!(matches!(
            hpd_invsqrt(&CMatrix::from_real_diag(&[1.0, -1.0])),
            Err(KernelError::NotPositive { .. })
        ));
    }
}
