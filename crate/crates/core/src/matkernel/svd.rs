//! Singular values by one-sided (Hestenes) Jacobi.

use super::{dot, vec_norm, CMatrix, Lu, C64, ZERO};

/// `A = U·diag(s)·V*`, singular values descending. `U` is `m×k`, `V` is
/// `n×k` with `k = min(m, n)`.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: CMatrix,
    pub s: Vec<f64>,
    pub v: CMatrix,
}

const MAX_SWEEPS: usize = 80;

fn jacobi(m: &CMatrix) -> Svd {
    if m.rows() < m.cols() {
        let t = jacobi(&m.adjoint());
        return Svd { u: t.v, s: t.s, v: t.u };
    }
    let (rows, n) = m.shape();
    let mut a: Vec<Vec<C64>> = (0..n).map(|j| m.column(j)).collect();
    let mut v: Vec<Vec<C64>> = (0..n)
        .map(|j| {
            let mut e = vec![ZERO; n];
            e[j] = C64::new(1.0, 0.0);
            e
        })
        .collect();
    let eps = f64::EPSILON;

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = dot(&a[p], &a[p]).re;
                let beta = dot(&a[q], &a[q]).re;
                // a_p* a_q
                let gamma = dot(&a[q], &a[p]);
                let g = gamma.norm();
                if g == 0.0 || g <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = if zeta >= 0.0 { 1.0 } else { -1.0 } / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for cols in [&mut a, &mut v] {
                    let (lo, hi) = cols.split_at_mut(q);
                    let xp = &mut lo[p];
                    let xq = &mut hi[0];
                    for (u, w) in xp.iter_mut().zip(xq.iter_mut()) {
                        let bq = phase * *w;
                        let up = *u;
                        *u = up * c - bq * s;
                        *w = up * s + bq * c;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<(usize, f64)> = a.iter().map(|col| vec_norm(col)).enumerate().collect();
    order.sort_by(|x, y| y.1.total_cmp(&x.1));
    let mut u = CMatrix::zeros(rows, n);
    let mut vm = CMatrix::zeros(n, n);
    let mut s = Vec::with_capacity(n);
    for (k, &(j, sigma)) in order.iter().enumerate() {
        s.push(sigma);
        for i in 0..rows {
            u[(i, k)] = if sigma > 0.0 { a[j][i] / sigma } else { ZERO };
        }
        for i in 0..n {
            vm[(i, k)] = v[j][i];
        }
    }
    Svd { u, s, v: vm }
}

/// Full thin SVD. Columns of `U` for zero singular values are left zero.
pub fn svd(m: &CMatrix) -> Svd {
    jacobi(m)
}

pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    jacobi(m).s
}

/// `σ_min` of a square matrix. Small inputs use Jacobi; larger ones use
/// inverse iteration on `(M*M)⁻¹` through one LU factorization.
pub fn smallest_singular_value(m: &CMatrix) -> f64 {
    let n = m.rows().min(m.cols());
    if n == 0 {
        return 0.0;
    }
    if n <= 96 || !m.is_square() {
        return jacobi(m).s.last().copied().unwrap_or(0.0);
    }
    let lu = match Lu::factor(m) {
        Ok(lu) if !lu.is_singular() => lu,
        _ => return 0.0,
    };
    let mut x: Vec<C64> = (0..n)
        .map(|i| C64::new(1.0 + ((i as f64) * 0.618_033_988_7).fract(), 0.0))
        .collect();
    let nx = vec_norm(&x);
    x.iter_mut().for_each(|z| *z /= nx);
    let mut lambda = 0.0;
    for _ in 0..200 {
        let Ok(y) = lu.solve_adjoint(&x) else { return 0.0 };
        let Ok(z) = lu.solve(&y) else { return 0.0 };
        let rayleigh = dot(&y, &y).re;
        let nz = vec_norm(&z);
        if !nz.is_finite() || nz == 0.0 {
            return 0.0;
        }
        x = z.into_iter().map(|w| w / nz).collect();
        if (rayleigh - lambda).abs() <= 1e-13 * rayleigh {
            lambda = rayleigh;
            break;
        }
        lambda = rayleigh;
    }
    1.0 / lambda.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(m: usize, n: usize, seed: u64) -> CMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        CMatrix::from_fn(m, n, |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
    }

    #[test]
    fn reconstructs_rectangular() {
        for (m, n) in [(5, 3), (3, 5), (6, 6)] {
            let a = random(m, n, (m * 10 + n) as u64);
            let d = svd(&a);
            let k = m.min(n);
            let us = CMatrix::from_fn(m, k, |i, j| d.u[(i, j)] * d.s[j]);
            let back = us.matmul(&d.v.adjoint());
            assert!(back.max_abs_diff(&a) < 1e-12);
            assert!(d.s.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn diagonal_values() {
        let s = singular_values(&CMatrix::from_diag(&[C64::new(0.0, -3.0), C64::new(1.0, 0.0)]));
        assert!((s[0] - 3.0).abs() < 1e-15 && (s[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn inverse_iteration_matches_jacobi() {
        let a = random(120, 120, 5);
        let exact = *jacobi(&a).s.last().unwrap();
        let fast = smallest_singular_value(&a);
        assert!((exact - fast).abs() <= 1e-8 * exact.max(1e-3), "{exact} vs {fast}");
    }
}
