//! Eigenvalues of general complex matrices and of `B⁻¹A` pencils.
//!
//! Dense input goes through Householder reduction to Hessenberg form and a
//! Wilkinson-shifted complex QR iteration. Tridiagonal input is first
//! symmetrized by a diagonal similarity (only the products `sub·sup` enter
//! the characteristic polynomial) and then handled by complex QL in O(n²).

use super::lu::cond_1;
use super::{ensure_square, CMatrix, KernelError, Lu, C64, ONE, SINGULAR_B_COND, ZERO};

const ITERATIONS_PER_EIGENVALUE: usize = 30;

/// Eigenvalues of a square complex matrix, unordered.
pub fn general_eig(m: &CMatrix) -> Result<Vec<C64>, KernelError> {
    let n = ensure_square(m)?;
    if n == 0 {
        return Ok(Vec::new());
    }
    if is_upper_triangular(m) {
        return Ok(m.diag());
    }
    if m.is_tridiagonal() {
        return tridiagonal_eig(m);
    }
    let mut h = m.clone();
    if !h.is_upper_hessenberg() {
        reduce_to_hessenberg(&mut h);
    }
    hessenberg_eigenvalues(h)
}

fn is_upper_triangular(m: &CMatrix) -> bool {
    (0..m.rows()).all(|i| m.row(i)[..i].iter().all(|&z| z == ZERO))
}

fn reduce_to_hessenberg(h: &mut CMatrix) {
    let n = h.rows();
    for k in 0..n.saturating_sub(2) {
        let start = k + 1;
        let x: Vec<C64> = (start..n).map(|i| h[(i, k)]).collect();
        let tail: f64 = x[1..].iter().map(|z| z.norm_sqr()).sum();
        if tail == 0.0 {
            continue;
        }
        let sigma = (tail + x[0].norm_sqr()).sqrt();
        let phase = if x[0].norm() > 0.0 { x[0] / x[0].norm() } else { ONE };
        let mut v = x;
        v[0] += phase * sigma;
        let vn = super::vec_norm(&v);
        v.iter_mut().for_each(|z| *z /= vn);

        // rows start.., columns k..
        let mut s = vec![ZERO; n];
        for (ii, &vi) in v.iter().enumerate() {
            let row = &h.row(start + ii)[k..];
            for (sj, &hj) in s[k..].iter_mut().zip(row) {
                *sj += vi.conj() * hj;
            }
        }
        for (ii, &vi) in v.iter().enumerate() {
            let row = &mut h.row_mut(start + ii)[k..];
            for (hj, &sj) in row.iter_mut().zip(&s[k..]) {
                *hj -= 2.0 * vi * sj;
            }
        }
        // all rows, columns start..
        for i in 0..n {
            let row = &mut h.row_mut(i)[start..];
            let t: C64 = row.iter().zip(&v).map(|(&a, &b)| a * b).sum();
            for (hj, &vj) in row.iter_mut().zip(&v) {
                *hj -= 2.0 * t * vj.conj();
            }
        }
        for i in start + 1..n {
            h[(i, k)] = ZERO;
        }
    }
}

/// Givens pair `(c, s)` with `[[c, s], [−s̄, c]]·[x; y] = [r; 0]`.
fn givens(x: C64, y: C64) -> (f64, C64) {
    let ax = x.norm();
    let ay = y.norm();
    if ay == 0.0 {
        return (1.0, ZERO);
    }
    if ax == 0.0 {
        return (0.0, y.conj() / ay);
    }
    let rho = ax.hypot(ay);
    (ax / rho, (x / ax) * y.conj() / rho)
}

fn two_by_two(a: C64, b: C64, c: C64, d: C64) -> (C64, C64) {
    let half_tr = (a + d) * 0.5;
    let disc = ((a - d) * 0.5).powi(2) + b * c;
    let root = disc.sqrt();
    (half_tr + root, half_tr - root)
}

/// Eigenvalues of an upper Hessenberg matrix by shifted QR.
pub fn hessenberg_eigenvalues(mut h: CMatrix) -> Result<Vec<C64>, KernelError> {
    let n = ensure_square(&h)?;
    let mut eig = Vec::with_capacity(n);
    if n == 0 {
        return Ok(eig);
    }
    let norm = h.norm_max().max(f64::MIN_POSITIVE);
    let eps = f64::EPSILON;
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    let mut rot: Vec<(f64, C64)> = Vec::with_capacity(n);

    loop {
        let mut l = hi;
        while l > 0 {
            let scale = h[(l, l)].norm() + h[(l - 1, l - 1)].norm();
            let scale = if scale == 0.0 { norm } else { scale };
            if h[(l, l - 1)].norm() <= eps * scale {
                h[(l, l - 1)] = ZERO;
                break;
            }
            l -= 1;
        }
        if l == hi {
            eig.push(h[(hi, hi)]);
            iter = 0;
            if hi == 0 {
                break;
            }
            hi -= 1;
            continue;
        }
        if l + 1 == hi {
            let (e1, e2) = two_by_two(h[(l, l)], h[(l, hi)], h[(hi, l)], h[(hi, hi)]);
            eig.push(e1);
            eig.push(e2);
            iter = 0;
            if l == 0 {
                break;
            }
            hi = l - 1;
            continue;
        }

        iter += 1;
        total += 1;
        if iter > ITERATIONS_PER_EIGENVALUE || total > ITERATIONS_PER_EIGENVALUE * n {
            return Err(KernelError::NoConvergence { iterations: total });
        }
        let mu = if iter % 10 == 0 {
            h[(hi, hi)] + C64::new(0.75, 0.43) * h[(hi, hi - 1)].norm()
        } else {
            let a = h[(hi - 1, hi - 1)];
            let d = h[(hi, hi)];
            let (e1, e2) = two_by_two(a, h[(hi - 1, hi)], h[(hi, hi - 1)], d);
            if (e1 - d).norm() <= (e2 - d).norm() {
                e1
            } else {
                e2
            }
        };

        for k in l..=hi {
            h[(k, k)] -= mu;
        }
        rot.clear();
        for k in l..hi {
            let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
            rot.push((c, s));
            let cols = h.cols();
            let (top, bottom) = h.as_mut_slice().split_at_mut((k + 1) * cols);
            let rk = &mut top[k * cols + k..k * cols + hi + 1];
            let rk1 = &mut bottom[k..hi + 1];
            for (a, b) in rk.iter_mut().zip(rk1.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x * c + s * y;
                *b = -s.conj() * x + y * c;
            }
            h[(k + 1, k)] = ZERO;
        }
        for (offset, &(c, s)) in rot.iter().enumerate() {
            let k = l + offset;
            for i in l..=(k + 1).min(hi) {
                let a = h[(i, k)];
                let b = h[(i, k + 1)];
                h[(i, k)] = a * c + b * s.conj();
                h[(i, k + 1)] = -a * s + b * c;
            }
        }
        for k in l..=hi {
            h[(k, k)] += mu;
        }
    }
    Ok(eig)
}

fn tridiagonal_eig(m: &CMatrix) -> Result<Vec<C64>, KernelError> {
    let n = m.rows();
    let mut out = Vec::with_capacity(n);
    let mut start = 0;
    for i in 0..n {
        let decoupled = i + 1 == n || m[(i + 1, i)] * m[(i, i + 1)] == ZERO;
        if !decoupled {
            continue;
        }
        let d: Vec<C64> = (start..=i).map(|k| m[(k, k)]).collect();
        let e: Vec<C64> = (start..i).map(|k| (m[(k + 1, k)] * m[(k, k + 1)]).sqrt()).collect();
        match complex_symmetric_ql(d.clone(), &e) {
            Ok(v) if v.iter().all(|z| z.is_finite()) => out.extend(v),
            _ => {
                let block = m.submatrix(start, start, i + 1 - start, i + 1 - start);
                out.extend(hessenberg_eigenvalues(block)?);
            }
        }
        start = i + 1;
    }
    Ok(out)
}

/// Implicit QL with complex orthogonal rotations on a complex symmetric
/// tridiagonal matrix `(d, e)`.
fn complex_symmetric_ql(mut d: Vec<C64>, off: &[C64]) -> Result<Vec<C64>, KernelError> {
    let n = d.len();
    if n <= 1 {
        return Ok(d);
    }
    let mut e = off.to_vec();
    e.push(ZERO);
    let eps = f64::EPSILON;
    let cap = ITERATIONS_PER_EIGENVALUE * n;
    let mut total = 0;
    let mut f = ZERO;
    let mut tst1: f64 = 0.0;
    let tiny = C64::new(f64::MIN_POSITIVE.sqrt(), 0.0);

    for l in 0..n {
        tst1 = tst1.max(d[l].norm() + e[l].norm());
        let mut m = l;
        while m < n - 1 {
            let local = d[m].norm() + d[m + 1].norm();
            if e[m].norm() <= eps * local.max(eps * tst1) {
                break;
            }
            m += 1;
        }
        if m > l {
            loop {
                total += 1;
                if total > cap {
                    return Err(KernelError::NoConvergence { iterations: total });
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (e[l] * 2.0);
                let mut r = (p * p + ONE).sqrt();
                if (p - r).norm() > (p + r).norm() {
                    r = -r;
                }
                let mut denom = p + r;
                if denom == ZERO {
                    denom = tiny;
                }
                d[l] = e[l] / denom;
                d[l + 1] = e[l] * denom;
                let dl1 = d[l + 1];
                let h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = ONE;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = ZERO;
                let mut s2 = ZERO;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    let h = c * p;
                    r = (p * p + e[i] * e[i]).sqrt();
                    if r == ZERO {
                        r = tiny;
                    }
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                }
                let dl1 = if dl1 == ZERO { tiny } else { dl1 };
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                let local = d[l].norm() + d[l + 1].norm();
                if e[l].norm() <= eps * local.max(eps * tst1) {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = ZERO;
    }
    Ok(d)
}

/// Eigenvalues of the pencil `A − λB` through `B⁻¹A`.
///
/// Refuses with [`KernelError::SingularB`] when the 1-norm condition number
/// of `B` exceeds `1e10`. Diagonal `B` is applied as a row scaling, which
/// keeps banded structure intact.
pub fn generalized_eig(a: &CMatrix, b: &CMatrix) -> Result<Vec<C64>, KernelError> {
    let n = ensure_square(a)?;
    ensure_square(b)?;
    if a.shape() != b.shape() {
        return Err(KernelError::DimensionMismatch {
            left: a.shape(),
            right: b.shape(),
        });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    if b.is_diagonal() {
        let bd = b.diag();
        let max = bd.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let min = bd.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
        let cond = if min == 0.0 { f64::INFINITY } else { max / min };
        if cond > SINGULAR_B_COND {
            return Err(KernelError::SingularB { cond });
        }
        if a.is_diagonal() {
            return Ok(a.diag().iter().zip(&bd).map(|(x, y)| x / y).collect());
        }
        let inv: Vec<C64> = bd.iter().map(|z| z.inv()).collect();
        return general_eig(&a.scale_rows(&inv));
    }
    let cond = cond_1(b)?;
    if cond > SINGULAR_B_COND {
        return Err(KernelError::SingularB { cond });
    }
    let lu = Lu::factor(b)?;
    general_eig(&lu.solve_matrix(a)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matkernel::{smallest_singular_value, I};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(n: usize, seed: u64) -> CMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        CMatrix::from_fn(n, n, |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
    }

    fn sorted(mut v: Vec<C64>) -> Vec<C64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    #[test]
    fn nilpotent() {
        let m = CMatrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]);
        assert!(general_eig(&m).unwrap().iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn diagonal() {
        let m = CMatrix::from_diag(&[C64::new(1.0, 1.0), C64::new(2.0, 0.0)]);
        let e = sorted(general_eig(&m).unwrap());
        assert_eq!(e, vec![C64::new(1.0, 1.0), C64::new(2.0, 0.0)]);
    }

    #[test]
    fn companion_of_cube_roots() {
        // z³ − 1
        let m = CMatrix::from_real_rows(&[vec![0.0, 0.0, 1.0], vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]);
        let e = general_eig(&m).unwrap();
        assert_eq!(e.len(), 3);
        for z in &e {
            assert!((z.powi(3) - ONE).norm() < 1e-10);
        }
        for k in 0..3 {
            let root = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / 3.0);
            assert!(e.iter().any(|z| (z - root).norm() < 1e-10));
        }
    }

    #[test]
    fn residuals_and_determinant() {
        for seed in 0..6 {
            let m = random(25, seed);
            let e = general_eig(&m).unwrap();
            let norm = m.norm_2();
            for &l in &e {
                assert!(smallest_singular_value(&m.shift(-l)) <= 1e-8 * norm);
            }
            let prod = e.iter().fold(ONE, |a, b| a * b);
            let det = m.det().unwrap();
            assert!((prod - det).norm() <= 1e-7 * det.norm());
        }
    }

    #[test]
    fn tridiagonal_path_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 40;
        let m = CMatrix::from_fn(n, n, |i, j| {
            if i.abs_diff(j) <= 1 {
                C64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-1.0..1.0))
            } else {
                ZERO
            }
        });
        let fast = sorted(tridiagonal_eig(&m).unwrap());
        let dense = sorted(hessenberg_eigenvalues(m.clone()).unwrap());
        for (a, b) in fast.iter().zip(&dense) {
            assert!((a - b).norm() < 1e-8, "{a} vs {b}");
        }
        // indefinite sign pattern produces imaginary couplings
        let j = CMatrix::from_fn(n, n, |i, k| match (i.abs_diff(k), i < n / 2) {
            (0, true) => C64::new(-2.0, 0.0),
            (0, false) => C64::new(2.0, 0.0),
            (1, true) => C64::new(1.0, 0.0),
            (1, false) => C64::new(-1.0, 0.0),
            _ => ZERO,
        });
        for &l in &tridiagonal_eig(&j).unwrap() {
            assert!(smallest_singular_value(&j.shift(-l)) < 1e-10);
        }
    }

    #[test]
    fn pencil_examples() {
        let a = CMatrix::from_real_diag(&[2.0, 6.0]);
        let b = CMatrix::from_real_diag(&[1.0, 4.0]);
        assert_eq!(
            generalized_eig(&a, &b).unwrap(),
            vec![C64::new(2.0, 0.0), C64::new(1.5, 0.0)]
        );
        let a = CMatrix::from_real_diag(&[1.0, -2.0]);
        let b = CMatrix::from_real_diag(&[1.0, -1.0]);
        assert_eq!(
            generalized_eig(&a, &b).unwrap(),
            vec![C64::new(1.0, 0.0), C64::new(2.0, 0.0)]
        );
        let a = random(6, 3);
        let via_pencil = sorted(generalized_eig(&a, &CMatrix::identity(6)).unwrap());
        let direct = sorted(general_eig(&a).unwrap());
        for (x, y) in via_pencil.iter().zip(&direct) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn dense_pencil_residual() {
        let a = random(12, 21);
        let b = random(12, 22).shift(I * 3.0);
        let scale = a.norm_2();
        let bn = b.norm_2();
        for l in generalized_eig(&a, &b).unwrap() {
            let s = smallest_singular_value(&a.sub_scaled(l, &b));
            assert!(s <= 1e-7 * (scale + l.norm() * bn));
        }
    }

    #[test]
    fn singular_b_is_refused() {
        let a = CMatrix::identity(2);
        let b = CMatrix::from_real_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]);
        assert!(matches!(generalized_eig(&a, &b), Err(KernelError::SingularB { .. })));
        let b = CMatrix::from_real_diag(&[1.0, 0.0]);
        assert!(matches!(generalized_eig(&a, &b), Err(KernelError::SingularB { .. })));
    }
}
