//! Hermitian eigensolver: Householder tridiagonalization, diagonal phase
//! scaling to a real symmetric tridiagonal, then implicit QL.

use super::{ensure_square, CMatrix, KernelError, C64, ONE, ZERO};

#[derive(Debug, Clone)]
pub struct HermitianEig {
    /// Ascending.
    pub values: Vec<f64>,
    /// Unitary; column `k` belongs to `values[k]`.
    pub vectors: CMatrix,
}

/// Real symmetric tridiagonal form `Q·D·T·D*·Q*` of a Hermitian matrix,
/// with `D` folded into `q`.
struct Tridiagonal {
    diag: Vec<f64>,
    /// `off[i]` couples `i` and `i+1`; non-negative.
    off: Vec<f64>,
    q: Option<CMatrix>,
}

fn check_hermitian(m: &CMatrix) -> Result<usize, KernelError> {
    let n = ensure_square(m)?;
    let deviation = m.hermitian_deviation();
    if deviation > super::HERMITIAN_TOL * m.norm_max() {
        return Err(KernelError::NotHermitian { deviation });
    }
    Ok(n)
}

fn tridiagonalize(m: &CMatrix, want_q: bool) -> Tridiagonal {
    let n = m.rows();
    if m.is_tridiagonal() {
        return phase_scale(
            (0..n).map(|i| m[(i, i)].re).collect(),
            (0..n.saturating_sub(1))
                .map(|i| 0.5 * (m[(i + 1, i)] + m[(i, i + 1)].conj()))
                .collect(),
            want_q.then(|| CMatrix::identity(n)),
        );
    }

    let mut a = m.clone();
    let mut reflectors: Vec<(usize, Vec<C64>)> = Vec::new();
    let mut p = vec![ZERO; n];
    let mut w = vec![ZERO; n];

    for k in 0..n.saturating_sub(2) {
        let start = k + 1;
        let len = n - start;
        let x: Vec<C64> = (start..n).map(|i| a[(i, k)]).collect();
        let tail: f64 = x[1..].iter().map(|z| z.norm_sqr()).sum();
        if tail == 0.0 {
            continue;
        }
        let sigma = (tail + x[0].norm_sqr()).sqrt();
        let phase = if x[0].norm() > 0.0 { x[0] / x[0].norm() } else { ONE };
        let alpha = -phase * sigma;
        let mut v = x;
        v[0] -= alpha;
        let vnorm = super::vec_norm(&v);
        for z in v.iter_mut() {
            *z /= vnorm;
        }

        // p = A22 v, w = p - (v* p) v, A22 -= 2 (v w* + w v*)
        for (ii, pi) in p[..len].iter_mut().enumerate() {
            let row = &a.row(start + ii)[start..];
            *pi = row.iter().zip(&v).map(|(&r, &vj)| r * vj).sum();
        }
        let kappa: C64 = v.iter().zip(&p[..len]).map(|(&vi, &pi)| vi.conj() * pi).sum();
        for ii in 0..len {
            w[ii] = p[ii] - kappa.re * v[ii];
        }
        for ii in 0..len {
            let vi = v[ii];
            let wi = w[ii];
            let row = &mut a.row_mut(start + ii)[start..];
            for jj in 0..len {
                row[jj] -= 2.0 * (vi * w[jj].conj() + wi * v[jj].conj());
            }
        }
        a[(start, k)] = alpha;
        a[(k, start)] = alpha.conj();
        for i in start + 1..n {
            a[(i, k)] = ZERO;
            a[(k, i)] = ZERO;
        }
        if want_q {
            reflectors.push((start, v));
        }
    }

    let q = want_q.then(|| {
        let mut q = CMatrix::identity(n);
        for (start, v) in reflectors.iter().rev() {
            // Q <- (I - 2 v v*) Q on rows start..n
            let cols = q.cols();
            let mut s = vec![ZERO; cols];
            for (ii, &vi) in v.iter().enumerate() {
                let row = q.row(start + ii);
                let vc = vi.conj();
                for (sj, &qj) in s.iter_mut().zip(row) {
                    *sj += vc * qj;
                }
            }
            for (ii, &vi) in v.iter().enumerate() {
                let row = q.row_mut(start + ii);
                for (qj, &sj) in row.iter_mut().zip(&s) {
                    *qj -= 2.0 * vi * sj;
                }
            }
        }
        q
    });

    phase_scale(
        (0..n).map(|i| a[(i, i)].re).collect(),
        (0..n.saturating_sub(1)).map(|i| a[(i + 1, i)]).collect(),
        q,
    )
}

fn phase_scale(diag: Vec<f64>, sub: Vec<C64>, q: Option<CMatrix>) -> Tridiagonal {
    let n = diag.len();
    let mut phases = vec![ONE; n];
    let mut off = Vec::with_capacity(sub.len());
    for (i, t) in sub.iter().enumerate() {
        let r = t.norm();
        phases[i + 1] = if r > 0.0 { phases[i] * (t / r) } else { phases[i] };
        off.push(r);
    }
    let q = q.map(|mut q| {
        for i in 0..q.rows() {
            for (z, ph) in q.row_mut(i).iter_mut().zip(&phases) {
                *z *= ph;
            }
        }
        q
    });
    Tridiagonal { diag, off, q }
}

/// Implicit QL on a real symmetric tridiagonal matrix. `zt` holds the
/// eigenvector matrix transposed (row `i` is eigenvector `i`) when present.
fn tql(d: &mut [f64], off: &[f64], mut zt: Option<&mut [f64]>) -> Result<(), KernelError> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    let mut e = vec![0.0; n];
    e[..n - 1].copy_from_slice(&off[..n - 1]);
    let cap = 30 * n.max(1);
    let mut iterations = 0usize;
    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;

    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            loop {
                iterations += 1;
                if iterations > cap {
                    return Err(KernelError::NoConvergence { iterations });
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    let h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(z) = zt.as_deref_mut() {
                        let (lo, hi) = z.split_at_mut((i + 1) * n);
                        let zi = &mut lo[i * n..];
                        let zi1 = &mut hi[..n];
                        for k in 0..n {
                            let h = zi1[k];
                            zi1[k] = s * zi[k] + c * h;
                            zi[k] = c * zi[k] - s * h;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

/// Eigen-decomposition of a Hermitian matrix; eigenvalues ascending.
pub fn hermitian_eig(m: &CMatrix) -> Result<HermitianEig, KernelError> {
    let n = check_hermitian(m)?;
    let tri = tridiagonalize(m, true);
    let mut d = tri.diag;
    let mut zt = vec![0.0; n * n];
    for i in 0..n {
        zt[i * n + i] = 1.0;
    }
    tql(&mut d, &tri.off, Some(&mut zt))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    let q = tri.q.expect("q requested");
    // V = Q Z, Z[k][i] = zt[i][k]
    let mut vectors = CMatrix::zeros(n, n);
    for r in 0..n {
        let qrow = q.row(r);
        let out = vectors.row_mut(r);
        for (col, &src) in order.iter().enumerate() {
            let z = &zt[src * n..(src + 1) * n];
            out[col] = qrow.iter().zip(z).map(|(&qv, &zv)| qv * zv).sum();
        }
    }
    let values = order.iter().map(|&i| d[i]).collect();
    Ok(HermitianEig { values, vectors })
}

/// Eigenvalues only, ascending.
pub fn hermitian_eigvals(m: &CMatrix) -> Result<Vec<f64>, KernelError> {
    check_hermitian(m)?;
    let tri = tridiagonalize(m, false);
    let mut d = tri.diag;
    tql(&mut d, &tri.off, None)?;
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Number of eigenvalues of the symmetric tridiagonal `(diag, off)` that are
/// strictly greater than `x` (Sturm sequence on the LDLᵀ pivots).
pub fn tridiagonal_count_above(diag: &[f64], off: &[f64], x: f64) -> usize {
    let n = diag.len();
    let mut below = 0;
    let mut q = 1.0;
    for i in 0..n {
        let coupling = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] };
        q = diag[i] - x - if i == 0 { 0.0 } else { coupling / q };
        if q == 0.0 {
            q = -f64::MIN_POSITIVE;
        }
        if q < 0.0 {
            below += 1;
        }
    }
    n - below
}

/// Largest eigenvalue of the real symmetric tridiagonal `(diag, off)` by
/// Sturm bisection.
pub fn symmetric_tridiagonal_max(diag: &[f64], off: &[f64]) -> f64 {
    let n = diag.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { off[i - 1] } else { 0.0 } + if i + 1 < n { off[i] } else { 0.0 };
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= 4.0 * f64::EPSILON * scale || mid <= lo || mid >= hi {
            break;
        }
        if tridiagonal_count_above(diag, off, mid) > 0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Largest eigenvalue of a Hermitian matrix. Tridiagonal input skips the
/// Householder stage entirely and costs O(n) per bisection step.
pub fn hermitian_lambda_max(m: &CMatrix) -> Result<f64, KernelError> {
    let n = check_hermitian(m)?;
    if n == 0 {
        return Ok(f64::NEG_INFINITY);
    }
    if m.is_diagonal() {
        return Ok(m.diag().iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max));
    }
    let tri = tridiagonalize(m, false);
    Ok(symmetric_tridiagonal_max(&tri.diag, &tri.off))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(n: usize, seed: u64) -> CMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = CMatrix::from_fn(n, n, |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        (&g + &g.adjoint()).scale_real(0.5)
    }

    /// Cyclic complex Jacobi rotations; slow but structurally unrelated to
    /// Householder + QL.
    fn jacobi_oracle(m: &CMatrix) -> Vec<f64> {
        let n = m.rows();
        let mut a = m.clone();
        for _sweep in 0..100 {
            let off: f64 = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| a[(i, j)].norm_sqr())
                .sum();
            if off < 1e-30 {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    let apq = a[(p, q)];
                    if apq.norm() < 1e-300 {
                        continue;
                    }
                    let app = a[(p, p)].re;
                    let aqq = a[(q, q)].re;
                    let phase = apq / apq.norm();
                    let tau = (aqq - app) / (2.0 * apq.norm());
                    let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                    let t = if tau == 0.0 { 1.0 } else { t };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    // rotation in the (p,q) plane: columns p,q of J
                    let jpp = C64::new(c, 0.0);
                    let jpq = phase * s;
                    let jqp = -phase.conj() * s;
                    let jqq = C64::new(c, 0.0);
                    // A <- J* A J
                    for k in 0..n {
                        let akp = a[(k, p)];
                        let akq = a[(k, q)];
                        a[(k, p)] = akp * jpp + akq * jqp;
                        a[(k, q)] = akp * jpq + akq * jqq;
                    }
                    for k in 0..n {
                        let apk = a[(p, k)];
                        let aqk = a[(q, k)];
                        a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
                        a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
                    }
                }
            }
        }
        let mut v: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
        v.sort_by(f64::total_cmp);
        v
    }

    #[test]
    fn diagonal_input() {
        let e = hermitian_eig(&CMatrix::from_real_diag(&[2.0, 1.0])).unwrap();
        assert_eq!(e.values, vec![1.0, 2.0]);
    }

    #[test]
    fn identity_input() {
        let e = hermitian_eig(&CMatrix::identity(5)).unwrap();
        assert!(e.values.iter().all(|&v| (v - 1.0).abs() < 1e-15));
    }

    #[test]
    fn jacobi_oracle_on_diagonal_inputs() {
        let m = CMatrix::from_real_diag(&[3.0, -1.0, 2.0]);
        assert_eq!(jacobi_oracle(&m), vec![-1.0, 2.0, 3.0]);
        let rot = CMatrix::from_real_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        let v = jacobi_oracle(&rot);
        assert!((v[0] - 1.0).abs() < 1e-14 && (v[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn random_hermitian_matches_jacobi() {
        for seed in 0..5 {
            let m = random_hermitian(6, seed);
            let e = hermitian_eig(&m).unwrap();
            let oracle = jacobi_oracle(&m);
            for (a, b) in e.values.iter().zip(&oracle) {
                assert!((a - b).abs() < 1e-9, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn residual_and_orthonormality() {
        let m = random_hermitian(30, 11);
        let e = hermitian_eig(&m).unwrap();
        let norm = m.norm_2();
        for k in 0..30 {
            let v = e.vectors.column(k);
            let mv = m.matvec(&v);
            let res: f64 = mv
                .iter()
                .zip(&v)
                .map(|(a, b)| (a - b * e.values[k]).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(res <= 1e-10 * norm, "residual {res}");
        }
        let gram = e.vectors.adjoint().matmul(&e.vectors);
        assert!(gram.max_abs_diff(&CMatrix::identity(30)) < 1e-10);
    }

    #[test]
    fn not_hermitian_is_rejected() {
        let m = CMatrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]);
        assert!(matches!(hermitian_eig(&m), Err(KernelError::NotHermitian { .. })));
    }

    #[test]
    fn lambda_max_agrees_with_full_solve() {
        for seed in 0..4 {
            let m = random_hermitian(25, 100 + seed);
            let all = hermitian_eigvals(&m).unwrap();
            let top = hermitian_lambda_max(&m).unwrap();
            assert!((top - all[24]).abs() < 1e-11);
        }
        // tridiagonal path
        let n = 50;
        let t = CMatrix::from_fn(n, n, |i, j| match i.abs_diff(j) {
            0 => C64::new(2.0, 0.0),
            1 => C64::new(-1.0, 0.0),
            _ => ZERO,
        });
        let exact = 2.0 - 2.0 * (std::f64::consts::PI * n as f64 / (n as f64 + 1.0)).cos();
        assert!((hermitian_lambda_max(&t).unwrap() - exact).abs() < 1e-12);
    }

    #[test]
    fn complex_tridiagonal_uses_phases() {
        let m = CMatrix::from_rows(&[
            vec![C64::new(1.0, 0.0), C64::new(0.0, 2.0), ZERO],
            vec![C64::new(0.0, -2.0), C64::new(-1.0, 0.0), C64::new(1.0, 1.0)],
            vec![ZERO, C64::new(1.0, -1.0), C64::new(0.5, 0.0)],
        ]);
        let e = hermitian_eig(&m).unwrap();
        let oracle = jacobi_oracle(&m);
        for (a, b) in e.values.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-12);
        }
        for k in 0..3 {
            let v = e.vectors.column(k);
            let mv = m.matvec(&v);
            for (a, b) in mv.iter().zip(&v) {
                assert!((a - b * e.values[k]).norm() < 1e-12);
            }
        }
    }
}
