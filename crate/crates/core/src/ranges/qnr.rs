//! Quadratic numerical range of a 2×2 block matrix.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::RangeError;
use crate::matkernel::{dot, CMatrix, C64};

fn unit_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..n)
            .map(|_| C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)))
            .collect();
        let norm = crate::matkernel::vec_norm(&v);
        if norm > 1e-300 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

/// Both eigenvalues of `T_{x,y} = [[⟨Ax,x⟩, ⟨By,x⟩], [⟨Cx,y⟩, ⟨Dy,y⟩]]`
/// where `T = [[A, B], [C, D]]` is split after row/column `p`.
pub fn qnr_pair(t: &CMatrix, p: usize, x: &[C64], y: &[C64]) -> Result<[C64; 2], RangeError> {
    let n = t.rows();
    if !t.is_square() || p == 0 || p >= n || x.len() != p || y.len() != n - p {
        return Err(RangeError::InvalidBlocks { p, n });
    }
    let mut ex = x.to_vec();
    ex.resize(n, C64::new(0.0, 0.0));
    let mut ey = vec![C64::new(0.0, 0.0); p];
    ey.extend_from_slice(y);
    let tx = t.matvec(&ex);
    let ty = t.matvec(&ey);
    let a = dot(&tx[..p], x);
    let c = dot(&tx[p..], y);
    let b = dot(&ty[..p], x);
    let d = dot(&ty[p..], y);
    let half = (a + d) * 0.5;
    let root = (((a - d) * 0.5).powi(2) + b * c).sqrt();
    Ok([half + root, half - root])
}

/// Eigenvalues of `samples` random compressions `T_{x,y}` with seeded unit
/// vectors; `2·samples` points.
pub fn qnr_sample(t: &CMatrix, p: usize, samples: usize, seed: u64) -> Result<Vec<C64>, RangeError> {
    let n = t.rows();
    if !t.is_square() || p == 0 || p >= n {
        return Err(RangeError::InvalidBlocks { p, n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(2 * samples);
    for _ in 0..samples {
        let x = unit_vector(&mut rng, p);
        let y = unit_vector(&mut rng, n - p);
        out.extend(qnr_pair(t, p, &x, &y)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matkernel::hermitian_eig;
    use crate::ranges::nrange;

    #[test]
    fn block_diagonal_samples_stay_in_block_ranges() {
        let t = CMatrix::from_real_diag(&[-3.0, -1.0, 2.0, 5.0]);
        for z in qnr_sample(&t, 2, 500, 1).unwrap() {
            let re = z.re;
            assert!(z.im.abs() < 1e-12);
            assert!((-3.0 - 1e-12..=-1.0 + 1e-12).contains(&re) || (2.0 - 1e-12..=5.0 + 1e-12).contains(&re));
        }
    }

    #[test]
    fn extremal_vectors_reach_block_boundaries() {
        let t = CMatrix::from_real_rows(&[
            vec![1.0, 2.0, 0.5, 0.0],
            vec![2.0, -1.0, 0.0, 0.3],
            vec![0.1, 0.0, 4.0, 1.0],
            vec![0.0, 0.2, 1.0, 3.0],
        ]);
        let a = t.submatrix(0, 0, 2, 2);
        let c = t.submatrix(2, 0, 2, 2);
        let e = hermitian_eig(&a).unwrap();
        // extremal eigenvector of Re A: a boundary point of W(A)
        let x = e.vectors.column(1);
        let cx = c.matvec(&x);
        // y ⊥ Cx makes T_{x,y} triangular with ⟨Ax,x⟩ on the diagonal
        let norm = crate::matkernel::vec_norm(&cx);
        let y = vec![-cx[1].conj() / norm, cx[0].conj() / norm];
        let pts = qnr_pair(&t, 2, &x, &y).unwrap();
        let boundary = a.quadratic_form(&x);
        assert!((boundary.re - nrange(&a).unwrap().values()[0]).abs() < 1e-12);
        assert!(pts.iter().any(|z| (z - boundary).norm() < 1e-9));
        assert!(qnr_pair(&t, 0, &[], &y).is_err());
    }
}
