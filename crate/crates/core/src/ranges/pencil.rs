use super::{nrange, support_distance, PencilOracle, PencilSection, RangeError};
use crate::matkernel::{hpd_invsqrt, smallest_singular_value, C64};
use crate::region::{Raster, Rect, SupportFn, DEFAULT_ANGLES};

/// Raster of `{λ : 0 ∈ W(A − λB)}` with membership tolerance one cell
/// diagonal.
pub fn pencil_range(p: &PencilSection, rect: Rect, nx: usize, ny: usize) -> Result<Raster, RangeError> {
    let probe = Raster::empty(rect, nx, ny)?;
    pencil_range_with_tol(p, rect, nx, ny, probe.cell_diagonal())
}

pub fn pencil_range_with_tol(
    p: &PencilSection,
    rect: Rect,
    nx: usize,
    ny: usize,
    tol: f64,
) -> Result<Raster, RangeError> {
    let oracle = PencilOracle::new(p)?;
    Ok(Raster::from_predicate(rect, nx, ny, |z| oracle.contains(z, tol))?)
}

/// Bisects the segment from a member point to a non-member point of
/// `{λ : 0 ∈ W(A − λB)}` (tolerance `tol`) down to `abs_tol`.
pub fn refine_boundary(oracle: &PencilOracle, inside: C64, outside: C64, tol: f64, abs_tol: f64) -> C64 {
    let (mut a, mut b) = (inside, outside);
    for _ in 0..200 {
        if (b - a).norm() <= abs_tol {
            break;
        }
        let mid = (a + b) * 0.5;
        if mid == a || mid == b {
            break;
        }
        if oracle.contains(mid, tol) {
            a = mid;
        } else {
            b = mid;
        }
    }
    (a + b) * 0.5
}

/// `w(A,B) = W(B^{−1/2} A B^{−1/2})` for Hermitian positive definite `B`.
pub fn w_range_hpd(p: &PencilSection) -> Result<SupportFn, RangeError> {
    let s = hpd_invsqrt(&p.b)?;
    if p.a.is_diagonal() && p.b.is_diagonal() {
        let d: Vec<C64> = p.a.diag().iter().zip(s.diag()).map(|(&a, s)| a * s * s).collect();
        return Ok(SupportFn::from_points(&d, DEFAULT_ANGLES));
    }
    nrange(&s.matmul(&p.a).matmul(&s))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolventBound {
    /// `1/(dist(0,W(B))·dist(λ,W(A,B)))`, absent when either distance is 0.
    pub bound: Option<f64>,
    /// `‖(A − λB)⁻¹‖ = 1/σ_min(A − λB)`.
    pub actual: f64,
    /// False when `dist(λ,W(A,B))` could only be bounded from below (non-
    /// positive-definite `B`); the bound is then weaker but still valid.
    pub exact: bool,
}

/// Resolvent norm of the pencil at `λ` against its numerical-range bound.
pub fn resolvent_bound(p: &PencilSection, lambda: C64) -> Result<ResolventBound, RangeError> {
    let pencil = p.at(lambda);
    let sigma = smallest_singular_value(&pencil);
    let actual = if sigma > 0.0 { 1.0 / sigma } else { f64::INFINITY };

    let wb = nrange(&p.b)?;
    let d0 = support_distance(&wb, C64::new(0.0, 0.0));
    if d0 <= 0.0 {
        return Ok(ResolventBound {
            bound: None,
            actual,
            exact: true,
        });
    }
    let positive = p.b.is_hermitian() && hpd_invsqrt(&p.b).is_ok();
    if positive {
        let w = w_range_hpd(p)?;
        let dl = support_distance(&w, lambda);
        return Ok(ResolventBound {
            bound: (dl > 0.0).then(|| 1.0 / (d0 * dl)),
            actual,
            exact: true,
        });
    }
    // dist(0, W(A−μB)) ≥ d − |λ−μ|·‖B‖, so dist(λ, W(A,B)) ≥ d/‖B‖.
    let h = nrange(&pencil)?;
    let d = -h.values().iter().copied().fold(f64::INFINITY, f64::min);
    let bnorm = p.b.norm_2();
    Ok(ResolventBound {
        bound: (d > 0.0).then(|| bnorm / (d0 * d)),
        actual,
        exact: false,
    })
}

/// `(A, B)` from the real diagonals `a`, `b`.
#[cfg(test)]
pub(crate) fn diag_pencil(a: &[f64], b: &[f64]) -> PencilSection {
    use crate::matkernel::CMatrix;
    PencilSection::new(CMatrix::from_real_diag(a), CMatrix::from_real_diag(b)).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matkernel::{CMatrix, I};
    use crate::ranges::nrange;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn unifpos(n: usize) -> PencilSection {
        let a: Vec<f64> = (1..=n).map(|k| (k * k + k) as f64).collect();
        let b: Vec<f64> = (1..=n).map(|k| (k * k) as f64).collect();
        diag_pencil(&a, &b)
    }

    #[test]
    fn unifpos_raster_is_interval() {
        let n = 50;
        // 0.005-wide cells centred on the real axis
        let rect = Rect::new(0.5, 2.5, -0.0025 * 5.0, 0.0025 * 5.0).unwrap();
        let r = pencil_range(&unifpos(n), rect, 400, 5).unwrap();
        let cell = r.cell_diagonal();
        let lo = 1.0 + 1.0 / n as f64;
        for ix in 0..400 {
            let z = r.center(ix, 2);
            if z.re >= lo + cell && z.re <= 2.0 - cell {
                assert!(r.get(ix, 2), "{z}");
            }
            if z.re < lo - cell || z.re > 2.0 + cell {
                assert!(!r.get(ix, 2), "{z}");
            }
            assert!(!r.get(ix, 0) && !r.get(ix, 4));
        }
    }

    #[test]
    fn identity_b_reduces_to_operator_range() {
        let j = CMatrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]);
        let rect = Rect::new(-1.0, 1.0, -1.0, 1.0).unwrap();
        let r = pencil_range(&PencilSection::operator(j.clone()), rect, 60, 60).unwrap();
        let s = nrange(&j).unwrap();
        let tol = r.cell_diagonal();
        for iy in 0..60 {
            for ix in 0..60 {
                let z = r.center(ix, iy);
                assert_eq!(r.get(ix, iy), s.distance(z) <= tol, "{z}");
            }
        }
    }

    #[test]
    fn hpd_reduction_examples() {
        let s = w_range_hpd(&unifpos(30)).unwrap();
        let (lo, hi) = s.real_extent();
        assert!((lo - (1.0 + 1.0 / 30.0)).abs() < 1e-12 && (hi - 2.0).abs() < 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let a = CMatrix::from_fn(4, 4, |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let w = w_range_hpd(&PencilSection::operator(a.clone())).unwrap();
        let direct = nrange(&a).unwrap();
        for (x, y) in w.values().iter().zip(direct.values()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn resolvent_examples() {
        let p = diag_pencil(&[2.0, 6.0, 12.0], &[1.0, 4.0, 9.0]);
        let r = resolvent_bound(&p, C64::new(0.0, 0.0)).unwrap();
        assert!((r.actual - 0.5).abs() < 1e-12);
        assert!((r.bound.unwrap() - 0.75).abs() < 1e-9, "{:?}", r.bound);

        let p = PencilSection::operator(CMatrix::identity(3));
        let r = resolvent_bound(&p, C64::new(0.0, 0.0)).unwrap();
        assert!((r.actual - 1.0).abs() < 1e-12 && (r.bound.unwrap() - 1.0).abs() < 1e-9);

        // λ inside the range: no bound
        let r = resolvent_bound(&diag_pencil(&[2.0, 6.0], &[1.0, 4.0]), C64::new(1.75, 0.0)).unwrap();
        assert!(r.bound.is_none());
    }

    #[test]
    fn weak_bound_for_rotated_b() {
        let b = CMatrix::identity(3).scale(C64::new(1.0, 1.0));
        let b = &b + &CMatrix::from_real_rows(&[vec![0.0, 0.2, 0.0], vec![0.0, 0.0, 0.2], vec![0.0; 3]]);
        let a = CMatrix::from_real_diag(&[1.0, 2.0, 3.0]);
        let p = PencilSection::new(a, b).unwrap();
        let lambda = I * 3.0;
        let r = resolvent_bound(&p, lambda).unwrap();
        assert!(!r.exact);
        assert!(r.actual <= r.bound.unwrap() * (1.0 + 1e-6));
    }
}
