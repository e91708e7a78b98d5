use super::shape::Shape;
use super::{nrange_with, zero_in_shape, PencilSection, RangeError};
use crate::matkernel::{CMatrix, C64, I};
use crate::region::{geometry, DEFAULT_ANGLES};

/// Distance from the origin to the convex hull of `points`.
pub fn hull_distance_to_origin(points: &[C64]) -> f64 {
    if points.is_empty() {
        return f64::INFINITY;
    }
    if points.iter().all(|z| z.im == 0.0) {
        let lo = points.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
        let hi = points.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
        return if lo > 0.0 {
            lo
        } else if hi < 0.0 {
            -hi
        } else {
            0.0
        };
    }
    let hull = geometry::convex_hull(points);
    geometry::polygon_distance(C64::new(0.0, 0.0), &hull)
}

#[derive(Debug, Clone)]
enum Route {
    /// Simultaneously diagonal: `W(A−λB) = conv{a_i − λ b_i}` exactly.
    Diagonal { a: Vec<C64>, b: Vec<C64> },
    /// `B = βI`: `W(A−λB) = W(A) − λβ`.
    ScalarB { beta: C64, hull: Vec<C64> },
    /// Hermitian `A`, `B`: `W(A−λB)` is the image of `W(A+iB)` under the
    /// real-linear map `u + iv ↦ u − λv`.
    HermitianPair { hull: Vec<C64> },
    /// Anything else: angle scan on the structured pencil.
    Scan { a: Shape, b: Shape },
}

/// Decides `0 ∈ closure W(A − λB)` up to a tolerance, for many `λ`.
#[derive(Debug, Clone)]
pub struct PencilOracle {
    route: Route,
    angles: usize,
}

impl PencilOracle {
    pub fn new(p: &PencilSection) -> Result<Self, RangeError> {
        Self::with_angles(p, DEFAULT_ANGLES)
    }

    pub fn with_angles(p: &PencilSection, angles: usize) -> Result<Self, RangeError> {
        let (a, b) = (&p.a, &p.b);
        let route = if a.is_diagonal() && b.is_diagonal() {
            Route::Diagonal {
                a: a.diag(),
                b: b.diag(),
            }
        } else if let Some(beta) = b.as_scalar() {
            Route::ScalarB {
                beta,
                hull: polygon_of(a, angles)?,
            }
        } else if a.is_hermitian() && b.is_hermitian() {
            let joint = a + &b.scale(I);
            Route::HermitianPair {
                hull: polygon_of(&joint, angles)?,
            }
        } else {
            Route::Scan {
                a: Shape::of(a),
                b: Shape::of(b),
            }
        };
        Ok(Self { route, angles })
    }

    /// `dist(0, W(A − λB))` when the route computes it directly.
    pub fn distance(&self, lambda: C64) -> Option<f64> {
        match &self.route {
            Route::Diagonal { a, b } => {
                let pts: Vec<C64> = a.iter().zip(b).map(|(&x, &y)| x - lambda * y).collect();
                Some(hull_distance_to_origin(&pts))
            }
            Route::ScalarB { beta, hull } => Some(geometry::polygon_distance(lambda * beta, hull)),
            Route::HermitianPair { hull } => {
                let pts: Vec<C64> = hull.iter().map(|z| C64::new(z.re, 0.0) - lambda * z.im).collect();
                if lambda.im == 0.0 {
                    Some(hull_distance_to_origin(&pts))
                } else {
                    // a non-singular real-linear image keeps convex order
                    Some(geometry::polygon_distance(C64::new(0.0, 0.0), &pts))
                }
            }
            Route::Scan { .. } => None,
        }
    }

    /// `0 ∈ W(A − λB)` within `tol`.
    pub fn contains(&self, lambda: C64, tol: f64) -> bool {
        match &self.route {
            Route::Scan { a, b } => zero_in_shape(&a.pencil(lambda, b), tol, self.angles),
            _ => self.distance(lambda).is_some_and(|d| d <= tol),
        }
    }

    /// True when membership is decided by an exact distance rather than an
    /// angle scan.
    pub fn is_exact(&self) -> bool {
        matches!(self.route, Route::Diagonal { .. })
    }
}

/// Circumscribed polygon of `W(M)`, cleaned of near-duplicate vertices.
fn polygon_of(m: &CMatrix, angles: usize) -> Result<Vec<C64>, RangeError> {
    let s = nrange_with(m, angles)?;
    let scale = s.scale().max(f64::MIN_POSITIVE);
    Ok(geometry::clean_hull(&s.polygon(), 1e-12 * scale))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn routes_agree_with_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let h = |rng: &mut ChaCha8Rng| {
            let g = CMatrix::from_fn(4, 4, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            (&g + &g.adjoint()).scale_real(0.5)
        };
        let a = h(&mut rng);
        let b = h(&mut rng);
        let p = PencilSection::new(a.clone(), b.clone()).unwrap();
        let oracle = PencilOracle::new(&p).unwrap();
        let scan = Route::Scan {
            a: Shape::of(&a),
            b: Shape::of(&b),
        };
        let scan = PencilOracle {
            route: scan,
            angles: DEFAULT_ANGLES,
        };
        let mut disagreements = 0;
        for _ in 0..400 {
            let l = c(rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0));
            if oracle.contains(l, 1e-3) != scan.contains(l, 1e-3) {
                // only allowed right at the boundary
                let d = oracle.distance(l).unwrap();
                assert!((d - 1e-3).abs() < 1e-3, "disagreement away from boundary: {l} {d}");
                disagreements += 1;
            }
        }
        assert!(disagreements < 10);
    }

    #[test]
    fn diagonal_route_is_exact() {
        let p = PencilSection::new(
            CMatrix::from_real_diag(&[2.0, 6.0, 12.0]),
            CMatrix::from_real_diag(&[1.0, 4.0, 9.0]),
        )
        .unwrap();
        let o = PencilOracle::new(&p).unwrap();
        assert!(o.is_exact());
        assert!(o.contains(c(1.5, 0.0), 0.0));
        assert!(o.contains(c(4.0 / 3.0, 0.0), 0.0));
        assert!(!o.contains(c(4.0 / 3.0 - 1e-9, 0.0), 0.0));
        assert!(!o.contains(c(1.0, 0.0), 0.0));
    }

    #[test]
    fn scalar_b_translates() {
        let j = CMatrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]);
        let p = PencilSection::new(j, CMatrix::identity(2).scale_real(2.0)).unwrap();
        let o = PencilOracle::new(&p).unwrap();
        // W(A, 2I) = W(A)/2: disk radius 1/4
        assert!(o.contains(c(0.24, 0.0), 0.0));
        assert!(!o.contains(c(0.26, 0.0), 0.0));
    }
}
