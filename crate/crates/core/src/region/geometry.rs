//! Small exact routines on convex polygons in the complex plane.

use crate::matkernel::C64;

fn cross(o: C64, a: C64, b: C64) -> f64 {
    (a.re - o.re) * (b.im - o.im) - (a.im - o.im) * (b.re - o.re)
}

/// Convex hull, counter-clockwise, without collinear points. Degenerate
/// input yields one or two vertices.
pub fn convex_hull(points: &[C64]) -> Vec<C64> {
    let mut pts: Vec<C64> = points.iter().copied().filter(|z| z.is_finite()).collect();
    pts.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut hull: Vec<C64> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &C64>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    if hull.len() == 2 && hull[0] == hull[1] {
        hull.pop();
    }
    hull
}

/// True when the vertices are in strictly convex counter-clockwise (or
/// clockwise) position.
pub fn is_convex_position(vertices: &[C64]) -> bool {
    let n = vertices.len();
    if n <= 2 {
        return true;
    }
    let mut sign = 0.0;
    for i in 0..n {
        let c = cross(vertices[i], vertices[(i + 1) % n], vertices[(i + 2) % n]);
        if c == 0.0 {
            return false;
        }
        if sign == 0.0 {
            sign = c.signum();
        } else if c.signum() != sign {
            return false;
        }
    }
    true
}

pub fn segment_distance(z: C64, a: C64, b: C64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (z - a).norm();
    }
    let t = (((z - a) * ab.conj()).re / len2).clamp(0.0, 1.0);
    (z - (a + ab * t)).norm()
}

/// Euclidean distance from `z` to the convex hull of `hull` (vertices in
/// convex order, either orientation); zero inside.
pub fn polygon_distance(z: C64, hull: &[C64]) -> f64 {
    match hull.len() {
        0 => f64::INFINITY,
        1 => (z - hull[0]).norm(),
        2 => segment_distance(z, hull[0], hull[1]),
        n => {
            let area: f64 = (0..n)
                .map(|i| {
                    let (a, b) = (hull[i], hull[(i + 1) % n]);
                    a.re * b.im - a.im * b.re
                })
                .sum();
            let orientation = area.signum();
            if orientation == 0.0 {
                // collinear: distance to the extreme segment
                let far = hull.iter().copied().fold(hull[0], |best, p| {
                    if (p - hull[0]).norm() > (best - hull[0]).norm() {
                        p
                    } else {
                        best
                    }
                });
                let other = hull.iter().copied().fold(far, |best, p| {
                    if (p - far).norm() > (best - far).norm() {
                        p
                    } else {
                        best
                    }
                });
                return segment_distance(z, far, other);
            }
            let inside = (0..n).all(|i| cross(hull[i], hull[(i + 1) % n], z) * orientation >= 0.0);
            if inside {
                return 0.0;
            }
            (0..n)
                .map(|i| segment_distance(z, hull[i], hull[(i + 1) % n]))
                .fold(f64::INFINITY, f64::min)
        }
    }
}

/// Convex hull with vertices closer than `tol` to their predecessor merged.
pub fn clean_hull(points: &[C64], tol: f64) -> Vec<C64> {
    let hull = convex_hull(points);
    let mut out: Vec<C64> = Vec::with_capacity(hull.len());
    for p in hull {
        if out.last().map_or(true, |q| (p - *q).norm() > tol) {
            out.push(p);
        }
    }
    while out.len() > 1 && (out[0] - out[out.len() - 1]).norm() <= tol {
        out.pop();
    }
    out
}

/// Distance from `z` to a finite point set.
pub fn point_set_distance(z: C64, points: &[C64]) -> f64 {
    points.iter().map(|p| (z - p).norm()).fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn hull_drops_interior_and_collinear() {
        let pts = [
            c(0.0, 0.0),
            c(1.0, 0.0),
            c(0.5, 0.0),
            c(1.0, 1.0),
            c(0.0, 1.0),
            c(0.5, 0.5),
        ];
        let h = convex_hull(&pts);
        assert_eq!(h.len(), 4);
        assert!(is_convex_position(&h));
        assert_eq!(convex_hull(&[c(1.0, 1.0), c(1.0, 1.0)]), vec![c(1.0, 1.0)]);
        assert_eq!(convex_hull(&[c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)]).len(), 2);
    }

    #[test]
    fn distances() {
        let square = convex_hull(&[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 1.0), c(0.0, 1.0)]);
        assert_eq!(polygon_distance(c(0.5, 0.5), &square), 0.0);
        assert!((polygon_distance(c(2.0, 0.5), &square) - 1.0).abs() < 1e-15);
        assert!((polygon_distance(c(2.0, 2.0), &square) - 2f64.sqrt()).abs() < 1e-15);
        assert!((polygon_distance(c(0.5, 1.0), &[c(0.0, 0.0), c(1.0, 0.0)]) - 1.0).abs() < 1e-15);
        assert!((point_set_distance(c(3.0, 4.0), &[c(0.0, 0.0), c(10.0, 0.0)]) - 5.0).abs() < 1e-15);
    }
}
