use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::geometry;
use crate::matkernel::C64;

pub const DEFAULT_ANGLES: usize = 720;

/// A convex set stored through its support function `h(θ) = max Re(e^{−iθ}z)`
/// on the uniform grid `θ_k = 2πk/K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportFn {
    angles_count: usize,
    values: Vec<f64>,
}

impl SupportFn {
    pub fn from_values(values: Vec<f64>) -> Self {
        assert!(!values.is_empty(), "support function needs at least one angle");
        Self {
            angles_count: values.len(),
            values,
        }
    }

    pub fn from_fn(k: usize, f: impl Fn(f64) -> f64) -> Self {
        Self::from_values((0..k).map(|i| f(TAU * i as f64 / k as f64)).collect())
    }

    /// Support function of the convex hull of a finite point set.
    pub fn from_points(points: &[C64], k: usize) -> Self {
        Self::from_fn(k, |theta| {
            let rot = C64::from_polar(1.0, -theta);
            points.iter().map(|p| (rot * p).re).fold(f64::NEG_INFINITY, f64::max)
        })
    }

    pub fn angles_count(&self) -> usize {
        self.angles_count
    }

    pub fn angle(&self, k: usize) -> f64 {
        TAU * k as f64 / self.angles_count as f64
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `Re(e^{−iθ_k} z) ≤ h(θ_k) + slack` for every grid angle.
    pub fn contains(&self, z: C64, slack: f64) -> bool {
        self.max_violation(z) <= slack
    }

    /// `max_k Re(e^{−iθ_k} z) − h(θ_k)`: positive outside, and then a lower
    /// bound on the distance to the set.
    pub fn max_violation(&self, z: C64) -> f64 {
        (0..self.angles_count)
            .map(|k| (C64::from_polar(1.0, -self.angle(k)) * z).re - self.values[k])
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Vertices of the circumscribed polygon: intersections of consecutive
    /// supporting lines.
    pub fn polygon(&self) -> Vec<C64> {
        let k = self.angles_count;
        if k < 3 {
            return Vec::new();
        }
        (0..k)
            .map(|i| {
                let j = (i + 1) % k;
                let (s1, c1) = self.angle(i).sin_cos();
                let (s2, c2) = self.angle(j).sin_cos();
                let det = c1 * s2 - s1 * c2;
                let (h1, h2) = (self.values[i], self.values[j]);
                C64::new((h1 * s2 - h2 * s1) / det, (c1 * h2 - c2 * h1) / det)
            })
            .collect()
    }

    /// Leftmost and rightmost real parts, `[-h(π), h(0)]`.
    pub fn real_extent(&self) -> (f64, f64) {
        let half = self.angles_count / 2;
        let left = if self.angles_count % 2 == 0 {
            -self.values[half]
        } else {
            f64::NAN
        };
        (left, self.values[0])
    }

    /// Euclidean distance from `z` to the circumscribed polygon.
    pub fn distance(&self, z: C64) -> f64 {
        let poly = geometry::convex_hull(&self.polygon());
        geometry::polygon_distance(z, &poly)
    }

    pub fn scale(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }
}

/// `∀θ_k: Re(e^{−iθ_k}z) ≤ h(θ_k) + slack`.
pub fn support_contains(s: &SupportFn, z: C64, slack: f64) -> bool {
    s.contains(z, slack)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segment_membership() {
        let s = SupportFn::from_points(&[C64::new(0.0, 0.0), C64::new(1.0, 0.0)], DEFAULT_ANGLES);
        assert!(support_contains(&s, C64::new(0.5, 0.0), 0.0));
        assert!(!support_contains(&s, C64::new(0.0, 1.0), 0.0));
    }

    #[test]
    fn disk_membership() {
        let s = SupportFn::from_fn(DEFAULT_ANGLES, |_| 0.5);
        assert!(s.contains(C64::new(0.49, 0.0), 0.0));
        assert!(!s.contains(C64::new(0.51, 0.0), 0.0));
    }

    #[test]
    fn polygon_resamples_to_same_values() {
        let pts = [
            C64::new(0.0, 0.0),
            C64::new(0.0, 1.0),
            C64::new(1.0, 0.0),
            C64::new(-0.3, 0.2),
        ];
        let s = SupportFn::from_points(&pts, 360);
        let back = SupportFn::from_points(&s.polygon(), 360);
        let scale = s.scale();
        for (a, b) in s.values().iter().zip(back.values()) {
            assert!((a - b).abs() <= 1e-12 * scale);
        }
        assert_eq!(s.real_extent(), (-0.3, 1.0));
    }
}
