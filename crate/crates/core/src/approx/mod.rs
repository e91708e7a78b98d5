//! Spectral approximation sweeps, cluster tracking across truncation levels,
//! and construction of spurious eigenvalues in diagonal families.

mod inject;
mod sweep;

use serde::{Deserialize, Serialize};

use crate::gallery::{GalleryError, TruncationSpec};
use crate::matkernel::C64;
use crate::ranges::RangeError;
use crate::region::Raster;

pub use inject::{inject_pollution, InjectedVector, Injection};
pub use sweep::{run_sweep, run_sweep_with, SweepOptions};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ApproxError {
    #[error("invalid sweep: {0}")]
    InvalidSweep(String),
    #[error("no opposite tail pair for target {target} within the search depth")]
    NoOppositePair { target: C64 },
    #[error("target {target} is not in the estimated essential numerical range")]
    TargetOutsideEssentialRange { target: C64 },
    #[error("pollution injection needs a diagonal family, got '{0}'")]
    NotDiagonal(String),
    #[error(transparent)]
    Gallery(#[from] GalleryError),
    #[error(transparent)]
    Range(#[from] RangeError),
    #[error(transparent)]
    Region(#[from] crate::region::RegionError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    Converged,
    SpuriousCandidate,
    Unresolved,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub location: C64,
    /// Consecutive levels, ending at the last, with a matched eigenvalue.
    pub persistence: usize,
    /// Largest step between matched eigenvalues of consecutive levels.
    pub drift: f64,
    /// Matched eigenvalues, oldest level first.
    pub trail: Vec<C64>,
    pub classification: Classification,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub spec: TruncationSpec,
    pub eigenvalues: Vec<C64>,
    /// Eigenvalues came from σ_min minimization on a λ-grid.
    #[serde(default)]
    pub fallback: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// What a sweep is compared against.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Reference {
    /// Region where spurious eigenvalues may accumulate, e.g. an estimate
    /// of `W_e(A,B)`.
    pub region: Option<Raster>,
    /// Known spectrum, when available.
    pub spectrum: Option<Vec<C64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralRun {
    pub family: String,
    pub levels: Vec<Level>,
    pub reference: Option<Reference>,
    pub clusters: Vec<Cluster>,
    pub flags: Vec<String>,
}

impl SpectralRun {
    pub fn new(family: impl Into<String>, levels: Vec<Level>) -> Self {
        Self {
            family: family.into(),
            levels,
            reference: None,
            clusters: Vec::new(),
            flags: Vec::new(),
        }
    }

    pub fn with_reference(mut self, reference: Reference) -> Self {
        self.reference = Some(reference);
        self
    }

    pub fn clusters_of(&self, c: Classification) -> impl Iterator<Item = &Cluster> {
        self.clusters.iter().filter(move |k| k.classification == c)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let pair = |z: &C64| serde_json::json!([z.re, z.im]);
        serde_json::json!({
            "family": self.family,
            "levels": self.levels.iter().map(|l| {
                let mut v = serde_json::json!({
                    "spec": l.spec,
                    "eigenvalues": l.eigenvalues.iter().map(pair).collect::<Vec<_>>(),
                    "fallback": l.fallback,
                });
                if let Some(e) = &l.error {
                    v["error"] = serde_json::json!(e);
                }
                v
            }).collect::<Vec<_>>(),
            "clusters": self.clusters.iter().map(|c| serde_json::json!({
                "location": pair(&c.location),
                "persistence": c.persistence,
                "drift": c.drift,
                "classification": c.classification,
                "trail": c.trail.iter().map(pair).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
            "flags": self.flags,
        })
    }

    /// One row per eigenvalue per level.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("level,spec,index,re,im\n");
        for (li, l) in self.levels.iter().enumerate() {
            let spec = match l.spec {
                TruncationSpec::Diagonal { n } => format!("n={n}"),
                TruncationSpec::Interval { half_length, points } => format!("L={half_length};N={points}"),
            };
            for (i, z) in l.eigenvalues.iter().enumerate() {
                out.push_str(&format!("{li},{spec},{i},{:.12e},{:.12e}\n", z.re, z.im));
            }
        }
        out
    }
}

/// Single-linkage radius used by [`classify`]: ten drift tolerances.
pub fn cluster_radius(tol_drift: f64) -> f64 {
    10.0 * tol_drift
}

/// Tracks every eigenvalue of the last level back through the sweep and
/// labels the resulting clusters.
///
/// A cluster is converged when it persisted over `min_persistence` levels
/// with drift at most `tol_drift`, unless a known reference spectrum is
/// given and the cluster sits away from it inside the reference region, in
/// which case it is a spurious candidate. Drifting or short-lived clusters
/// inside the reference region are spurious candidates; the rest are
/// unresolved.
pub fn classify(run: &SpectralRun, tol_drift: f64, min_persistence: usize) -> SpectralRun {
    let radius = cluster_radius(tol_drift);
    let mut out = run.clone();
    out.clusters.clear();
    let Some(last) = run.levels.iter().rposition(|l| l.error.is_none()) else {
        return out;
    };
    // merge numerically repeated eigenvalues of the last level
    let mut reps: Vec<C64> = Vec::new();
    let mut sorted = run.levels[last].eigenvalues.clone();
    sorted.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    for z in sorted {
        if !reps.iter().any(|r| (r - z).norm() <= tol_drift) {
            reps.push(z);
        }
    }
    let region = run.reference.as_ref().and_then(|r| r.region.as_ref());
    let spectrum = run.reference.as_ref().and_then(|r| r.spectrum.as_ref());
    let in_region = |z: C64| region.is_some_and(|r| r.near(z, r.cell_diagonal()));
    for loc in reps {
        let mut trail = vec![loc];
        let mut drift: f64 = 0.0;
        let mut cur = loc;
        for l in run.levels[..last].iter().rev() {
            if l.error.is_some() {
                break;
            }
            let best = l
                .eigenvalues
                .iter()
                .copied()
                .min_by(|a, b| (a - cur).norm().total_cmp(&(b - cur).norm()));
            match best {
                Some(z) if (z - cur).norm() <= radius => {
                    drift = drift.max((z - cur).norm());
                    trail.push(z);
                    cur = z;
                }
                _ => break,
            }
        }
        trail.reverse();
        let persistence = trail.len();
        let stable = persistence >= min_persistence && drift <= tol_drift;
        let classification = if stable {
            let away = spectrum.is_some_and(|s| s.iter().all(|p| (p - loc).norm() > radius));
            if away && (region.is_none() || in_region(loc)) {
                Classification::SpuriousCandidate
            } else {
                Classification::Converged
            }
        } else if in_region(loc) {
            Classification::SpuriousCandidate
        } else {
            Classification::Unresolved
        };
        out.clusters.push(Cluster {
            location: loc,
            persistence,
            drift,
            trail,
            classification,
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::region::Rect;

    fn level(n: usize, ev: Vec<C64>) -> Level {
        Level {
            spec: TruncationSpec::Diagonal { n },
            eigenvalues: ev,
            fallback: false,
            error: None,
        }
    }

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn constant_eigenvalue_converges() {
        let run = SpectralRun::new("synthetic", (1..=4).map(|k| level(k * 2, vec![c(2.0)])).collect());
        let run = classify(&run, 1e-6, 3);
        assert_eq!(run.clusters.len(), 1);
        assert_eq!(run.clusters[0].classification, Classification::Converged);
        assert_eq!(run.clusters[0].location, c(2.0));
        assert_eq!(run.clusters[0].persistence, 4);
    }

    #[test]
    fn wandering_eigenvalue_depends_on_reference() {
        let values = [0.1, 0.9, 0.3, 0.7, 0.45];
        let run = SpectralRun::new(
            "synthetic",
            values
                .iter()
                .enumerate()
                .map(|(k, &v)| level(k + 2, vec![c(v)]))
                .collect(),
        );
        let plain = classify(&run, 1e-3, 3);
        assert_eq!(plain.clusters[0].classification, Classification::Unresolved);
        let rect = Rect::symmetric(-1.0, 2.0, 0.5);
        let region = Raster::from_predicate(rect, 30, 11, |z| (0.0..=1.0).contains(&z.re) && z.im.abs() < 0.1).unwrap();
        let refd = classify(
            &run.with_reference(Reference {
                region: Some(region),
                spectrum: None,
            }),
            1e-3,
            3,
        );
        assert_eq!(refd.clusters[0].classification, Classification::SpuriousCandidate);
    }

    #[test]
    fn stable_point_off_known_spectrum_is_spurious() {
        let run = SpectralRun::new("synthetic", (1..=3).map(|k| level(k, vec![c(1.0), c(0.5)])).collect());
        let run = run.with_reference(Reference {
            region: None,
            spectrum: Some(vec![c(1.0)]),
        });
        let run = classify(&run, 1e-8, 3);
        let spurious: Vec<_> = run.clusters_of(Classification::SpuriousCandidate).collect();
        assert_eq!(spurious.len(), 1);
        assert_eq!(spurious[0].location, c(0.5));
    }

    #[test]
    fn serialization() {
        let run = classify(
            &SpectralRun::new("s", vec![level(2, vec![c(1.0), C64::new(0.0, 2.0)])]),
            1e-6,
            1,
        );
        let j = run.to_json();
        assert_eq!(j["levels"][0]["eigenvalues"][1], serde_json::json!([0.0, 2.0]));
        assert_eq!(j["clusters"][0]["classification"], "converged");
        let csv = run.to_csv();
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.lines().nth(1).unwrap().starts_with("0,n=2,0,"));
    }
}
