use rayon::prelude::*;

use super::{ApproxError, Level, SpectralRun};
use crate::gallery::{PencilFamily, TruncationSpec};
use crate::matkernel::{smallest_singular_value, KernelError, C64};
use crate::ranges::PencilSection;
use crate::region::Rect;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOptions {
    /// λ-grid searched when `B` is too ill-conditioned to invert.
    pub fallback_rect: Rect,
    pub fallback_res: (usize, usize),
    /// Local minima of `σ_min(A−λB)/(‖A‖ + |λ|‖B‖)` below this are reported.
    pub fallback_tol: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            fallback_rect: Rect::symmetric(-10.0, 10.0, 10.0),
            fallback_res: (201, 201),
            fallback_tol: 1e-3,
        }
    }
}

pub fn run_sweep(family: &PencilFamily, specs: &[TruncationSpec]) -> Result<SpectralRun, ApproxError> {
    run_sweep_with(family, specs, &SweepOptions::default())
}

fn grows(a: &TruncationSpec, b: &TruncationSpec) -> bool {
    match (*a, *b) {
        (TruncationSpec::Diagonal { n: n1 }, TruncationSpec::Diagonal { n: n2 }) => n2 > n1,
        (
            TruncationSpec::Interval {
                half_length: l1,
                points: p1,
            },
            TruncationSpec::Interval {
                half_length: l2,
                points: p2,
            },
        ) => (l2 > l1 && p2 >= p1) || (l2 == l1 && p2 > p1),
        _ => false,
    }
}

/// Eigenvalues of every level. Levels run in parallel; a failing level is
/// recorded in its `error` field and does not abort the sweep.
pub fn run_sweep_with(
    family: &PencilFamily,
    specs: &[TruncationSpec],
    opts: &SweepOptions,
) -> Result<SpectralRun, ApproxError> {
    if specs.len() < 3 {
        return Err(ApproxError::InvalidSweep(format!(
            "need at least 3 levels, got {}",
            specs.len()
        )));
    }
    if let Some(w) = specs.windows(2).find(|w| !grows(&w[0], &w[1])) {
        return Err(ApproxError::InvalidSweep(format!(
            "levels must grow strictly: {:?} then {:?}",
            w[0], w[1]
        )));
    }
    let sections = specs.iter().map(|t| family.section(t)).collect::<Result<Vec<_>, _>>()?;
    let levels: Vec<Level> = sections
        .par_iter()
        .zip(specs)
        .map(|(p, &spec)| match p.generalized_eigenvalues() {
            Ok(ev) => Level {
                spec,
                eigenvalues: ev,
                fallback: false,
                error: None,
            },
            Err(KernelError::SingularB { .. }) => Level {
                spec,
                eigenvalues: sigma_min_minima(p, opts),
                fallback: true,
                error: None,
            },
            Err(e) => Level {
                spec,
                eigenvalues: Vec::new(),
                fallback: false,
                error: Some(e.to_string()),
            },
        })
        .collect();
    let mut run = SpectralRun::new(family.name.clone(), levels);
    if let Some(l) = proportional(&sections[0]) {
        run.flags.push(format!(
            "degenerate pencil: A = λB with λ = {l}, every section has spectrum {{λ}}"
        ));
    }
    if run.levels.iter().any(|l| l.fallback) {
        run.flags
            .push("singular B: some levels located by σ_min minimization".into());
    }
    Ok(run)
}

/// `Some(λ)` when `A = λB` up to rounding.
fn proportional(p: &PencilSection) -> Option<C64> {
    let bb: f64 = p.b.as_slice().iter().map(|z| z.norm_sqr()).sum();
    if bb == 0.0 {
        return None;
    }
    let ab: C64 =
        p.a.as_slice()
            .iter()
            .zip(p.b.as_slice())
            .map(|(a, b)| a * b.conj())
            .sum();
    let l = ab / bb;
    let r = p.a.sub_scaled(l, &p.b).norm_fro();
    (r <= 1e-12 * p.a.norm_fro().max(f64::MIN_POSITIVE)).then_some(l)
}

fn sigma_min_minima(p: &PencilSection, opts: &SweepOptions) -> Vec<C64> {
    let (nx, ny) = opts.fallback_res;
    let r = opts.fallback_rect;
    let (dx, dy) = (r.width() / nx as f64, r.height() / ny as f64);
    let (na, nb) = (p.a.norm_2(), p.b.norm_2());
    let at = |ix: usize, iy: usize| C64::new(r.re_min + (ix as f64 + 0.5) * dx, r.im_min + (iy as f64 + 0.5) * dy);
    let vals: Vec<f64> = (0..nx * ny)
        .into_par_iter()
        .map(|k| {
            let l = at(k % nx, k / nx);
            smallest_singular_value(&p.at(l)) / (na + l.norm() * nb).max(f64::MIN_POSITIVE)
        })
        .collect();
    let mut out = Vec::new();
    for iy in 0..ny {
        for ix in 0..nx {
            let v = vals[iy * nx + ix];
            if v > opts.fallback_tol {
                continue;
            }
            let is_min = (iy.saturating_sub(1)..(iy + 2).min(ny))
                .all(|jy| (ix.saturating_sub(1)..(ix + 2).min(nx)).all(|jx| vals[jy * nx + jx] >= v));
            if is_min {
                out.push(at(ix, iy));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::{classify, Classification};
    use crate::gallery::{diagonal, jt_pencil, reciprocal_pair};

    fn sizes(ns: &[usize]) -> Vec<TruncationSpec> {
        ns.iter().map(|&n| TruncationSpec::Diagonal { n }).collect()
    }

    #[test]
    fn jt_pencil_sweep_is_exact() {
        let run = run_sweep(&jt_pencil(), &sizes(&[20, 40, 80])).unwrap();
        for (l, n) in run.levels.iter().zip([10i64, 20, 40]) {
            let mut re: Vec<f64> = l.eigenvalues.iter().map(|z| z.re).collect();
            re.sort_by(f64::total_cmp);
            let mut want: Vec<f64> = (1..=n).flat_map(|k| [k as f64, -k as f64]).collect();
            want.sort_by(f64::total_cmp);
            assert_eq!(re, want);
        }
        let run = classify(&run, 1e-10, 1);
        assert!(run
            .clusters
            .iter()
            .all(|c| c.classification == Classification::Converged));
    }

    #[test]
    fn reciprocal_pair_is_flagged() {
        let run = run_sweep(&reciprocal_pair(), &sizes(&[5, 10, 20])).unwrap();
        assert!(run.flags.iter().any(|f| f.contains("degenerate")));
        for l in &run.levels {
            assert!(l.eigenvalues.iter().all(|z| (z - 1.0).norm() < 1e-12));
        }
    }

    #[test]
    fn singular_b_falls_back_to_grid() {
        // b_1 = 0: one infinite eigenvalue, finite ones a_n/b_n = 1..
        let f = diagonal(
            "singular",
            |n| C64::new(n, 0.0),
            |n| C64::new(if n == 1.0 { 0.0 } else { 1.0 }, 0.0),
        );
        let mut opts = SweepOptions::default();
        opts.fallback_rect = Rect::symmetric(-0.05, 6.05, 0.5);
        opts.fallback_res = (61, 5);
        let run = run_sweep_with(&f, &sizes(&[3, 4, 5]), &opts).unwrap();
        assert!(run.levels.iter().all(|l| l.fallback));
        let last = &run.levels[2].eigenvalues;
        for k in 2..=5 {
            assert!(last.iter().any(|z| (z - k as f64).norm() < 0.06), "{k}: {last:?}");
        }
    }

    #[test]
    fn rejects_short_or_shrinking_sweeps() {
        assert!(run_sweep(&jt_pencil(), &sizes(&[4, 8])).is_err());
        assert!(run_sweep(&jt_pencil(), &sizes(&[4, 8, 6])).is_err());
    }
}
