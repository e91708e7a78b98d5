//! Acceptance criteria as runnable checks. Each criterion returns an
//! [`Outcome`]; `pencilrange check` and the `acceptance` test target print
//! one line per criterion.

mod properties;

use std::f64::consts::PI;
use std::fmt;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::approx::{classify, inject_pollution, run_sweep, Classification, Level, Reference, SpectralRun};
use crate::enclosures::{
    dirac_excluded, multiplier_spectrum_estimate_with, stokes_member, stokes_region, EnclosureSpec,
};
use crate::gallery::{
    dirac1d, hain_lust, jt_operator, jt_pencil, schrodinger1d, sl_indefinite, stokes_symbol, unifpos, Coefficient,
    EssRange, TruncationSpec,
};
use crate::matkernel::{
    general_eig, hermitian_eig, hermitian_eigvals, polar_multiplier, smallest_singular_value, CMatrix, C64,
};
use crate::ranges::{
    ess_range_tail, pencil_range, refine_boundary, resolvent_bound, support_distance, w_range_hpd, PencilOracle,
    PencilSection, TailOptions,
};
use crate::region::{hausdorff_to_points, Raster, Rect};

pub use properties::{property_suite, PropertyReport};

/// Tolerances and budgets, one block per criterion.
pub mod pins {
    pub const C1_N: usize = 200;
    pub const C1_ENDPOINT_TOL: f64 = 1e-9;
    pub const C1_BUDGET_S: f64 = 5.0;

    pub const C2_SIZES: [usize; 3] = [10, 20, 40];
    pub const C2_EXACT_TOL: f64 = 1e-10;
    pub const C2_TARGETS: [f64; 3] = [0.25, 0.5, 0.75];
    pub const C2_INJECT_TOL: f64 = 1e-8;
    pub const C2_BUDGET_S: f64 = 5.0;

    pub const C3_RES: usize = 800;
    pub const C3_RANDOM_PAIRS: usize = 50;

    pub const C4_POINTS: usize = 2000;
    pub const C4_PHI_STEPS: usize = 6;
    pub const C4_RADII: [f64; 3] = [1.0, 3.0, 10.0];
    pub const C4_BUDGET_S: f64 = 30.0;

    pub const C5_LENGTHS: [f64; 3] = [20.0, 40.0, 80.0];
    pub const C5_POINTS_PER_UNIT: f64 = 40.0;
    pub const C5_GAP: f64 = 0.9;
    pub const C5_DRIFT: f64 = 1e-3;
    pub const C5_CELLS: f64 = 2.0;
    pub const C5_BUDGET_S: f64 = 180.0;

    pub const C6_LENGTHS: [f64; 3] = [6.0, 8.0, 10.0];
    pub const C6_POINTS: usize = 1200;
    pub const C6_ORACLE_POINTS: usize = 4000;
    pub const C6_IM_TOL: f64 = 1e-6;
    pub const C6_AGREE_TOL: f64 = 1e-4;
    pub const C6_BUDGET_S: f64 = 300.0;

    pub const C7_SAMPLES: usize = 100;
    pub const C7_DIM: usize = 8;
    pub const C7_BUDGET_S: f64 = 120.0;

    pub const C8_PAIRS: usize = 100;
    pub const C8_LAMBDAS: usize = 50;
    pub const C8_DIRAC_POINTS: usize = 800;
    pub const C8_DIRAC_LAMBDAS: usize = 100;
    pub const C8_ALLOWANCE: f64 = 5e-3;
    pub const C8_BUDGET_S: f64 = 120.0;

    pub const C9_LENGTHS: [f64; 3] = [8.0, 12.0, 16.0];
    pub const C9_STEP: f64 = 0.1;
    pub const C9_AWAY: f64 = 0.1;
    pub const C9_DRIFT: f64 = 1e-3;
    pub const C9_WINDOW: f64 = 20.0;
    pub const C9_BUDGET_S: f64 = 180.0;

    pub const C10_SEEDS: [u64; 3] = [1, 2, 3];
}

use pins::*;

#[derive(Debug, Clone)]
pub struct Outcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "criterion {:>2} {} {} ({:.2}s): {}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.title,
            self.elapsed.as_secs_f64(),
            self.detail
        )
    }
}

struct Checks {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Checks {
    fn new() -> Self {
        Self {
            failures: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    fn finish(self, id: u8, title: &'static str, start: Instant, budget_s: Option<f64>) -> Outcome {
        let elapsed = start.elapsed();
        let mut failures = self.failures;
        if let Some(b) = budget_s {
            if elapsed.as_secs_f64() > b {
                failures.push(format!("runtime {:.1}s over budget {b}s", elapsed.as_secs_f64()));
            }
        }
        let mut parts = failures.clone();
        parts.extend(self.notes);
        Outcome {
            id,
            title,
            passed: failures.is_empty(),
            detail: parts.join("; "),
            elapsed,
        }
    }

    fn fail_with<E: fmt::Display>(mut self, e: E, id: u8, title: &'static str, start: Instant) -> Outcome {
        self.failures.push(format!("error: {e}"));
        self.finish(id, title, start, None)
    }
}

macro_rules! tryc {
    ($c:expr, $e:expr, $id:expr, $title:expr, $start:expr) => {
        match $e {
            Ok(v) => v,
            Err(e) => return $c.fail_with(e, $id, $title, $start),
        }
    };
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn gaussian(rng: &mut ChaCha8Rng) -> C64 {
    c(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| gaussian(rng))
}

fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    let h = random_matrix(rng, n);
    let h = (&h + &h.adjoint()).scale_real(0.5);
    hermitian_eig(&h).expect("hermitian input").vectors
}

/// Hermitian matrix with eigenvalues drawn uniformly from `[lo, hi]`.
fn random_hermitian_in(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> CMatrix {
    let u = random_unitary(rng, n);
    let d: Vec<f64> = (0..n).map(|_| rng.gen_range(lo..=hi)).collect();
    u.matmul(&CMatrix::from_real_diag(&d)).matmul(&u.adjoint())
}

fn block_diag(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (p, q) = (a.rows(), b.rows());
    CMatrix::from_fn(p + q, p + q, |i, j| match (i < p, j < p) {
        (true, true) => a[(i, j)],
        (false, false) => b[(i - p, j - p)],
        _ => C64::new(0.0, 0.0),
    })
}

pub fn criterion_1() -> Outcome {
    let (id, title, start) = (1, "non-closed ranges of a uniformly positive pencil", Instant::now());
    let mut ck = Checks::new();
    let f = unifpos();
    let p = tryc!(ck, f.section(&TruncationSpec::Diagonal { n: C1_N }), id, title, start);
    let lo_want = 1.0 + 1.0 / C1_N as f64;

    // pencil range: endpoints by bisection on the exact oracle
    let oracle = tryc!(ck, PencilOracle::new(&p), id, title, start);
    let mid = c(1.5, 0.0);
    let hi = refine_boundary(&oracle, mid, c(3.0, 0.0), 0.0, 1e-13);
    let lo = refine_boundary(&oracle, mid, c(0.5, 0.0), 0.0, 1e-13);
    ck.check(
        (lo.re - lo_want).abs() <= C1_ENDPOINT_TOL,
        format!("pencil_range lower end {}", lo.re),
    );
    ck.check(
        (hi.re - 2.0).abs() <= C1_ENDPOINT_TOL,
        format!("pencil_range upper end {}", hi.re),
    );
    let rect = Rect::symmetric(0.5, 2.5, 0.01);
    let r = tryc!(ck, pencil_range(&p, rect, 2001, 3), id, title, start);
    let (cell, diag) = (r.cell_size().0, r.cell_diagonal());
    for ix in 0..2001 {
        let z = r.center(ix, 1);
        let inside = z.re >= lo_want - cell && z.re <= 2.0 + cell;
        let edge = (z.re - lo_want).abs() <= diag || (z.re - 2.0).abs() <= diag;
        ck.check(r.get(ix, 1) == inside || edge, format!("raster cell {z}"));
    }

    // ratio range through B^{-1/2}AB^{-1/2}
    let w = tryc!(ck, w_range_hpd(&p), id, title, start);
    let k = w.angles_count();
    let (wmax, wmin) = (w.values()[0], -w.values()[k / 2]);
    ck.check(
        (wmin - lo_want).abs() <= C1_ENDPOINT_TOL,
        format!("w_range_hpd lower end {wmin}"),
    );
    ck.check(
        (wmax - 2.0).abs() <= C1_ENDPOINT_TOL,
        format!("w_range_hpd upper end {wmax}"),
    );

    // λ = 1 is never reached: a_n − b_n = n > 0
    for n in 2..=C1_N {
        let p = tryc!(ck, f.section(&TruncationSpec::Diagonal { n }), id, title, start);
        let o = tryc!(ck, PencilOracle::new(&p), id, title, start);
        let d = o.distance(c(1.0, 0.0)).unwrap_or(0.0);
        ck.check(d > 0.0, format!("λ = 1 member at N = {n}"));
    }
    ck.note(format!(
        "W = [{:.12}, {:.12}], w = [{wmin:.12}, {wmax:.12}]",
        lo.re, hi.re
    ));
    ck.finish(id, title, start, Some(C1_BUDGET_S))
}

pub fn criterion_2() -> Outcome {
    let (id, title, start) = (2, "JT pencil exactness and injected pollution", Instant::now());
    let mut ck = Checks::new();
    let specs: Vec<TruncationSpec> = C2_SIZES
        .iter()
        .map(|&n| TruncationSpec::Diagonal { n: 2 * n })
        .collect();
    let run = tryc!(ck, run_sweep(&jt_pencil(), &specs), id, title, start);
    for (l, &n) in run.levels.iter().zip(&C2_SIZES) {
        let mut got: Vec<C64> = l.eigenvalues.clone();
        got.sort_by(|a, b| a.re.total_cmp(&b.re));
        let mut want: Vec<f64> = (1..=n as i64).flat_map(|k| [k as f64, -k as f64]).collect();
        want.sort_by(f64::total_cmp);
        let err = got.iter().zip(&want).map(|(z, &w)| (z - w).norm()).fold(0.0, f64::max);
        ck.check(
            got.len() == want.len() && err <= C2_EXACT_TOL,
            format!("N = {n}: error {err:e}"),
        );
    }
    let spectrum: Vec<C64> = (1..=100)
        .flat_map(|k| [c(k as f64, 0.0), c(-(k as f64), 0.0)])
        .collect();
    let classified = classify(
        &run.clone().with_reference(Reference {
            region: None,
            spectrum: Some(spectrum.clone()),
        }),
        C2_EXACT_TOL,
        1,
    );
    let spurious = classified.clusters_of(Classification::SpuriousCandidate).count();
    ck.check(
        spurious == 0,
        format!("{spurious} spurious clusters in the pencil sweep"),
    );

    // operator form: fill (0, 1) with spurious eigenvalues
    let targets: Vec<C64> = C2_TARGETS.iter().map(|&t| c(t, 0.0)).collect();
    let mut levels = Vec::new();
    for base in [20, 30, 40] {
        let inj = tryc!(
            ck,
            inject_pollution(&jt_operator(), base, &targets, 40),
            id,
            title,
            start
        );
        let ev = tryc!(ck, inj.section.generalized_eigenvalues(), id, title, start);
        for t in &targets {
            let d = ev.iter().map(|z| (z - t).norm()).fold(f64::INFINITY, f64::min);
            ck.check(d <= C2_INJECT_TOL, format!("target {t} missed by {d:e} at base {base}"));
        }
        levels.push(Level {
            spec: TruncationSpec::Diagonal { n: inj.section.dim() },
            eigenvalues: ev,
            fallback: false,
            error: None,
        });
    }
    let region = tryc!(
        ck,
        ess_range_tail(
            &jt_operator(),
            Rect::symmetric(-2.0, 2.0, 0.02),
            81,
            3,
            &TailOptions::new(vec![40, 80], 80)
        ),
        id,
        title,
        start
    );
    let run = SpectralRun::new("jt-operator-injected", levels).with_reference(Reference {
        region: Some(region),
        spectrum: Some(spectrum),
    });
    let run = classify(&run, C2_INJECT_TOL, 3);
    for t in &targets {
        let hit = run
            .clusters
            .iter()
            .find(|k| (k.location - t).norm() <= C2_INJECT_TOL)
            .map(|k| k.classification);
        ck.check(
            hit == Some(Classification::SpuriousCandidate),
            format!("target {t} classified {hit:?}"),
        );
    }
    let converged = run.clusters_of(Classification::Converged).count();
    ck.note(format!("{converged} true eigenvalues converged, 3 injected flagged"));
    ck.finish(id, title, start, Some(C2_BUDGET_S))
}

pub fn criterion_3() -> Outcome {
    let (id, title, start) = (3, "gap multiplier", Instant::now());
    let mut ck = Checks::new();
    let t = CMatrix::from_real_diag(&[-3.0, -1.0, 2.0, 5.0]);
    let b = CMatrix::from_real_diag(&[-1.0, -1.0, 1.0, 1.0]);
    let p = tryc!(ck, PencilSection::new(b.matmul(&t), b), id, title, start);
    // row 400 of 800 is centred on the real axis
    let dy = 10.0 / C3_RES as f64;
    let rect = tryc!(
        ck,
        Rect::new(-4.0, 6.0, -5.0 - dy / 2.0, 5.0 - dy / 2.0),
        id,
        title,
        start
    );
    let r = tryc!(ck, pencil_range(&p, rect, C3_RES, C3_RES), id, title, start);
    let cell = r.cell_diagonal();
    let row = C3_RES / 2;
    // exact section range: ⟨Bx,x⟩ → 0 along e_1 + e_3 sends the quotient off to ±∞
    let exact = |x: f64| x <= -1.0 || x >= 2.0;
    let formula = |x: f64| (-3.0..=-1.0).contains(&x) || (2.0..=5.0).contains(&x);
    let near_edge = |x: f64| [-1.0, 2.0].iter().any(|e| (x - e).abs() <= cell);
    let (mut axis_bad, mut conf_bad, mut formula_missing, mut beyond_formula) = (0, 0, 0, 0);
    for ix in 0..C3_RES {
        let z = r.center(ix, row);
        if r.get(ix, row) != exact(z.re) && !near_edge(z.re) {
            axis_bad += 1;
        }
        if formula(z.re) && !r.get(ix, row) {
            formula_missing += 1;
        }
        if r.get(ix, row) && !formula(z.re) && !near_edge(z.re) {
            beyond_formula += 1;
        }
        for iy in 0..C3_RES {
            let z = r.center(ix, iy);
            if r.get(ix, iy) && !(exact(z.re - cell) || exact(z.re + cell)) {
                conf_bad += 1;
            }
        }
    }
    ck.check(
        axis_bad == 0,
        format!("{axis_bad} real-axis cells disagree with (−∞,−1] ∪ [2,∞)"),
    );
    ck.check(
        conf_bad == 0,
        format!("{conf_bad} cells outside Re λ ∈ (−∞,−1] ∪ [2,∞)"),
    );
    ck.check(
        formula_missing == 0,
        format!("{formula_missing} cells of [−3,−1] ∪ [2,5] missing"),
    );
    ck.note(format!(
        "real axis matches (−∞,−1] ∪ [2,∞) ⊋ [−3,−1] ∪ [2,5]; {beyond_formula} axis cells lie beyond the block-spectrum hulls"
    ));

    // random gapped Hermitian T with arbitrary coupling
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut violations = 0;
    for _ in 0..C3_RANDOM_PAIRS {
        let (p1, p2) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
        let gap_lo: f64 = rng.gen_range(-2.0..0.5);
        let gap_hi = gap_lo + rng.gen_range(0.3..2.0);
        let t1 = random_hermitian_in(&mut rng, p1, gap_lo - 3.0, gap_lo);
        let t2 = random_hermitian_in(&mut rng, p2, gap_hi, gap_hi + 3.0);
        let coupling = random_matrix(&mut rng, p1.max(p2)).scale_real(rng.gen_range(0.0..2.0));
        let n = p1 + p2;
        let full = CMatrix::from_fn(n, n, |i, j| match (i < p1, j < p1) {
            (true, true) => t1[(i, j)],
            (false, false) => t2[(i - p1, j - p1)],
            (true, false) => coupling[(i, j - p1)],
            (false, true) => coupling[(j, i - p1)].conj(),
        });
        let a = hermitian_eigvals(&t1).map(|v| v[p1 - 1]).unwrap_or(f64::NAN);
        let bb = hermitian_eigvals(&t2).map(|v| v[0]).unwrap_or(f64::NAN);
        let bm = block_diag(&CMatrix::identity(p1).scale_real(-1.0), &CMatrix::identity(p2));
        let Ok(pp) = PencilSection::new(bm.matmul(&full), bm) else {
            violations += 1;
            continue;
        };
        let rect = Rect::symmetric(gap_lo - 4.0, gap_hi + 4.0, 3.0);
        // fewer angles only enlarge the computed set
        let (Ok(o), Ok(probe)) = (PencilOracle::with_angles(&pp, 128), Raster::empty(rect, 60, 30)) else {
            violations += 1;
            continue;
        };
        let cell = probe.cell_diagonal();
        let Ok(raster) = Raster::from_predicate(rect, 60, 30, |z| o.contains(z, cell)) else {
            violations += 1;
            continue;
        };
        violations += raster
            .points()
            .iter()
            .filter(|z| !(z.re <= a + cell || z.re >= bb - cell))
            .count();
    }
    ck.check(
        violations == 0,
        format!("{violations} half-plane violations over {C3_RANDOM_PAIRS} random pairs"),
    );
    ck.finish(id, title, start, None)
}

pub fn criterion_4() -> Outcome {
    let (id, title, start) = (4, "Stokes enclosure figures", Instant::now());
    let mut ck = Checks::new();
    let u0 = c(-1.0, 1.0);
    let spec = EnclosureSpec::stokes(EssRange::points(vec![u0]));
    let rect = Rect::symmetric(-6.0, 6.0, 6.0);
    let region = tryc!(ck, stokes_region(&spec, rect, 400, 400), id, title, start);
    let cell = region.cell_diagonal();
    let (mut outside, mut total, mut apex) = (0, 0, 0);
    for j in 0..=C4_PHI_STEPS {
        let gd = C64::from_polar(1.0, j as f64 * PI / C4_PHI_STEPS as f64);
        for k in 0..C4_POINTS {
            for z in stokes_symbol(u0, gd, k as f64 * 0.01) {
                total += 1;
                // at the apex of the wedge near 0 no cell centre is within one cell
                let ok = if !rect.contains(z) {
                    stokes_member(&spec.essran, z, cell)
                } else if region.near(z, cell) {
                    true
                } else {
                    apex += 1;
                    stokes_member(&spec.essran, z, 1e-9)
                };
                if !ok {
                    outside += 1;
                }
            }
        }
    }
    ck.check(
        outside == 0,
        format!("{outside} of {total} symbol points outside the enclosure"),
    );
    ck.note(format!("{apex} in-box points decided by exact membership"));
    for r in C4_RADII {
        let s = EnclosureSpec::stokes(EssRange::Circle {
            center: c(0.0, 0.0),
            radius: r,
        });
        let reg = tryc!(
            ck,
            stokes_region(&s, Rect::symmetric(-1.5 * r, 1.5 * r, 1.5 * r), 201, 201),
            id,
            title,
            start
        );
        let hole = reg.complement().points().iter().filter(|z| z.norm() < r / 2.0).count();
        let want_hole = r > 1.0;
        ck.check(
            (hole > 0) == want_hole,
            format!("R = {r}: {hole} excluded cells within |λ| < R/2"),
        );
        ck.note(format!("R={r}: hole {hole}"));
    }
    ck.finish(id, title, start, Some(C4_BUDGET_S))
}

pub fn sl_family() -> crate::gallery::PencilFamily {
    sl_indefinite(1.0, 1.0, Coefficient::parse("-2*step(1,3)").expect("literal"), 0.0, 0.0).expect("valid family")
}

fn interval(l: f64, per_unit: f64) -> TruncationSpec {
    TruncationSpec::Interval {
        half_length: l,
        points: (2.0 * l * per_unit).round() as usize - 1,
    }
}

pub fn criterion_5() -> Outcome {
    let (id, title, start) = (5, "indefinite Sturm–Liouville confinement", Instant::now());
    let mut ck = Checks::new();
    let f = sl_family();
    let specs: Vec<_> = C5_LENGTHS.iter().map(|&l| interval(l, C5_POINTS_PER_UNIT)).collect();
    let run = tryc!(ck, run_sweep(&f, &specs), id, title, start);
    let run = classify(&run, C5_DRIFT, C5_LENGTHS.len());
    let gap: Vec<_> = run
        .clusters
        .iter()
        .filter(|k| k.location.re.abs() < C5_GAP && k.location.im.abs() < C5_GAP)
        .collect();
    ck.check(!gap.is_empty(), "no eigenvalue found in the gap");
    for k in &gap {
        ck.check(
            k.persistence == C5_LENGTHS.len() && k.drift < C5_DRIFT,
            format!(
                "gap cluster {:.6} persistence {} drift {:e}",
                k.location, k.persistence, k.drift
            ),
        );
    }
    ck.note(format!(
        "gap eigenvalues {:?}",
        gap.iter().map(|k| format!("{:.8}", k.location)).collect::<Vec<_>>()
    ));

    // a window of physical length ℓ sees the operator from 1 + π²/ℓ² on
    let mut opts = TailOptions::new(vec![0, 40], 1200);
    opts.truncation = Some(interval(40.0, C5_POINTS_PER_UNIT));
    let rect = Rect::symmetric(-3.0, 3.0, 3.0);
    let r = tryc!(ck, ess_range_tail(&f, rect, 61, 61, &opts), id, title, start);
    let dx = r.cell_size().0;
    let slack = C5_CELLS * dx;
    let mut bad = 0;
    for ix in 0..61 {
        let z = r.center(ix, 30);
        if z.re.abs() >= 1.0 + slack && !r.get(ix, 30) {
            bad += 1;
        }
        if z.re.abs() <= C5_GAP - slack && r.get(ix, 30) {
            bad += 1;
        }
    }
    ck.check(
        bad == 0,
        format!("{bad} real-axis cells of the tail estimate misplaced"),
    );
    ck.finish(id, title, start, Some(C5_BUDGET_S))
}

fn lowest(ev: &[C64]) -> Option<C64> {
    ev.iter().copied().min_by(|a, b| a.norm().total_cmp(&b.norm()))
}

pub fn criterion_6() -> Outcome {
    let (id, title, start) = (6, "PT-symmetric Schrödinger exactness", Instant::now());
    let mut ck = Checks::new();
    let f = schrodinger1d(Coefficient::parse("i*x^3").expect("literal"));
    let oracle_spec = TruncationSpec::Interval {
        half_length: 10.0,
        points: C6_ORACLE_POINTS,
    };
    let p = tryc!(ck, f.section(&oracle_spec), id, title, start);
    let ev = tryc!(ck, p.generalized_eigenvalues(), id, title, start);
    let Some(reference) = lowest(&ev) else {
        return ck.fail_with("empty spectrum", id, title, start);
    };
    let specs: Vec<_> = C6_LENGTHS
        .iter()
        .map(|&l| TruncationSpec::Interval {
            half_length: l,
            points: C6_POINTS,
        })
        .collect();
    let run = tryc!(ck, run_sweep(&f, &specs), id, title, start);
    let lows: Vec<C64> = run.levels.iter().filter_map(|l| lowest(&l.eigenvalues)).collect();
    ck.check(lows.len() == specs.len(), "a level failed");
    for (z, l) in lows.iter().zip(C6_LENGTHS) {
        ck.check(z.im.abs() < C6_IM_TOL, format!("L = {l}: Im λ = {:e}", z.im));
    }
    if let [.., a, b] = lows[..] {
        ck.check(
            (a - b).norm() < C6_AGREE_TOL,
            format!("two finest levels differ by {:e}", (a - b).norm()),
        );
        ck.check(
            (b - reference).norm() < C6_AGREE_TOL,
            format!("oracle differs by {:e}", (b - reference).norm()),
        );
    }
    ck.note(format!(
        "λ_min = {:.9} (oracle {:.9})",
        lows.last().copied().unwrap_or_default(),
        reference
    ));
    ck.finish(id, title, start, Some(C6_BUDGET_S))
}

fn spectrum_box(ev: &[C64], margin: f64) -> Rect {
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for z in ev {
        x0 = x0.min(z.re);
        x1 = x1.max(z.re);
        y0 = y0.min(z.im);
        y1 = y1.max(z.im);
    }
    Rect::new(x0 - margin, x1 + margin, y0 - margin, y1 + margin).expect("finite spectrum")
}

pub fn criterion_7() -> Outcome {
    let (id, title, start) = (7, "polar multiplier intersection", Instant::now());
    let mut ck = Checks::new();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut missed, mut not_excluded, mut non_monotone, mut probes) = (0, 0, 0, 0);
    let angles = 128;
    for _ in 0..C7_SAMPLES {
        let t = random_matrix(&mut rng, C7_DIM);
        let ev = tryc!(ck, general_eig(&t), id, title, start);
        let rect = spectrum_box(&ev, 1.0);
        let (nx, ny) = (30, 30);
        let probe = tryc!(ck, Raster::empty(rect, nx, ny), id, title, start);
        let cell = probe.cell_diagonal();

        // (b): every grid point with σ_min > one cell is excluded by its own multiplier
        for iy in 0..ny {
            for ix in 0..nx {
                let z = probe.center(ix, iy);
                if smallest_singular_value(&t.shift(-z)) <= cell {
                    continue;
                }
                probes += 1;
                let b = tryc!(ck, polar_multiplier(&t, z), id, title, start);
                let p = tryc!(ck, PencilSection::new(b.matmul(&t), b), id, title, start);
                let o = tryc!(ck, PencilOracle::with_angles(&p, angles), id, title, start);
                if o.contains(z, cell) {
                    not_excluded += 1;
                }
            }
        }

        // (a), (c): nested multiplier sets
        let coarse: Vec<C64> = (0..4)
            .flat_map(|i| (0..4).map(move |j| (i, j)))
            .map(|(i, j)| {
                c(
                    rect.re_min + (i as f64 + 0.5) * rect.width() / 4.0,
                    rect.im_min + (j as f64 + 0.5) * rect.height() / 4.0,
                )
            })
            .filter(|&z| smallest_singular_value(&t.shift(-z)) > 1e-6)
            .collect();
        // the estimate of a union of multiplier sets is the intersection of
        // the estimates of its parts, so each level only adds its new chunk
        let mut est: Option<Raster> = None;
        let mut last = f64::INFINITY;
        for chunk in std::iter::once(&[][..]).chain(coarse.chunks(4)) {
            let mut set = Vec::new();
            if est.is_none() {
                set.push(CMatrix::identity(C7_DIM));
            }
            for &z in chunk {
                set.push(tryc!(ck, polar_multiplier(&t, z), id, title, start));
            }
            let part = tryc!(
                ck,
                multiplier_spectrum_estimate_with(&t, &set, rect, nx, ny, angles),
                id,
                title,
                start
            );
            let next = match est.take() {
                None => part,
                Some(prev) => tryc!(ck, prev.intersect(&part), id, title, start),
            };
            let est = est.insert(next);
            missed += ev.iter().filter(|&&z| !est.near(z, est.cell_diagonal())).count();
            let h = hausdorff_to_points(&est, &ev).unwrap_or(f64::INFINITY);
            if h > last + 1e-12 {
                non_monotone += 1;
            }
            last = h;
        }
    }
    ck.check(missed == 0, format!("{missed} eigenvalues outside an estimate"));
    ck.check(
        not_excluded == 0,
        format!("{not_excluded} of {probes} polar probes not excluded"),
    );
    ck.check(non_monotone == 0, format!("{non_monotone} Hausdorff increases"));
    ck.note(format!("{probes} polar exclusions checked"));
    ck.finish(id, title, start, Some(C7_BUDGET_S))
}

pub fn criterion_8() -> Outcome {
    let (id, title, start) = (8, "resolvent bounds", Instant::now());
    let mut ck = Checks::new();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut violations, mut checked) = (0, 0);
    for _ in 0..C8_PAIRS {
        let n = rng.gen_range(2..=6);
        let a = random_matrix(&mut rng, n);
        let g = random_matrix(&mut rng, n);
        let b = g.matmul(&g.adjoint()).shift(c(0.1, 0.0));
        let p = tryc!(ck, PencilSection::new(a, b), id, title, start);
        let w = tryc!(ck, w_range_hpd(&p), id, title, start);
        let radius = w.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for _ in 0..C8_LAMBDAS {
            let z = C64::from_polar(radius * rng.gen_range(1.01..3.0), rng.gen_range(0.0..2.0 * PI));
            if support_distance(&w, z) <= 1e-6 {
                continue;
            }
            let rb = tryc!(ck, resolvent_bound(&p, z), id, title, start);
            checked += 1;
            match rb.bound {
                Some(bound) if rb.actual <= bound * (1.0 + 1e-9) => {}
                _ => violations += 1,
            }
        }
    }
    ck.check(
        violations == 0,
        format!("{violations} of {checked} pencil resolvent checks violated"),
    );

    // Dirac, V ≡ 0
    let f = dirac1d(Coefficient::real(0.0));
    let p = tryc!(
        ck,
        f.section(&TruncationSpec::Interval {
            half_length: 20.0,
            points: C8_DIRAC_POINTS,
        }),
        id,
        title,
        start
    );
    let spectrum = tryc!(ck, hermitian_eigvals(&p.a), id, title, start);
    let spec = EnclosureSpec::dirac(EssRange::points(vec![c(0.0, 0.0)]));
    let (mut dirac_bad, mut found, mut worst) = (0, 0, f64::NEG_INFINITY);
    while found < C8_DIRAC_LAMBDAS {
        let z = c(rng.gen_range(-3.0..3.0), rng.gen_range(-2.0..2.0));
        let ex = dirac_excluded(&spec, z, crate::enclosures::DEFAULT_PHI_GRID);
        let Some(bound) = ex.bound else { continue };
        found += 1;
        let sigma = spectrum.iter().map(|&mu| (z - mu).norm()).fold(f64::INFINITY, f64::min);
        let excess = 1.0 / sigma - bound;
        worst = worst.max(excess);
        if excess > C8_ALLOWANCE {
            dirac_bad += 1;
        }
    }
    ck.check(dirac_bad == 0, format!("{dirac_bad} Dirac bound violations"));
    ck.note(format!("{checked} pencil checks; Dirac worst excess {worst:.3e}"));
    ck.finish(id, title, start, Some(C8_BUDGET_S))
}

pub fn criterion_9() -> Outcome {
    let (id, title, start) = (9, "Hain–Lüst truncation", Instant::now());
    let mut ck = Checks::new();
    let (f, report) = hain_lust(
        Coefficient::parse("x^2").expect("literal"),
        Coefficient::real(1.0),
        Coefficient::parse("x").expect("literal"),
        Coefficient::parse("2*step(0,inf)").expect("literal"),
        C9_LENGTHS[2],
        interval(C9_LENGTHS[2], 1.0 / C9_STEP).size(),
    );
    ck.check(report.warnings.is_empty(), format!("conditions: {:?}", report.warnings));
    let specs: Vec<_> = C9_LENGTHS.iter().map(|&l| interval(l, 1.0 / C9_STEP)).collect();
    let run = tryc!(ck, run_sweep(&f, &specs), id, title, start);
    let run = classify(&run, C9_DRIFT, C9_LENGTHS.len());
    let ess = [c(0.0, 0.0), c(2.0, 0.0)];
    let away = |z: C64| ess.iter().map(|e| (z - e).norm()).fold(f64::INFINITY, f64::min);
    let stable: Vec<C64> = run.clusters_of(Classification::Converged).map(|k| k.location).collect();
    let mut drifting = Vec::new();
    let mut stray = 0;
    for k in run
        .clusters
        .iter()
        .filter(|k| k.location.norm() <= C9_WINDOW && away(k.location) > C9_AWAY)
    {
        if k.drift >= C9_DRIFT {
            drifting.push(k);
        }
        let persistent = k.persistence == C9_LENGTHS.len();
        let explained = stable.iter().any(|s| (s - k.location).norm() <= C9_DRIFT);
        if persistent && !explained {
            stray += 1;
        }
    }
    let worst = drifting.iter().map(|k| k.drift).fold(0.0, f64::max);
    ck.check(
        drifting.is_empty(),
        format!(
            "{} clusters beyond 0.1 of {{0,2}} drift ≥ 1e-3 (worst {worst:.2e}, nearest to {{0,2}} at {:.3})",
            drifting.len(),
            drifting.iter().map(|k| away(k.location)).fold(f64::INFINITY, f64::min)
        ),
    );
    ck.check(
        stray == 0,
        format!("{stray} persistent clusters outside the stabilized set"),
    );
    // drift between the two finest levels only
    let finest: Vec<f64> = drifting
        .iter()
        .map(|k| {
            let n = k.trail.len();
            if n >= 2 {
                (k.trail[n - 1] - k.trail[n - 2]).norm()
            } else {
                f64::INFINITY
            }
        })
        .collect();
    if !finest.is_empty() {
        ck.note(format!(
            "drift between the two finest levels ≤ {:.2e}",
            finest.iter().copied().fold(0.0, f64::max)
        ));
    }
    ck.note(format!("{} stabilized eigenvalues in |λ| ≤ {C9_WINDOW}", stable.len()));
    ck.finish(id, title, start, Some(C9_BUDGET_S))
}

pub fn criterion_10() -> Outcome {
    let (id, title, start) = (10, "property suites", Instant::now());
    let mut ck = Checks::new();
    let mut total = 0;
    for seed in C10_SEEDS {
        for r in property_suite(seed) {
            total += r.checks;
            ck.check(
                r.violations.is_empty(),
                format!("seed {seed} {}: {:?}", r.name, r.violations.first()),
            );
        }
    }
    ck.note(format!("{total} checks over seeds {C10_SEEDS:?}"));
    ck.finish(id, title, start, None)
}

pub type Criterion = fn() -> Outcome;

pub const ALL: [Criterion; 10] = [
    criterion_1,
    criterion_2,
    criterion_3,
    criterion_4,
    criterion_5,
    criterion_6,
    criterion_7,
    criterion_8,
    criterion_9,
    criterion_10,
];

/// Runs every criterion in order, printing each line as it completes.
pub fn run_all(mut sink: impl FnMut(&Outcome)) -> Vec<Outcome> {
    ALL.iter()
        .map(|c| {
            let o = c();
            sink(&o);
            o
        })
        .collect()
}
