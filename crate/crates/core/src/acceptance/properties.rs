//! Seeded property sweeps over the invariants of the kernel, the range
//! computations and the raster algebra.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{c, random_hermitian_in, random_matrix};
use crate::matkernel::{
    general_eig, generalized_eig, hermitian_eig, hermitian_eigvals, polar_multiplier, CMatrix, Lu, C64,
};
use crate::ranges::{pencil_range, qnr_sample, w_range_hpd, PencilOracle, PencilSection};
use crate::region::{Raster, Rect};

#[derive(Debug, Clone)]
pub struct PropertyReport {
    pub name: &'static str,
    pub checks: usize,
    pub violations: Vec<String>,
}

struct Tally {
    name: &'static str,
    checks: usize,
    violations: Vec<String>,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            checks: 0,
            violations: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.violations.push(what());
        }
    }

    fn done(self) -> PropertyReport {
        PropertyReport {
            name: self.name,
            checks: self.checks,
            violations: self.violations,
        }
    }
}

/// Random pencil of one of the oracle's shapes.
fn random_pencil(rng: &mut ChaCha8Rng, shape: usize) -> PencilSection {
    let n = rng.gen_range(2..=5);
    let (a, b) = match shape % 4 {
        0 => (
            CMatrix::from_diag(&(0..n).map(|_| super::gaussian(rng)).collect::<Vec<_>>()),
            CMatrix::from_diag(&(0..n).map(|_| super::gaussian(rng)).collect::<Vec<_>>()),
        ),
        1 => (random_matrix(rng, n), CMatrix::identity(n).scale(super::gaussian(rng))),
        2 => (
            random_hermitian_in(rng, n, -2.0, 2.0),
            random_hermitian_in(rng, n, -1.0, 2.0),
        ),
        _ => (random_matrix(rng, n), random_matrix(rng, n)),
    };
    PencilSection::new(a, b).expect("same shapes")
}

/// Membership that is unambiguous at `tol`: `None` on the boundary.
fn member(o: &PencilOracle, z: C64, tol: f64) -> Option<bool> {
    let (lo, hi) = (o.contains(z, tol * (1.0 - 1e-2)), o.contains(z, tol * (1.0 + 1e-2)));
    (lo == hi).then_some(lo)
}

fn scaling_law(rng: &mut ChaCha8Rng) -> PropertyReport {
    let mut t = Tally::new("scaling law");
    for k in 0..12 {
        let p = random_pencil(rng, k);
        let o = PencilOracle::new(&p).expect("square");
        for z in [c(2.0, 0.0), c(0.0, 1.0)] {
            let q = PencilSection::new(p.a.scale(z), p.b.clone()).expect("same shapes");
            let oq = PencilOracle::new(&q).expect("square");
            for _ in 0..40 {
                let l = c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
                let tol = 0.05;
                if let (Some(x), Some(y)) = (member(&o, l, tol), member(&oq, z * l, tol * z.norm())) {
                    t.check(x == y, || format!("λ = {l}, z = {z}"));
                }
            }
        }
    }
    t.done()
}

fn inversion_law(rng: &mut ChaCha8Rng) -> PropertyReport {
    let mut t = Tally::new("inversion law");
    for k in 0..12 {
        let p = random_pencil(rng, k);
        let q = PencilSection::new(p.b.clone(), p.a.clone()).expect("same shapes");
        let (o, oq) = (
            PencilOracle::new(&p).expect("square"),
            PencilOracle::new(&q).expect("square"),
        );
        for _ in 0..40 {
            let l = c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            if l.norm() < 0.1 {
                continue;
            }
            // 0 ∈ W(B − λ⁻¹A) = −λ⁻¹ W(A − λB)
            let tol = 0.05;
            if let (Some(x), Some(y)) = (member(&o, l, tol), member(&oq, l.inv(), tol / l.norm())) {
                t.check(x == y, || format!("λ = {l}"));
            }
        }
    }
    t.done()
}

fn ratio_inside_pencil_range(rng: &mut ChaCha8Rng) -> PropertyReport {
    let mut t = Tally::new("w ⊆ W");
    for _ in 0..8 {
        let n = rng.gen_range(2..=5);
        let a = random_matrix(rng, n);
        let b = random_hermitian_in(rng, n, 0.2, 2.0);
        let p = PencilSection::new(a, b).expect("same shapes");
        let w = w_range_hpd(&p).expect("positive definite");
        let rect = Rect::symmetric(-8.0, 8.0, 8.0);
        let r = pencil_range(&p, rect, 60, 60).expect("valid raster");
        let cell = r.cell_diagonal();
        let wr = Raster::from_predicate(rect, 60, 60, |z| w.contains(z, 0.0)).expect("valid raster");
        for z in wr.points() {
            t.check(r.near(z, cell), || format!("w point {z} outside W"));
        }
    }
    t.done()
}

fn eigenvalue_inclusion(rng: &mut ChaCha8Rng) -> PropertyReport {
    let mut t = Tally::new("eigenvalue inclusion");
    for k in 0..12 {
        let p = random_pencil(rng, k);
        let Ok(ev) = p.generalized_eigenvalues() else { continue };
        let rect = Rect::symmetric(-10.0, 10.0, 10.0);
        let r = pencil_range(&p, rect, 80, 80).expect("valid raster");
        for z in ev.into_iter().filter(|&z| rect.contains(z)) {
            t.check(r.near(z, r.cell_diagonal()), || format!("eigenvalue {z}"));
        }
    }
    t.done()
}

fn qnr_inside_diagonal_multipliers(rng: &mut ChaCha8Rng) -> PropertyReport {
    let mut t = Tally::new("QNR ⊆ ∩ W(diag(a,d)T, diag(a,d))");
    for _ in 0..4 {
        let n = rng.gen_range(3..=6);
        let split = rng.gen_range(1..n);
        let m = random_matrix(rng, n);
        let pts = qnr_sample(&m, split, 100, rng.gen()).expect("valid split");
        let scale = m.norm_2();
        for _ in 0..5 {
            let (a, d) = (super::gaussian(rng), super::gaussian(rng));
            let diag: Vec<C64> = (0..n).map(|i| if i < split { a } else { d }).collect();
            let b = CMatrix::from_diag(&diag);
            let o = PencilOracle::new(&PencilSection::new(b.matmul(&m), b).expect("same shapes")).expect("square");
            let tol = 1e-9 * scale * a.norm().max(d.norm());
            for &q in &pts {
                t.check(o.contains(q, tol), || format!("QNR point {q} excluded by ({a}, {d})"));
            }
        }
    }
    t.done()
}

fn raster_algebra(rng: &mut ChaCha8Rng) -> PropertyReport {
    let mut t = Tally::new("raster algebra");
    let rect = Rect::symmetric(-1.0, 1.0, 1.0);
    let random = |rng: &mut ChaCha8Rng| {
        let mask: Vec<bool> = (0..12 * 9).map(|_| rng.gen_bool(0.5)).collect();
        Raster::from_mask(rect, 12, 9, mask).expect("valid mask")
    };
    for _ in 0..20 {
        let (a, b, cc) = (random(rng), random(rng), random(rng));
        let ab = a.intersect(&b).expect("same grid");
        t.check(ab == b.intersect(&a).expect("same grid"), || {
            "intersect not commutative".into()
        });
        let l = ab.intersect(&cc).expect("same grid");
        let r = a.intersect(&b.intersect(&cc).expect("same grid")).expect("same grid");
        t.check(l == r, || "intersect not associative".into());
        t.check(a.intersect(&a).expect("same grid") == a, || {
            "intersect not idempotent".into()
        });
        let de_morgan = a.union(&b).expect("same grid").complement();
        let other = a.complement().intersect(&b.complement()).expect("same grid");
        t.check(de_morgan == other, || "De Morgan fails".into());
    }
    t.done()
}

fn kernel_residuals(rng: &mut ChaCha8Rng) -> PropertyReport {
    let mut t = Tally::new("kernel residuals");
    for _ in 0..10 {
        let n = rng.gen_range(2..=10);
        let g = random_matrix(rng, n);
        let h = (&g + &g.adjoint()).scale_real(0.5);
        let e = hermitian_eig(&h).expect("hermitian");
        let sum: f64 = e.values.iter().sum();
        t.check((sum - h.trace().re).abs() <= 1e-9 * h.norm_2(), || {
            format!("trace residual n = {n}")
        });
        // Weyl: adding a PSD matrix never lowers an eigenvalue
        let p = g.matmul(&g.adjoint());
        let up = hermitian_eigvals(&(&h + &p)).expect("hermitian");
        t.check(
            up.iter()
                .zip(&e.values)
                .all(|(u, v)| *u >= v - 1e-9 * (h.norm_2() + p.norm_2())),
            || format!("Weyl monotonicity n = {n}"),
        );

        let m = random_matrix(rng, n);
        let ev = general_eig(&m).expect("converges");
        let prod: C64 = ev.iter().product();
        let det = Lu::factor(&m).expect("square").det();
        t.check((prod - det).norm() <= 1e-7 * det.norm().max(1e-300), || {
            format!("det residual n = {n}")
        });

        let a: Vec<C64> = (0..n).map(|_| super::gaussian(rng)).collect();
        let b: Vec<C64> = (0..n).map(|_| super::gaussian(rng) + c(3.0, 0.0)).collect();
        let mut got = generalized_eig(&CMatrix::from_diag(&a), &CMatrix::from_diag(&b)).expect("invertible");
        let mut want: Vec<C64> = a.iter().zip(&b).map(|(x, y)| x / y).collect();
        let key = |z: &C64, w: &C64| z.re.total_cmp(&w.re).then(z.im.total_cmp(&w.im));
        got.sort_by(key);
        want.sort_by(key);
        let err = got
            .iter()
            .zip(&want)
            .map(|(x, y)| (x - y).norm() / y.norm().max(1.0))
            .fold(0.0, f64::max);
        t.check(err <= 1e-12, || format!("diagonal pencil error {err:e}"));

        let l = super::gaussian(rng);
        let shifted = m.shift(-l);
        let bq = polar_multiplier(&m, l).expect("square");
        let q = bq.matmul(&shifted);
        let dev = q.max_abs_diff(&q.adjoint());
        t.check(dev <= 1e-9 * shifted.norm_2(), || format!("polar asymmetry {dev:e}"));
        let herm = (&q + &q.adjoint()).scale_real(0.5);
        let min = hermitian_eigvals(&herm).expect("hermitian")[0];
        t.check(min >= -1e-9 * shifted.norm_2(), || format!("polar not PSD: {min:e}"));
    }
    t.done()
}

/// Every property sweep at one seed.
pub fn property_suite(seed: u64) -> Vec<PropertyReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    vec![
        scaling_law(&mut rng),
        inversion_law(&mut rng),
        ratio_inside_pencil_range(&mut rng),
        eigenvalue_inclusion(&mut rng),
        qnr_inside_diagonal_multipliers(&mut rng),
        raster_algebra(&mut rng),
        kernel_residuals(&mut rng),
    ]
}
