use std::f64::consts::FRAC_PI_2;

use super::{grid, Coefficient, EssRange, FamilyKind, GalleryError, Multiplier, PencilFamily};
use crate::matkernel::C64;

fn seq(f: impl Fn(f64) -> C64 + Send + Sync + 'static) -> Coefficient {
    Coefficient::from_fn(f)
}

fn zero() -> Coefficient {
    Coefficient::real(0.0)
}

/// Diagonal pencil `(diag a_n, diag b_n)`.
pub fn diagonal(
    name: &str,
    a: impl Fn(f64) -> C64 + Send + Sync + 'static,
    b: impl Fn(f64) -> C64 + Send + Sync + 'static,
) -> PencilFamily {
    PencilFamily::new(name, FamilyKind::Diagonal { a: seq(a), b: seq(b) })
}

/// `a_n = n² + n`, `b_n = n²`.
pub fn unifpos() -> PencilFamily {
    diagonal("unifpos", |n| C64::new(n * n + n, 0.0), |n| C64::new(n * n, 0.0))
}

/// `a_n = (−1)ⁿn⁴ + in`, `b_n = n³ + i(−1)ⁿn²`.
pub fn notclosed() -> PencilFamily {
    let sign = |n: f64| if (n as u64) % 2 == 0 { 1.0 } else { -1.0 };
    diagonal(
        "notclosed",
        move |n| C64::new(sign(n) * n.powi(4), n),
        move |n| C64::new(n.powi(3), sign(n) * n * n),
    )
}

/// `a_n = (−1)ⁿn³ + in`, `b_n = n²`.
pub fn line() -> PencilFamily {
    let sign = |n: f64| if (n as u64) % 2 == 0 { 1.0 } else { -1.0 };
    diagonal(
        "line",
        move |n| C64::new(sign(n) * n.powi(3), n),
        |n| C64::new(n * n, 0.0),
    )
}

/// `A = B = diag(1/n)`.
pub fn reciprocal_pair() -> PencilFamily {
    diagonal("reciprocal", |n| C64::new(1.0 / n, 0.0), |n| C64::new(1.0 / n, 0.0))
}

/// `T = diag(S, S)`, `S = diag(n)`, against `J = diag(I, −I)`.
pub fn jt_pencil() -> PencilFamily {
    let n = || seq(|n| C64::new(n, 0.0));
    PencilFamily::new(
        "jt-pencil",
        FamilyKind::Block2x2 {
            a: [n(), zero(), zero(), n()],
            b: [Coefficient::real(1.0), zero(), zero(), Coefficient::real(-1.0)],
        },
    )
}

/// `JT` as a multiplication operator in the interleaved basis:
/// `d_n = (−1)^{n+1}⌈n/2⌉`, `B = I`.
pub fn jt_operator() -> PencilFamily {
    diagonal(
        "jt-operator",
        |n| {
            let k = (n / 2.0).ceil();
            C64::new(if (n as u64) % 2 == 1 { k } else { -k }, 0.0)
        },
        |_| C64::new(1.0, 0.0),
    )
}

pub fn schrodinger1d(v: Coefficient) -> PencilFamily {
    PencilFamily::new("schrodinger1d", FamilyKind::Schrodinger1d { v })
}

/// Continuous ramp from `left` (x ≤ a) to `right` (x ≥ b), linear between.
fn ramp(left: f64, right: f64, a: f64, b: f64) -> impl Fn(f64) -> f64 + Send + Sync + Copy {
    move |x| {
        if x < a || (x == a && a < b) {
            left
        } else if x >= b {
            right
        } else {
            left + (right - left) * (x - a) / (b - a)
        }
    }
}

/// `−f'' + Vf` against `J`, with `V → m∓` at `∓∞` plus `well`, and
/// `J = −1` on `(−∞, a)`, `1` on `(b, ∞)`. `m∓ = 0` gives the decaying
/// variant.
pub fn sl_indefinite(mminus: f64, mplus: f64, well: Coefficient, a: f64, b: f64) -> Result<PencilFamily, GalleryError> {
    if !(mminus >= 0.0 && mplus >= 0.0) || !(a <= b) {
        return Err(GalleryError::InvalidSpec(format!(
            "need m± ≥ 0 and a ≤ b, got m− = {mminus}, m+ = {mplus}, a = {a}, b = {b}"
        )));
    }
    let base = ramp(mminus, mplus, a, b);
    let sign = ramp(-1.0, 1.0, a, b);
    let v = Coefficient::from_fn(move |x| C64::new(base(x), 0.0) + well.eval(x));
    let j = Coefficient::from_fn(move |x| C64::new(sign(x), 0.0))
        .with_essran(EssRange::points(vec![C64::new(-1.0, 0.0), C64::new(1.0, 0.0)]));
    Ok(PencilFamily::new(
        "sturm-liouville-indefinite",
        FamilyKind::SturmLiouvilleIndefinite { v, j },
    ))
}

/// `B_φ = e^{iφ}` for `x ≤ a`, `e^{itφ}` with `t = (b−x)/(b−a)` between,
/// `1` for `x ≥ b`.
pub fn rotation_multiplier(phi: f64, a: f64, b: f64) -> Multiplier {
    Multiplier::Scalar(Coefficient::from_fn(move |x| {
        let t = if x <= a {
            1.0
        } else if x >= b {
            0.0
        } else {
            (b - x) / (b - a)
        };
        C64::from_polar(1.0, t * phi)
    }))
}

/// `[[1+V, −i d/dx], [−i d/dx, −1+V]]`.
pub fn dirac1d(v: Coefficient) -> PencilFamily {
    PencilFamily::new("dirac1d", FamilyKind::Dirac1d { v })
}

/// `B_θ = diag(e^{−iθ}, e^{iθ})`.
pub fn dirac_multiplier(theta: f64) -> Multiplier {
    Multiplier::Blocks(
        Coefficient::constant(C64::from_polar(1.0, -theta)),
        Coefficient::constant(C64::from_polar(1.0, theta)),
    )
}

/// `[[−d²/dx², γ d/dx], [δ d/dx, U]]`.
pub fn stokes1d(u: Coefficient, gamma: C64, delta: C64) -> PencilFamily {
    PencilFamily::new("stokes1d", FamilyKind::Stokes1d { u, gamma, delta })
}

/// Eigenvalues `(k²+U)/2 ± √(((k²−U)/2)² − γδk²)` of the Stokes symbol.
pub fn stokes_symbol(u0: C64, gamma_delta: C64, k: f64) -> [C64; 2] {
    let k2 = C64::new(k * k, 0.0);
    let half = (k2 + u0) * 0.5;
    let root = (((k2 - u0) * 0.5).powi(2) - gamma_delta * k2).sqrt();
    [half + root, half - root]
}

/// Sampled check of the Hain–Lüst coefficient conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    /// Largest `|arg Q|` on the grid.
    pub theta: f64,
    /// Smallest `b` with `|V|² ≤ b|Q|` on the grid.
    pub b: f64,
    /// Declared essential range of `U`, or its grid samples.
    pub u_essran: EssRange,
    pub warnings: Vec<String>,
}

impl ConditionReport {
    /// `ε = 1/(b‖(D−λ)⁻¹‖²) = dist(λ, essran U)²/b`.
    pub fn epsilon(&self, lambda: C64) -> Result<f64, GalleryError> {
        let d = self.u_essran.distance(lambda);
        if d <= 0.0 || !(self.b > 0.0 && self.b.is_finite()) {
            return Err(GalleryError::InvalidSpec(format!(
                "no multiplier at λ = {lambda}: dist = {d}, b = {}",
                self.b
            )));
        }
        Ok(d * d / self.b)
    }
}

/// `[[−d²/dx² + Q, W], [V, U]]` with its coefficient conditions sampled on
/// the grid of `[−L, L]` with `points` nodes. Violations are warnings.
pub fn hain_lust(
    q: Coefficient,
    w: Coefficient,
    v: Coefficient,
    u: Coefficient,
    half_length: f64,
    points: usize,
) -> (PencilFamily, ConditionReport) {
    let (xs, _) = grid(half_length, points.max(2));
    let mut theta: f64 = 0.0;
    let mut b: f64 = 0.0;
    let mut warnings = Vec::new();
    for &x in &xs {
        let (qx, vx) = (q.eval(x), v.eval(x));
        if qx.norm() > 0.0 {
            theta = theta.max(qx.arg().abs());
            b = b.max(vx.norm_sqr() / qx.norm());
        } else if vx.norm() > 0.0 {
            b = f64::INFINITY;
        }
    }
    if theta >= FRAC_PI_2 {
        warnings.push(format!(
            "ConditionViolated: essran(Q) not in a sector of half-angle < π/2 (max |arg Q| = {theta:.4})"
        ));
    }
    if !b.is_finite() {
        warnings.push("ConditionViolated: |V|² ≤ b|Q| fails where Q vanishes".to_string());
    }
    let (ql, qr) = (q.eval(xs[0]).norm(), q.eval(xs[xs.len() - 1]).norm());
    let qmid = q.eval(0.0).norm();
    if ql.min(qr) <= qmid {
        warnings.push("ConditionViolated: |Q| does not grow towards the interval ends".to_string());
    }
    let u_essran = u.essran.clone().unwrap_or_else(|| {
        let mut pts: Vec<C64> = Vec::new();
        for &x in &xs {
            let z = u.eval(x);
            if !pts.iter().any(|p| (p - z).norm() < 1e-12) {
                pts.push(z);
            }
        }
        EssRange::points(pts)
    });
    let family = PencilFamily::new("hain-lust", FamilyKind::HainLust { q, w, v, u: u.clone() });
    (
        family,
        ConditionReport {
            theta,
            b,
            u_essran,
            warnings,
        },
    )
}

/// `B_λ = diag(I, ε(U − λ)⁻¹)` for a Hain–Lüst family.
pub fn hain_lust_multiplier(
    family: &PencilFamily,
    report: &ConditionReport,
    lambda: C64,
) -> Result<Multiplier, GalleryError> {
    let FamilyKind::HainLust { u, .. } = &family.kind else {
        return Err(GalleryError::InvalidSpec(format!(
            "'{}' is not a Hain–Lüst family",
            family.name
        )));
    };
    let eps = report.epsilon(lambda)?;
    let u = u.clone();
    Ok(Multiplier::Blocks(
        Coefficient::real(1.0),
        Coefficient::from_fn(move |x| C64::new(eps, 0.0) / (u.eval(x) - lambda)),
    ))
}
