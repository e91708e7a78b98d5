//! Spectral enclosures obtained with bounded multipliers: Dirac sectors,
//! the Stokes region and its multiplier inequality, gap multipliers, and
//! the intersection of pencil ranges over a set of multipliers.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::gallery::EssRange;
use crate::matkernel::{hermitian_eigvals, smallest_singular_value, CMatrix, KernelError, C64};
use crate::ranges::{PencilOracle, PencilSection, RangeError};
use crate::region::{geometry, Raster, Rect, RegionError, DEFAULT_ANGLES};

/// Default number of sector angles per family.
pub const DEFAULT_PHI_GRID: usize = 256;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EnclosureError {
    #[error("multiplier inequality not applicable: r = {r} ≤ 0")]
    NotApplicable { r: f64 },
    #[error("gap hypothesis fails: a = {a} ≥ b = {b}")]
    GapViolated { a: f64, b: f64 },
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Range(#[from] RangeError),
    #[error(transparent)]
    Region(#[from] RegionError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnclosureKind {
    Dirac,
    Stokes,
    Gap,
    HalfLines,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnclosureSpec {
    pub kind: EnclosureKind,
    pub essran: EssRange,
    pub params: BTreeMap<String, f64>,
}

impl EnclosureSpec {
    /// Sector enclosure of `[[1+V, −i d/dx], [−i d/dx, −1+V]]`.
    pub fn dirac(essran_v: EssRange) -> Self {
        let mut params = BTreeMap::new();
        params.insert("phi_grid".into(), DEFAULT_PHI_GRID as f64);
        Self {
            kind: EnclosureKind::Dirac,
            essran: essran_v,
            params,
        }
    }

    pub fn stokes(essran_u: EssRange) -> Self {
        Self {
            kind: EnclosureKind::Stokes,
            essran: essran_u,
            params: BTreeMap::new(),
        }
    }

    /// `Σ = ((−∞,−1] ∪ [1,∞)) + conv(essran)`.
    pub fn half_lines(essran: EssRange) -> Self {
        Self {
            kind: EnclosureKind::HalfLines,
            essran,
            params: BTreeMap::new(),
        }
    }

    pub fn param(&self, key: &str) -> Option<f64> {
        self.params.get(key).copied()
    }

    fn phi_grid(&self) -> usize {
        self.param("phi_grid").map_or(DEFAULT_PHI_GRID, |g| g.max(1.0) as usize)
    }

    /// Membership with slack `tol`.
    pub fn contains(&self, lambda: C64, tol: f64) -> bool {
        match self.kind {
            EnclosureKind::Dirac => !dirac_excluded(self, lambda, self.phi_grid()).excluded,
            EnclosureKind::Stokes => stokes_member(&self.essran, lambda, tol),
            EnclosureKind::HalfLines => half_lines_distance(&self.essran, lambda) <= tol,
            EnclosureKind::Gap => {
                let key = |k: &str| self.param(k).or_else(|| self.param(&format!("{k}_e")));
                let (a, b) = (key("a").unwrap_or(f64::NAN), key("b").unwrap_or(f64::NAN));
                match (self.param("lo"), self.param("hi")) {
                    (Some(lo), Some(hi)) => {
                        lambda.im.abs() <= tol
                            && ((lo - tol..=a + tol).contains(&lambda.re) || (b - tol..=hi + tol).contains(&lambda.re))
                    }
                    _ => lambda.re <= a + tol || lambda.re >= b - tol,
                }
            }
        }
    }

    pub fn raster(&self, rect: Rect, nx: usize, ny: usize) -> Result<Raster, RegionError> {
        Raster::from_predicate(rect, nx, ny, |z| self.contains(z, 0.0))
    }

    /// `{kind, hull: [[re, im], …], params}`.
    pub fn to_json(&self) -> serde_json::Value {
        let mut params = self.params.clone();
        if let EssRange::Circle { center, radius } = &self.essran {
            params.insert("center_re".into(), center.re);
            params.insert("center_im".into(), center.im);
            params.insert("radius".into(), *radius);
        }
        let hull: Vec<[f64; 2]> = match &self.essran {
            EssRange::Points { points } => points.iter().map(|z| [z.re, z.im]).collect(),
            other => other.hull().iter().map(|z| [z.re, z.im]).collect(),
        };
        serde_json::json!({ "kind": self.kind, "hull": hull, "params": params })
    }
}

fn half_lines_distance(essran: &EssRange, lambda: C64) -> f64 {
    let hull = essran.hull();
    let far = 1e6 + lambda.norm();
    [1.0, -1.0]
        .iter()
        .map(|&s| {
            let pts: Vec<C64> = hull.iter().flat_map(|&v| [v + s, v + s * far]).collect();
            geometry::polygon_distance(lambda, &geometry::convex_hull(&pts))
        })
        .fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiracExclusion {
    pub excluded: bool,
    /// Signed sector angle: positive for the upper family, negative for
    /// the lower one.
    pub best_phi: Option<f64>,
    /// `1/(cos φ · margin)`, the resolvent bound at the best angle.
    pub bound: Option<f64>,
}

/// Sector test with `B_{±φ} = diag(e^{∓iφ}, e^{±iφ})`, φ on a grid of
/// `[0, π/2)`: `λ` is excluded when, for one family,
/// `Im(e^{iφ}(−1+v−λ)) < 0` and `Im(e^{−iφ}(1+v−λ)) < 0` for every hull
/// vertex `v` (lower family: both conjugated, signs reversed).
pub fn dirac_excluded(spec: &EnclosureSpec, lambda: C64, phi_grid: usize) -> DiracExclusion {
    let hull = spec.essran.hull();
    let one = C64::new(1.0, 0.0);
    let mut best: Option<(f64, f64, f64)> = None; // (cos φ · margin, φ, margin)
    for k in 0..phi_grid.max(1) {
        let phi = FRAC_PI_2 * k as f64 / phi_grid as f64;
        for s in [1.0, -1.0] {
            let rot = C64::from_polar(1.0, s * phi);
            let worst = hull
                .iter()
                .map(|&v| {
                    let left = s * (rot * (-one + v - lambda)).im;
                    let right = s * (rot.conj() * (one + v - lambda)).im;
                    left.max(right)
                })
                .fold(f64::NEG_INFINITY, f64::max);
            if worst < 0.0 {
                let margin = -worst;
                let score = phi.cos() * margin;
                if best.is_none_or(|b| score > b.0) {
                    best = Some((score, s * phi, margin));
                }
            }
        }
    }
    match best {
        Some((score, phi, _)) => DiracExclusion {
            excluded: true,
            best_phi: Some(phi),
            bound: Some(1.0 / score),
        },
        None => DiracExclusion {
            excluded: false,
            best_phi: None,
            bound: None,
        },
    }
}

/// Raster of the complement of the excluded set.
pub fn dirac_region(
    spec: &EnclosureSpec,
    rect: Rect,
    nx: usize,
    ny: usize,
    phi_grid: usize,
) -> Result<Raster, RegionError> {
    Raster::from_predicate(rect, nx, ny, |z| !dirac_excluded(spec, z, phi_grid).excluded)
}

/// `{Re λ < 0, d ≤ 1} ∪ [0, ∞) ∪ {Re λ ≥ 0, Im λ ≠ 0, d ≤ |λ|/|Im λ|}` with
/// `d = dist(λ, essran U)`, distances relaxed by `slack`.
pub fn stokes_member(essran: &EssRange, lambda: C64, slack: f64) -> bool {
    let d = essran.distance(lambda) - slack;
    if lambda.re < 0.0 {
        d <= 1.0
    } else if lambda.im == 0.0 {
        true
    } else {
        d <= lambda.norm() / lambda.im.abs()
    }
}

pub fn stokes_region(spec: &EnclosureSpec, rect: Rect, nx: usize, ny: usize) -> Result<Raster, RegionError> {
    Raster::from_predicate(rect, nx, ny, |z| stokes_member(&spec.essran, z, 0.0))
}

/// Upper-left block `A` of a Stokes-type operator matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum ABlock {
    /// Nonnegative selfadjoint with `W(A) = [0, ∞)`, e.g. `−d²/dx²`.
    HalfLine,
    Matrix(CMatrix),
}

/// Lower-right block `D`.
#[derive(Debug, Clone, PartialEq)]
pub enum DBlock {
    Multiplication(EssRange),
    Matrix(CMatrix),
}

/// `r = inf Re(e^{iφ} W(A − λ))`.
pub fn sector_distance(a: &ABlock, lambda: C64, phi: f64) -> Result<f64, EnclosureError> {
    let rot = C64::from_polar(1.0, phi);
    Ok(match a {
        ABlock::HalfLine if phi.cos() >= 0.0 => -(rot * lambda).re,
        ABlock::HalfLine => f64::NEG_INFINITY,
        ABlock::Matrix(m) => {
            let h = m.shift(-lambda).rotated_hermitian_part(-phi);
            hermitian_eigvals(&h)?[0]
        }
    })
}

/// `(b + a/r)(d + c/r) < 1/‖(D − λ)⁻¹‖²` with `r = inf Re(e^{iφ}W(A−λ))`.
pub fn stokes_multiplier_excludes(
    a_block: &ABlock,
    d_block: &DBlock,
    lambda: C64,
    phi: f64,
    bounds: (f64, f64, f64, f64),
) -> Result<bool, EnclosureError> {
    let r = sector_distance(a_block, lambda, phi)?;
    if r.is_nan() || r <= 0.0 {
        return Err(EnclosureError::NotApplicable { r });
    }
    // 1/‖(D−λ)⁻¹‖ = dist(λ, σ(D)) for normal D, σ_min(D−λ) in general
    let inv_norm = match d_block {
        DBlock::Multiplication(e) => e.distance(lambda),
        DBlock::Matrix(m) => smallest_singular_value(&m.shift(-lambda)),
    };
    let (a, b, c, d) = bounds;
    Ok((b + a / r) * (d + c / r) < inv_norm * inv_norm)
}

/// Range of a diagonal block.
#[derive(Debug, Clone, PartialEq)]
pub enum BlockRange {
    /// `conv σ` of a selfadjoint block.
    Interval(f64, f64),
    /// Convex hull of a (numerical range) polygon.
    Hull(Vec<C64>),
}

impl BlockRange {
    /// `conv σ(T)` of a Hermitian matrix.
    pub fn of_hermitian(t: &CMatrix) -> Result<Self, EnclosureError> {
        let ev = hermitian_eigvals(t)?;
        Ok(BlockRange::Interval(ev[0], ev[ev.len() - 1]))
    }

    fn re_extent(&self) -> (f64, f64) {
        match self {
            BlockRange::Interval(lo, hi) => (*lo, *hi),
            BlockRange::Hull(h) => (
                h.iter().map(|z| z.re).fold(f64::INFINITY, f64::min),
                h.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max),
            ),
        }
    }
}

/// Enclosure from the gap multiplier `B = diag(−I, I)`: exact interval union
/// when both blocks are selfadjoint, otherwise the half-plane pair
/// `{Re λ ≤ a} ∪ {Re λ ≥ b}`. `essential` names the endpoints `a_e`, `b_e`.
pub fn gap_region(t1: &BlockRange, t2: &BlockRange, essential: bool) -> Result<EnclosureSpec, EnclosureError> {
    let (lo, a) = t1.re_extent();
    let (b, hi) = t2.re_extent();
    if a >= b {
        return Err(EnclosureError::GapViolated { a, b });
    }
    let suffix = if essential { "_e" } else { "" };
    let mut params = BTreeMap::new();
    params.insert(format!("a{suffix}"), a);
    params.insert(format!("b{suffix}"), b);
    let mut hull = Vec::new();
    for r in [t1, t2] {
        match r {
            BlockRange::Interval(l, h) => hull.extend([C64::new(*l, 0.0), C64::new(*h, 0.0)]),
            BlockRange::Hull(v) => hull.extend(v.iter().copied()),
        }
    }
    if matches!((t1, t2), (BlockRange::Interval(..), BlockRange::Interval(..))) {
        params.insert("lo".into(), lo);
        params.insert("hi".into(), hi);
    }
    Ok(EnclosureSpec {
        kind: EnclosureKind::Gap,
        essran: EssRange::points(hull),
        params,
    })
}

/// `∩_B W(BT, B)` over the given multipliers, each normalized to unit
/// spectral norm so that the one-cell membership tolerance means the same
/// for all of them. Always contains `σ_app(T)` up to one cell.
pub fn multiplier_spectrum_estimate(
    t: &CMatrix,
    multipliers: &[CMatrix],
    rect: Rect,
    nx: usize,
    ny: usize,
) -> Result<Raster, EnclosureError> {
    multiplier_spectrum_estimate_with(t, multipliers, rect, nx, ny, DEFAULT_ANGLES)
}

pub fn multiplier_spectrum_estimate_with(
    t: &CMatrix,
    multipliers: &[CMatrix],
    rect: Rect,
    nx: usize,
    ny: usize,
    angles: usize,
) -> Result<Raster, EnclosureError> {
    let oracles = multipliers
        .iter()
        .map(|b| {
            let b = b.scale_real(1.0 / b.norm_2());
            PencilOracle::with_angles(&PencilSection::new(b.matmul(t), b)?, angles)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let probe = Raster::empty(rect, nx, ny)?;
    let tol = probe.cell_diagonal();
    // rows in parallel; within a row the last excluding oracle is tried first
    let mask: Vec<bool> = (0..ny)
        .into_par_iter()
        .flat_map_iter(|iy| {
            let mut first = 0;
            (0..nx)
                .map(|ix| {
                    let z = probe.center(ix, iy);
                    let order = std::iter::once(first).chain((0..oracles.len()).filter(|&k| k != first));
                    for k in order.take(oracles.len()) {
                        if !oracles[k].contains(z, tol) {
                            first = k;
                            return false;
                        }
                    }
                    true
                })
                .collect::<Vec<_>>()
        })
        .collect();
    Ok(Raster::from_mask(rect, nx, ny, mask)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::stokes_symbol;
    use crate::matkernel::{general_eig, polar_multiplier};
    use crate::ranges::{nrange, pencil_range};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn pts(p: &[C64]) -> EssRange {
        EssRange::points(p.to_vec())
    }

    #[test]
    fn free_dirac_gap() {
        let spec = EnclosureSpec::dirac(pts(&[c(0.0, 0.0)]));
        let e = dirac_excluded(&spec, c(0.0, 0.0), 256);
        assert!(e.excluded);
        // best angle is π/4 where cos φ · sin φ peaks: bound 2
        assert!((e.best_phi.unwrap().abs() - std::f64::consts::FRAC_PI_4).abs() < 1e-12);
        assert!((e.bound.unwrap() - 2.0).abs() < 1e-12);
        // the tangency angle alone does not separate
        assert!(!dirac_excluded(&spec, c(0.0, 0.0), 1).excluded);
        assert!(!dirac_excluded(&spec, c(1.5, 0.0), 256).excluded);
        let shifted = EnclosureSpec::dirac(pts(&[c(0.0, 1.0)]));
        assert!(dirac_excluded(&shifted, c(0.0, 1.0), 256).excluded);
    }

    /// Brute force over many (φ, family) candidates.
    fn brute_excluded(hull: &[C64], l: C64) -> bool {
        let one = c(1.0, 0.0);
        (1..5000).any(|k| {
            let phi = FRAC_PI_2 * k as f64 / 5000.0;
            [1.0, -1.0].iter().any(|&s| {
                let rot = C64::from_polar(1.0, s * phi);
                hull.iter()
                    .all(|&v| s * (rot * (-one + v - l)).im < 0.0 && s * (rot.conj() * (one + v - l)).im < 0.0)
            })
        })
    }

    #[test]
    fn dirac_sector_matches_brute_force() {
        let hull = [c(-0.3, 0.0), c(0.3, 0.4)];
        let spec = EnclosureSpec::dirac(pts(&hull));
        let mut mismatches = 0;
        let n = 60;
        for iy in 0..n {
            for ix in 0..n {
                let l = c(
                    -2.0 + 4.0 * (ix as f64 + 0.5) / n as f64,
                    -1.5 + 3.0 * (iy as f64 + 0.5) / n as f64,
                );
                if dirac_excluded(&spec, l, 256).excluded != brute_excluded(&hull, l) {
                    mismatches += 1;
                }
            }
        }
        // a coarser grid can only miss exclusions in a thin boundary layer
        assert!(mismatches <= 2 * n, "{mismatches}");
        // the excluded set never meets Σ
        let sigma = EnclosureSpec::half_lines(pts(&hull));
        for iy in 0..n {
            for ix in 0..n {
                let l = c(-2.0 + 4.0 * ix as f64 / n as f64, -1.5 + 3.0 * iy as f64 / n as f64);
                if dirac_excluded(&spec, l, 256).excluded {
                    assert!(!sigma.contains(l, 0.0), "{l}");
                }
            }
        }
    }

    #[test]
    fn stokes_branches() {
        let e = pts(&[c(-1.0, 1.0)]);
        assert!(stokes_member(&e, c(3.0, 0.0), 0.0));
        assert!(!stokes_member(&e, c(-1.0, -2.0), 0.0));
        assert!(stokes_member(&e, c(-1.0, 0.5), 0.0));
        // the 1-neighbourhood of essran is always inside
        for k in 0..64 {
            let z = c(-1.0, 1.0) + C64::from_polar(0.999, k as f64 * 0.1);
            assert!(stokes_member(&e, z, 0.0), "{z}");
        }
    }

    #[test]
    fn stokes_symbol_curves_are_enclosed() {
        let u0 = c(-1.0, 1.0);
        let e = pts(&[u0]);
        for j in 0..=6 {
            let gd = C64::from_polar(1.0, j as f64 * std::f64::consts::PI / 6.0);
            for k in 0..2000 {
                for z in stokes_symbol(u0, gd, k as f64 * 0.01) {
                    assert!(stokes_member(&e, z, 1e-9), "{z}");
                }
            }
        }
    }

    #[test]
    fn stokes_multiplier_cases() {
        let e = pts(&[c(-1.0, 1.0)]);
        let l = c(-1.0, -2.0);
        assert!(stokes_multiplier_excludes(
            &ABlock::HalfLine,
            &DBlock::Multiplication(e.clone()),
            l,
            0.0,
            (0.0, 1.0, 0.0, 1.0)
        )
        .unwrap());
        // reduces to dist(λ, essran U) > 1/cos φ
        let phi: f64 = 1.2;
        let b = 1.0 / phi.cos();
        let l2 = c(-0.5, -2.0);
        let excl = stokes_multiplier_excludes(
            &ABlock::HalfLine,
            &DBlock::Multiplication(e.clone()),
            l2,
            phi,
            (0.0, b, 0.0, b),
        );
        match excl {
            Ok(v) => assert_eq!(v, e.distance(l2) > b),
            Err(EnclosureError::NotApplicable { .. }) => {}
            Err(other) => panic!("{other}"),
        }
        assert!(matches!(
            stokes_multiplier_excludes(
                &ABlock::HalfLine,
                &DBlock::Multiplication(e),
                c(1.0, 0.0),
                0.0,
                (0.0, 1.0, 0.0, 1.0)
            ),
            Err(EnclosureError::NotApplicable { .. })
        ));
        let d = CMatrix::from_real_diag(&[1.0, 2.0]);
        let a = ABlock::Matrix(CMatrix::from_real_diag(&[3.0, 4.0]));
        assert!(stokes_multiplier_excludes(
            &a,
            &DBlock::Matrix(d.clone()),
            c(-10.0, 0.0),
            0.0,
            (1e-3, 1e-3, 1e-3, 1e-3)
        )
        .unwrap());
        assert!(
            !stokes_multiplier_excludes(&a, &DBlock::Matrix(d), c(1.0, 0.0), 0.0, (1e-3, 1e-3, 1e-3, 1e-3)).unwrap()
        );
    }

    #[test]
    fn gap_identity_and_violation() {
        let g = gap_region(
            &BlockRange::Interval(-3.0, -1.0),
            &BlockRange::Interval(2.0, 5.0),
            false,
        )
        .unwrap();
        assert!(g.contains(c(-2.0, 0.0), 0.0) && g.contains(c(4.0, 0.0), 0.0));
        assert!(!g.contains(c(0.0, 0.0), 0.0) && !g.contains(c(-2.0, 0.5), 0.0));
        assert!(matches!(
            gap_region(&BlockRange::Interval(0.0, 1.0), &BlockRange::Interval(1.0, 2.0), false),
            Err(EnclosureError::GapViolated { .. })
        ));
        let e = gap_region(&BlockRange::Interval(0.0, 1.0), &BlockRange::Interval(2.0, 3.0), true).unwrap();
        assert_eq!(e.param("a_e"), Some(1.0));
        assert!(e.contains(c(0.5, 0.0), 0.0));
        let j = g.to_json();
        assert_eq!(j["kind"], "gap");
        assert_eq!(j["params"]["a"], -1.0);
    }

    #[test]
    fn gap_pencil_range_agrees() {
        // BT − λB = diag(3+λ, 1+λ, 2−λ, 5−λ): pairing e_1 with e_3 or e_2
        // with e_4 sends ⟨Bx,x⟩ to zero, so W(BT,B) = (−∞,−1] ∪ [2,∞)
        let t = CMatrix::from_real_diag(&[-3.0, -1.0, 2.0, 5.0]);
        let b = CMatrix::from_real_diag(&[-1.0, -1.0, 1.0, 1.0]);
        let rect = Rect::symmetric(-4.0, 6.0, 0.5);
        let r = pencil_range(&PencilSection::new(b.matmul(&t), b).unwrap(), rect, 200, 21).unwrap();
        let g = gap_region(
            &BlockRange::Interval(-3.0, -1.0),
            &BlockRange::Interval(2.0, 5.0),
            false,
        )
        .unwrap();
        let cell = r.cell_diagonal();
        let exact = |x: f64| x <= -1.0 || x >= 2.0;
        for ix in 0..200 {
            let z = r.center(ix, 10);
            if exact(z.re) {
                assert!(r.get(ix, 10), "{z}");
            } else {
                assert!(!r.get(ix, 10) || exact(z.re - cell) || exact(z.re + cell), "{z}");
            }
            for iy in 0..21 {
                let z = r.center(ix, iy);
                if r.get(ix, iy) {
                    assert!(exact(z.re - cell) || exact(z.re + cell), "{z}");
                }
            }
        }
        // the selfadjoint formula only covers the hulls of the block spectra
        assert!(g.contains(C64::new(4.0, 0.0), 0.0) && !g.contains(C64::new(5.5, 0.0), 0.0));
        assert!(r.contains(C64::new(5.5, 0.0)));
    }

    #[test]
    fn identity_multiplier_gives_numerical_range() {
        let t = CMatrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]);
        let rect = Rect::symmetric(-1.0, 1.0, 1.0);
        let r = multiplier_spectrum_estimate(&t, &[CMatrix::identity(2)], rect, 40, 40).unwrap();
        let s = nrange(&t).unwrap();
        for iy in 0..40 {
            for ix in 0..40 {
                let z = r.center(ix, iy);
                assert_eq!(
                    r.get(ix, iy),
                    crate::ranges::support_distance(&s, z) <= r.cell_diagonal()
                );
            }
        }
    }

    #[test]
    fn polar_multipliers_shrink_towards_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let t = CMatrix::from_fn(5, 5, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let ev = general_eig(&t).unwrap();
        let rect = Rect::symmetric(-3.0, 3.0, 3.0);
        let (nx, ny) = (30, 30);
        let id = multiplier_spectrum_estimate(&t, &[CMatrix::identity(5)], rect, nx, ny).unwrap();
        let mut ms = vec![CMatrix::identity(5)];
        for iy in (1..ny).step_by(4) {
            for ix in (1..nx).step_by(4) {
                let l = id.center(ix, iy);
                if smallest_singular_value(&t.shift(-l)) > id.cell_diagonal() {
                    ms.push(polar_multiplier(&t, l).unwrap());
                }
            }
        }
        let est = multiplier_spectrum_estimate(&t, &ms, rect, nx, ny).unwrap();
        for z in &ev {
            assert!(est.near(*z, est.cell_diagonal()), "{z}");
        }
        let h0 = crate::region::hausdorff_to_points(&id, &ev).unwrap();
        let h1 = crate::region::hausdorff_to_points(&est, &ev).unwrap();
        assert!(h1 < h0, "{h1} vs {h0}");

        let (left, right) = ms.split_at(ms.len() / 2);
        let a = multiplier_spectrum_estimate(&t, left, rect, nx, ny).unwrap();
        let b = multiplier_spectrum_estimate(&t, right, rect, nx, ny).unwrap();
        assert_eq!(a.intersect(&b).unwrap(), est);
    }
}
