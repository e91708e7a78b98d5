//! Truncation families: diagonal sequence space operators, 1D finite
//! difference discretizations and block assemblies, all producing matched
//! sections `(A, B)` at any resolution.

mod expr;
mod families;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::matkernel::{CMatrix, C64};
use crate::ranges::PencilSection;
use crate::region::geometry;

pub use expr::{Expr, Func, ParseError};
pub use families::*;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GalleryError {
    #[error("invalid truncation or family: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

pub type PointFn = Arc<dyn Fn(f64) -> C64 + Send + Sync>;

/// Essential range descriptor of a coefficient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EssRange {
    Points {
        points: Vec<C64>,
    },
    /// Convex polygon (vertices in any order; the hull is used).
    Polygon {
        vertices: Vec<C64>,
    },
    Circle {
        center: C64,
        radius: f64,
    },
}

impl EssRange {
    pub fn points(points: Vec<C64>) -> Self {
        EssRange::Points { points }
    }

    pub fn polygon(vertices: Vec<C64>) -> Self {
        EssRange::Polygon {
            vertices: geometry::convex_hull(&vertices),
        }
    }

    pub fn distance(&self, z: C64) -> f64 {
        match self {
            EssRange::Points { points } => geometry::point_set_distance(z, points),
            EssRange::Polygon { vertices } => geometry::polygon_distance(z, vertices),
            EssRange::Circle { center, radius } => ((z - center).norm() - radius).abs(),
        }
    }

    /// Vertices of the convex hull; circles are sampled at 720 points.
    pub fn hull(&self) -> Vec<C64> {
        match self {
            EssRange::Points { points } => geometry::convex_hull(points),
            EssRange::Polygon { vertices } => vertices.clone(),
            EssRange::Circle { center, radius } => (0..720)
                .map(|k| center + C64::from_polar(*radius, std::f64::consts::TAU * k as f64 / 720.0))
                .collect(),
        }
    }
}

/// A coefficient function of `x` (or of the index `n` for sequences) with an
/// optional essential-range descriptor.
#[derive(Clone)]
pub struct Coefficient {
    f: PointFn,
    source: Option<String>,
    pub essran: Option<EssRange>,
}

impl fmt::Debug for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Coefficient")
            .field("source", &self.source)
            .field("essran", &self.essran)
            .finish()
    }
}

impl Coefficient {
    pub fn from_fn(f: impl Fn(f64) -> C64 + Send + Sync + 'static) -> Self {
        Self {
            f: Arc::new(f),
            source: None,
            essran: None,
        }
    }

    pub fn constant(c: C64) -> Self {
        Self {
            f: Arc::new(move |_| c),
            source: Some(format!("{}", Expr::Const(c))),
            essran: Some(EssRange::points(vec![c])),
        }
    }

    pub fn real(c: f64) -> Self {
        Self::constant(C64::new(c, 0.0))
    }

    pub fn parse(src: &str) -> Result<Self, GalleryError> {
        let e = Expr::parse(src)?;
        let essran = e.is_constant().then(|| EssRange::points(vec![e.eval(0.0)]));
        Ok(Self {
            f: e.into_fn(),
            source: Some(src.to_string()),
            essran,
        })
    }

    pub fn with_essran(mut self, essran: EssRange) -> Self {
        self.essran = Some(essran);
        self
    }

    pub fn eval(&self, x: f64) -> C64 {
        (self.f)(x)
    }

    pub fn source(&self) -> Option<&str> {
        self.source.as_deref()
    }
}

/// Left multiplier applied to both pencil members.
#[derive(Debug, Clone)]
pub enum Multiplier {
    /// Scalar function of the node (grid point, or index for sequences),
    /// applied to every component.
    Scalar(Coefficient),
    /// `diag(B₁, B₂)` on two-component families.
    Blocks(Coefficient, Coefficient),
    /// Constant matrix; must match the section size.
    Matrix(CMatrix),
}

#[derive(Debug, Clone)]
pub enum FamilyKind {
    /// `A = diag(a_n)`, `B = diag(b_n)`, `n ≥ 1`.
    Diagonal { a: Coefficient, b: Coefficient },
    /// 2×2 blocks of diagonal operators, entries `[11, 12, 21, 22]`.
    Block2x2 { a: [Coefficient; 4], b: [Coefficient; 4] },
    /// `−d²/dx² + V`, `B = I`.
    Schrodinger1d { v: Coefficient },
    /// `−d²/dx² + V`, `B = J`.
    SturmLiouvilleIndefinite { v: Coefficient, j: Coefficient },
    /// `[[1+V, −i d/dx], [−i d/dx, −1+V]]`, `B = I`.
    Dirac1d { v: Coefficient },
    /// `[[−d²/dx², γ d/dx], [δ d/dx, U]]`, `B = I`.
    Stokes1d { u: Coefficient, gamma: C64, delta: C64 },
    /// `[[−d²/dx² + Q, W], [V, U]]`, `B = I`.
    HainLust {
        q: Coefficient,
        w: Coefficient,
        v: Coefficient,
        u: Coefficient,
    },
    Multiplied {
        inner: Box<PencilFamily>,
        multiplier: Multiplier,
    },
}

#[derive(Debug, Clone)]
pub struct PencilFamily {
    pub name: String,
    pub kind: FamilyKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TruncationSpec {
    /// First `n` basis vectors (block families: `n/2` per component).
    Diagonal { n: usize },
    /// `[−half_length, half_length]` with `points` interior nodes per
    /// component.
    Interval { half_length: f64, points: usize },
}

impl TruncationSpec {
    pub fn validate(&self) -> Result<(), GalleryError> {
        match *self {
            TruncationSpec::Diagonal { n } if n < 2 => Err(GalleryError::InvalidSpec(format!("section size {n} < 2"))),
            TruncationSpec::Interval { points, .. } if points < 2 => {
                Err(GalleryError::InvalidSpec(format!("{points} interior points < 2")))
            }
            TruncationSpec::Interval { half_length, .. } if !(half_length > 0.0 && half_length.is_finite()) => Err(
                GalleryError::InvalidSpec(format!("half-length {half_length} must be positive")),
            ),
            _ => Ok(()),
        }
    }

    /// Number of nodes per component.
    pub fn size(&self) -> usize {
        match *self {
            TruncationSpec::Diagonal { n } => n,
            TruncationSpec::Interval { points, .. } => points,
        }
    }
}

/// Interior nodes `x_j = −L + j·h`, `h = 2L/(N+1)`.
pub fn grid(half_length: f64, points: usize) -> (Vec<f64>, f64) {
    let h = 2.0 * half_length / (points + 1) as f64;
    ((1..=points).map(|j| -half_length + j as f64 * h).collect(), h)
}

impl PencilFamily {
    pub fn new(name: impl Into<String>, kind: FamilyKind) -> Self {
        Self {
            name: name.into(),
            kind,
        }
    }

    /// Wraps `self` with a left multiplier.
    pub fn multiplied(self, multiplier: Multiplier) -> Self {
        let name = format!("{}*B", self.name);
        Self::new(
            name,
            FamilyKind::Multiplied {
                inner: Box::new(self),
                multiplier,
            },
        )
    }

    fn base(&self) -> &PencilFamily {
        match &self.kind {
            FamilyKind::Multiplied { inner, .. } => inner.base(),
            _ => self,
        }
    }

    /// Sequence families are truncated by size, differential ones by interval.
    pub fn is_sequence(&self) -> bool {
        matches!(
            self.base().kind,
            FamilyKind::Diagonal { .. } | FamilyKind::Block2x2 { .. }
        )
    }

    /// Components per node: 1 for scalar families, 2 for block families.
    pub fn components(&self) -> usize {
        match self.base().kind {
            FamilyKind::Diagonal { .. }
            | FamilyKind::Schrodinger1d { .. }
            | FamilyKind::SturmLiouvilleIndefinite { .. } => 1,
            _ => 2,
        }
    }

    /// Node coordinates of one component: indices `1..` or grid points.
    pub fn nodes(&self, t: &TruncationSpec) -> Result<Vec<f64>, GalleryError> {
        t.validate()?;
        match (*t, self.is_sequence()) {
            (TruncationSpec::Diagonal { n }, true) => {
                let c = self.components();
                if n % c != 0 {
                    return Err(GalleryError::InvalidSpec(format!(
                        "section size {n} is not a multiple of {c} components"
                    )));
                }
                Ok((1..=n / c).map(|k| k as f64).collect())
            }
            (TruncationSpec::Interval { half_length, points }, false) => Ok(grid(half_length, points).0),
            _ => Err(GalleryError::InvalidSpec(format!(
                "truncation {t:?} does not fit family '{}'",
                self.name
            ))),
        }
    }

    /// Matched finite section `(A, B)`.
    pub fn section(&self, t: &TruncationSpec) -> Result<PencilSection, GalleryError> {
        let nodes = self.nodes(t)?;
        let m = nodes.len();
        let sample = |c: &Coefficient| -> Vec<C64> { nodes.iter().map(|&x| c.eval(x)).collect() };
        let h = match *t {
            TruncationSpec::Interval { half_length, points } => grid(half_length, points).1,
            TruncationSpec::Diagonal { .. } => 1.0,
        };
        let pair =
            |a: CMatrix, b: CMatrix| PencilSection::new(a, b).map_err(|e| GalleryError::InvalidSpec(e.to_string()));
        match &self.kind {
            FamilyKind::Diagonal { a, b } => pair(CMatrix::from_diag(&sample(a)), CMatrix::from_diag(&sample(b))),
            FamilyKind::Block2x2 { a, b } => {
                let assemble = |blocks: &[Coefficient; 4]| {
                    let d: Vec<Vec<C64>> = blocks.iter().map(|c| sample(c)).collect();
                    block_diagonals(&d[0], &d[1], &d[2], &d[3])
                };
                pair(assemble(a), assemble(b))
            }
            FamilyKind::Schrodinger1d { v } => {
                let a = laplacian(m, h, &sample(v));
                pair(a, CMatrix::identity(m))
            }
            FamilyKind::SturmLiouvilleIndefinite { v, j } => {
                let a = laplacian(m, h, &sample(v));
                pair(a, CMatrix::from_diag(&sample(j)))
            }
            FamilyKind::Dirac1d { v } => {
                let vs = sample(v);
                let one = C64::new(1.0, 0.0);
                let mut t = CMatrix::zeros(2 * m, 2 * m);
                let d1 = first_derivative(m, h).scale(C64::new(0.0, -1.0));
                for i in 0..m {
                    t[(i, i)] = one + vs[i];
                    t[(m + i, m + i)] = -one + vs[i];
                    for j in i.saturating_sub(1)..(i + 2).min(m) {
                        t[(i, m + j)] = d1[(i, j)];
                        t[(m + i, j)] = d1[(i, j)];
                    }
                }
                pair(t, CMatrix::identity(2 * m))
            }
            FamilyKind::Stokes1d { u, gamma, delta } => {
                let lap = laplacian(m, h, &vec![C64::new(0.0, 0.0); m]);
                let d1 = first_derivative(m, h);
                let us = sample(u);
                let mut t = CMatrix::zeros(2 * m, 2 * m);
                for i in 0..m {
                    t[(m + i, m + i)] = us[i];
                    for j in i.saturating_sub(1)..(i + 2).min(m) {
                        t[(i, j)] = lap[(i, j)];
                        t[(i, m + j)] = gamma * d1[(i, j)];
                        t[(m + i, j)] = delta * d1[(i, j)];
                    }
                }
                pair(t, CMatrix::identity(2 * m))
            }
            FamilyKind::HainLust { q, w, v, u } => {
                let lap = laplacian(m, h, &sample(q));
                let (ws, vs, us) = (sample(w), sample(v), sample(u));
                let mut t = CMatrix::zeros(2 * m, 2 * m);
                for i in 0..m {
                    for j in i.saturating_sub(1)..(i + 2).min(m) {
                        t[(i, j)] = lap[(i, j)];
                    }
                    t[(i, m + i)] = ws[i];
                    t[(m + i, i)] = vs[i];
                    t[(m + i, m + i)] = us[i];
                }
                pair(t, CMatrix::identity(2 * m))
            }
            FamilyKind::Multiplied { inner, multiplier } => {
                let p = inner.section(t)?;
                let n = p.dim();
                let left = match multiplier {
                    Multiplier::Scalar(c) => {
                        let d = sample(c);
                        let full: Vec<C64> = (0..n).map(|i| d[i % m]).collect();
                        return pair(p.a.scale_rows(&full), p.b.scale_rows(&full));
                    }
                    Multiplier::Blocks(c1, c2) => {
                        if self.components() != 2 {
                            return Err(GalleryError::InvalidSpec("block multiplier on a scalar family".into()));
                        }
                        let mut d = sample(c1);
                        d.extend(sample(c2));
                        return pair(p.a.scale_rows(&d), p.b.scale_rows(&d));
                    }
                    Multiplier::Matrix(b) => b,
                };
                if left.shape() != (n, n) {
                    return Err(GalleryError::InvalidSpec(format!(
                        "multiplier is {:?}, section is {n}x{n}",
                        left.shape()
                    )));
                }
                pair(left.matmul(&p.a), left.matmul(&p.b))
            }
        }
    }
}

/// `(1/h²)·tridiag(−1, 2, −1) + diag(v)`.
pub fn laplacian(m: usize, h: f64, v: &[C64]) -> CMatrix {
    let s = 1.0 / (h * h);
    let mut a = CMatrix::zeros(m, m);
    for i in 0..m {
        a[(i, i)] = C64::new(2.0 * s, 0.0) + v[i];
        if i + 1 < m {
            a[(i, i + 1)] = C64::new(-s, 0.0);
            a[(i + 1, i)] = C64::new(-s, 0.0);
        }
    }
    a
}

/// `(1/2h)·tridiag(−1, 0, 1)`.
pub fn first_derivative(m: usize, h: f64) -> CMatrix {
    let s = 0.5 / h;
    let mut d = CMatrix::zeros(m, m);
    for i in 0..m.saturating_sub(1) {
        d[(i, i + 1)] = C64::new(s, 0.0);
        d[(i + 1, i)] = C64::new(-s, 0.0);
    }
    d
}

fn block_diagonals(d11: &[C64], d12: &[C64], d21: &[C64], d22: &[C64]) -> CMatrix {
    let m = d11.len();
    let mut t = CMatrix::zeros(2 * m, 2 * m);
    for i in 0..m {
        t[(i, i)] = d11[i];
        t[(i, m + i)] = d12[i];
        t[(m + i, i)] = d21[i];
        t[(m + i, m + i)] = d22[i];
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matkernel::{general_eig, hermitian_eigvals};

    #[test]
    fn unifpos_section() {
        let p = unifpos().section(&TruncationSpec::Diagonal { n: 3 }).unwrap();
        assert_eq!(p.a, CMatrix::from_real_diag(&[2.0, 6.0, 12.0]));
        assert_eq!(p.b, CMatrix::from_real_diag(&[1.0, 4.0, 9.0]));
    }

    #[test]
    fn jt_section_and_spectrum() {
        let p = jt_pencil().section(&TruncationSpec::Diagonal { n: 4 }).unwrap();
        assert_eq!(p.a, CMatrix::from_real_diag(&[1.0, 2.0, 1.0, 2.0]));
        assert_eq!(p.b, CMatrix::from_real_diag(&[1.0, 1.0, -1.0, -1.0]));
        let mut ev: Vec<f64> = jt_pencil()
            .section(&TruncationSpec::Diagonal { n: 20 })
            .unwrap()
            .generalized_eigenvalues()
            .unwrap()
            .iter()
            .map(|z| z.re)
            .collect();
        ev.sort_by(f64::total_cmp);
        let mut want: Vec<f64> = (1..=10).flat_map(|k| [k as f64, -(k as f64)]).collect();
        want.sort_by(f64::total_cmp);
        assert_eq!(ev, want);
    }

    #[test]
    fn jt_operator_form_interleaves() {
        let p = jt_operator().section(&TruncationSpec::Diagonal { n: 6 }).unwrap();
        assert_eq!(p.a, CMatrix::from_real_diag(&[1.0, -1.0, 2.0, -2.0, 3.0, -3.0]));
        assert_eq!(p.b, CMatrix::identity(6));
    }

    #[test]
    fn spec_validation() {
        assert!(unifpos().section(&TruncationSpec::Diagonal { n: 1 }).is_err());
        assert!(unifpos()
            .section(&TruncationSpec::Interval {
                half_length: 1.0,
                points: 10
            })
            .is_err());
        let s = schrodinger1d(Coefficient::parse("x^2").unwrap());
        assert!(s
            .section(&TruncationSpec::Interval {
                half_length: -1.0,
                points: 10
            })
            .is_err());
        assert!(jt_pencil().section(&TruncationSpec::Diagonal { n: 5 }).is_err());
    }

    fn oscillator_levels(points: usize) -> Vec<f64> {
        let f = schrodinger1d(Coefficient::parse("x^2").unwrap());
        let p = f
            .section(&TruncationSpec::Interval {
                half_length: 10.0,
                points,
            })
            .unwrap();
        hermitian_eigvals(&p.a).unwrap()[..3].to_vec()
    }

    #[test]
    fn harmonic_oscillator_levels() {
        let fine = oscillator_levels(999);
        for (k, e) in fine.iter().enumerate() {
            assert!((e - (2 * k + 1) as f64).abs() < 2e-3, "{k}: {e}");
        }
        // second order: halving h quarters the error
        let coarse = oscillator_levels(499);
        let ratio = (coarse[2] - 5.0) / (fine[2] - 5.0);
        assert!((ratio - 4.0).abs() < 0.2, "{ratio}");
    }

    #[test]
    fn multiplied_sections_commute_with_truncation() {
        let f = dirac1d(Coefficient::parse("0.3*i*exp(-x^2)").unwrap());
        let t = TruncationSpec::Interval {
            half_length: 3.0,
            points: 20,
        };
        let theta = 0.4;
        let g = f.clone().multiplied(dirac_multiplier(theta));
        let p = f.section(&t).unwrap();
        let q = g.section(&t).unwrap();
        let d: Vec<C64> = (0..40)
            .map(|i| C64::from_polar(1.0, if i < 20 { -theta } else { theta }))
            .collect();
        assert!(q.a.max_abs_diff(&p.a.scale_rows(&d)) < 1e-15);
        assert!(q.b.max_abs_diff(&CMatrix::from_diag(&d)) < 1e-15);
    }

    #[test]
    fn free_dirac_spectrum_has_gap() {
        let f = dirac1d(Coefficient::real(0.0));
        let t = TruncationSpec::Interval {
            half_length: 5.0,
            points: 100,
        };
        let p = f.section(&t).unwrap();
        // −i·D1 is Hermitian, so the section is Hermitian
        for e in hermitian_eigvals(&p.a).unwrap() {
            assert!(e.abs() >= 1.0 - 5e-3, "{e}");
        }
        let shifted = dirac1d(Coefficient::real(0.5)).section(&t).unwrap();
        let mut a = hermitian_eigvals(&p.a).unwrap();
        let b = hermitian_eigvals(&shifted.a).unwrap();
        a.iter_mut().for_each(|x| *x += 0.5);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn hain_lust_decouples() {
        let zero = Coefficient::real(0.0);
        let (f, _) = hain_lust(
            Coefficient::parse("x^2").unwrap(),
            zero.clone(),
            zero,
            Coefficient::parse("2*step(0, inf)").unwrap(),
            8.0,
            40,
        );
        let t = TruncationSpec::Interval {
            half_length: 8.0,
            points: 40,
        };
        let p = f.section(&t).unwrap();
        let mut ev: Vec<f64> = general_eig(&p.a).unwrap().iter().map(|z| z.re).collect();
        ev.sort_by(f64::total_cmp);
        let s = schrodinger1d(Coefficient::parse("x^2").unwrap()).section(&t).unwrap();
        let mut want = hermitian_eigvals(&s.a).unwrap();
        want.extend((0..40).map(|j| if grid(8.0, 40).0[j] >= 0.0 { 2.0 } else { 0.0 }));
        want.sort_by(f64::total_cmp);
        for (x, y) in ev.iter().zip(&want) {
            assert!((x - y).abs() < 1e-8 * y.abs().max(1.0), "{x} {y}");
        }
    }

    #[test]
    fn stokes_symbol_values() {
        let u0 = C64::new(-1.0, 1.0);
        let [a, b] = stokes_symbol(u0, C64::new(1.0, 0.0), 0.0);
        assert!((a - u0).norm() < 1e-15 || (b - u0).norm() < 1e-15);
        assert!(a.norm() < 1e-15 || b.norm() < 1e-15);
        // 2×2 symbol oracle
        let k = 1.0;
        let m = CMatrix::from_rows(&[vec![C64::new(k * k, 0.0), C64::new(0.0, k)], vec![C64::new(0.0, k), u0]]);
        let ev = general_eig(&m).unwrap();
        for z in stokes_symbol(u0, C64::new(1.0, 0.0), k) {
            assert!(ev.iter().any(|e| (e - z).norm() < 1e-12), "{z}");
        }
        let [a, b] = stokes_symbol(C64::new(0.0, 0.0), C64::new(1.0, 0.0), 2.0);
        assert!((a - 2.0).norm() < 1e-15 && (b - 2.0).norm() < 1e-15);
    }

    #[test]
    fn hain_lust_epsilon_is_positive() {
        let (_, report) = hain_lust(
            Coefficient::parse("x^2").unwrap(),
            Coefficient::real(1.0),
            Coefficient::parse("x").unwrap(),
            Coefficient::parse("2*step(0, inf)")
                .unwrap()
                .with_essran(EssRange::points(vec![C64::new(0.0, 0.0), C64::new(2.0, 0.0)])),
            8.0,
            159,
        );
        assert!(report.warnings.is_empty(), "{:?}", report.warnings);
        assert!((report.b - 1.0).abs() < 1e-12);
        let eps = report.epsilon(C64::new(1.0, 0.0)).unwrap();
        assert!(eps.is_finite() && eps > 0.0);
        assert!((eps - 1.0).abs() < 1e-12);
    }
}
