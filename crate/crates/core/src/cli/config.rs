//! Experiment configuration: one TOML document per run.
//!
//! ```toml
//! kind = "sweep"
//! seed = 1
//! out_dir = "out/sl"
//!
//! [family]
//! kind = "sturm-liouville"
//! well = "-2*step(1,3)"
//!
//! [[truncation]]
//! kind = "interval"
//! half_length = 20.0
//! points = 1599
//! ```
//!
//! Complex scalars are expression strings (`"-1+i"`); essential-range
//! descriptors use `[re, im]` pairs.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::gallery::{
    dirac1d, dirac_multiplier, hain_lust, jt_operator, jt_pencil, line, notclosed, reciprocal_pair,
    rotation_multiplier, schrodinger1d, sl_indefinite, stokes1d, unifpos, Coefficient, EssRange, Expr, FamilyKind,
    Multiplier, PencilFamily, TruncationSpec,
};
use crate::matkernel::{CMatrix, C64};
use crate::ranges::PencilSection;
use crate::region::Rect;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Range,
    PencilRange,
    EssRange,
    Sweep,
    Inject,
    Enclosure,
    Figure,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilyConfig>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub truncation: Vec<TruncationSpec>,
    #[serde(default)]
    pub region: RegionConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multiplier: Option<MultiplierConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range: Option<RangeConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail: Option<TailConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classify: Option<ClassifyConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inject: Option<InjectConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub enclosure: Option<EnclosureConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub figure: Option<FigureConfig>,
}

fn default_seed() -> u64 {
    1
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

/// Families of the gallery. Coefficients are expressions in `x` (or `n`
/// for sequences).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FamilyConfig {
    Unifpos,
    Notclosed,
    Line,
    Reciprocal,
    JtPencil,
    JtOperator,
    Diagonal {
        a: String,
        b: String,
    },
    /// Literal matrices, rows of expression strings. `b` defaults to `I`.
    Matrix {
        a: Vec<Vec<String>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        b: Option<Vec<Vec<String>>>,
    },
    Schrodinger {
        v: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        essran: Option<EssRange>,
    },
    SturmLiouville {
        #[serde(default = "one")]
        m_minus: f64,
        #[serde(default = "one")]
        m_plus: f64,
        well: String,
        #[serde(default)]
        a: f64,
        #[serde(default)]
        b: f64,
    },
    Dirac {
        v: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        essran: Option<EssRange>,
    },
    Stokes {
        u: String,
        gamma: String,
        delta: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        essran: Option<EssRange>,
    },
    HainLust {
        q: String,
        w: String,
        v: String,
        u: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        essran: Option<EssRange>,
    },
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionConfig {
    /// `[re_min, re_max, im_min, im_max]`.
    #[serde(rename = "box")]
    pub bounds: [f64; 4],
    /// `[nx, ny]`.
    pub res: [usize; 2],
}

impl Default for RegionConfig {
    fn default() -> Self {
        Self {
            bounds: [-10.0, 10.0, -10.0, 10.0],
            res: [200, 200],
        }
    }
}

impl RegionConfig {
    pub fn rect(&self) -> Result<Rect, CliError> {
        let [a, b, c, d] = self.bounds;
        Rect::new(a, b, c, d).map_err(|e| CliError::config("region.box", e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MultiplierConfig {
    /// Scalar function of `x` applied to every component.
    Scalar {
        b: String,
    },
    /// `diag(b1, b2)` on two-component families.
    Blocks {
        b1: String,
        b2: String,
    },
    Rotation {
        phi: f64,
        a: f64,
        b: f64,
    },
    Dirac {
        theta: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeConfig {
    /// Also sample the quadratic numerical range for this block split.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qnr_split: Option<usize>,
    #[serde(default = "default_qnr_samples")]
    pub qnr_samples: usize,
}

fn default_qnr_samples() -> usize {
    500
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TailConfig {
    pub depths: Vec<usize>,
    pub window: usize,
    /// Estimate `w_e` instead of `W_e`.
    #[serde(default)]
    pub ratio: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifyConfig {
    pub tol_drift: f64,
    #[serde(default = "default_persistence")]
    pub min_persistence: usize,
    /// Known spectrum to compare clusters against, as expression strings.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub spectrum: Vec<String>,
}

fn default_persistence() -> usize {
    3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InjectConfig {
    pub base_n: usize,
    pub targets: Vec<String>,
    pub search_depth: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnclosureKindConfig {
    Stokes,
    Dirac,
    HalfLines,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnclosureConfig {
    pub kind: EnclosureKindConfig,
    pub essran: EssRange,
    #[serde(default = "default_phi_grid")]
    pub phi_grid: usize,
}

fn default_phi_grid() -> usize {
    64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FigureConfig {
    pub preset: String,
}

pub(crate) fn complex(field: &str, src: &str) -> Result<C64, CliError> {
    let e = Expr::parse(src).map_err(|e| CliError::config(field, e.to_string()))?;
    if !e.is_constant() {
        return Err(CliError::config(field, format!("'{src}' is not a constant")));
    }
    Ok(e.eval(0.0))
}

fn coefficient(field: &str, src: &str) -> Result<Coefficient, CliError> {
    Coefficient::parse(src).map_err(|e| CliError::config(field, e.to_string()))
}

fn matrix(field: &str, rows: &[Vec<String>]) -> Result<CMatrix, CliError> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(CliError::config(field, "matrix must be square and non-empty"));
    }
    let rows = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            r.iter()
                .enumerate()
                .map(|(j, s)| complex(&format!("{field}[{i}][{j}]"), s))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CMatrix::from_rows(&rows))
}

/// What a family descriptor builds: a literal pencil or a gallery family.
pub enum Built {
    Section(PencilSection),
    Family(PencilFamily),
}

impl FamilyConfig {
    pub fn build(&self, truncation: &[TruncationSpec]) -> Result<Built, CliError> {
        let with = |c: Coefficient, e: &Option<EssRange>| match e {
            Some(e) => c.with_essran(e.clone()),
            None => c,
        };
        let family = match self {
            FamilyConfig::Unifpos => unifpos(),
            FamilyConfig::Notclosed => notclosed(),
            FamilyConfig::Line => line(),
            FamilyConfig::Reciprocal => reciprocal_pair(),
            FamilyConfig::JtPencil => jt_pencil(),
            FamilyConfig::JtOperator => jt_operator(),
            FamilyConfig::Diagonal { a, b } => PencilFamily::new(
                "diagonal",
                FamilyKind::Diagonal {
                    a: coefficient("family.a", a)?,
                    b: coefficient("family.b", b)?,
                },
            ),
            FamilyConfig::Matrix { a, b } => {
                let a = matrix("family.a", a)?;
                let b = match b {
                    Some(b) => matrix("family.b", b)?,
                    None => CMatrix::identity(a.rows()),
                };
                let p = PencilSection::new(a, b).map_err(|e| CliError::config("family.b", e.to_string()))?;
                return Ok(Built::Section(p));
            }
            FamilyConfig::Schrodinger { v, essran } => schrodinger1d(with(coefficient("family.v", v)?, essran)),
            FamilyConfig::SturmLiouville {
                m_minus,
                m_plus,
                well,
                a,
                b,
            } => sl_indefinite(*m_minus, *m_plus, coefficient("family.well", well)?, *a, *b)
                .map_err(|e| CliError::config("family", e.to_string()))?,
            FamilyConfig::Dirac { v, essran } => dirac1d(with(coefficient("family.v", v)?, essran)),
            FamilyConfig::Stokes {
                u,
                gamma,
                delta,
                essran,
            } => stokes1d(
                with(coefficient("family.u", u)?, essran),
                complex("family.gamma", gamma)?,
                complex("family.delta", delta)?,
            ),
            FamilyConfig::HainLust { q, w, v, u, essran } => {
                let (l, n) = match truncation.last() {
                    Some(TruncationSpec::Interval { half_length, points }) => (*half_length, *points),
                    _ => return Err(CliError::config("truncation", "hain-lust needs an interval truncation")),
                };
                hain_lust(
                    coefficient("family.q", q)?,
                    coefficient("family.w", w)?,
                    coefficient("family.v", v)?,
                    with(coefficient("family.u", u)?, essran),
                    l,
                    n,
                )
                .0
            }
        };
        Ok(Built::Family(family))
    }
}

impl MultiplierConfig {
    pub fn build(&self) -> Result<Multiplier, CliError> {
        Ok(match self {
            MultiplierConfig::Scalar { b } => Multiplier::Scalar(coefficient("multiplier.b", b)?),
            MultiplierConfig::Blocks { b1, b2 } => {
                Multiplier::Blocks(coefficient("multiplier.b1", b1)?, coefficient("multiplier.b2", b2)?)
            }
            MultiplierConfig::Rotation { phi, a, b } => rotation_multiplier(*phi, *a, *b),
            MultiplierConfig::Dirac { theta } => dirac_multiplier(*theta),
        })
    }
}

impl ExperimentConfig {
    /// Parses and validates; errors carry the line or field at fault.
    pub fn parse(src: &str) -> Result<Self, CliError> {
        let cfg: ExperimentConfig = toml::from_str(src).map_err(|e| CliError::Config {
            field: e
                .span()
                .map(|s| format!("line {}", line_of(src, s.start)))
                .unwrap_or_default(),
            message: e.message().to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let src = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&src)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always serializable")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        use ExperimentKind::*;
        self.region.rect()?;
        if self.region.res.contains(&0) {
            return Err(CliError::config("region.res", "resolution must be positive"));
        }
        for (i, t) in self.truncation.iter().enumerate() {
            t.validate()
                .map_err(|e| CliError::config(&format!("truncation[{i}]"), e.to_string()))?;
        }
        let need = |present: bool, field: &str| {
            if present {
                Ok(())
            } else {
                Err(CliError::config(
                    field,
                    format!("required for kind '{}'", self.kind_name()),
                ))
            }
        };
        match self.kind {
            Range | PencilRange => need(self.family.is_some(), "family")?,
            EssRange => {
                need(self.family.is_some(), "family")?;
                need(self.tail.is_some(), "tail")?;
            }
            Sweep => {
                need(self.family.is_some(), "family")?;
                if self.truncation.len() < 3 {
                    return Err(CliError::config("truncation", "a sweep needs at least 3 levels"));
                }
            }
            Inject => {
                need(self.family.is_some(), "family")?;
                need(self.inject.is_some(), "inject")?;
            }
            Enclosure => need(self.enclosure.is_some(), "enclosure")?,
            Figure => need(self.figure.is_some(), "figure")?,
        }
        if let Some(f) = &self.family {
            let built = f.build(&self.truncation)?;
            let is_family = matches!(built, Built::Family(_));
            if is_family && matches!(self.kind, Range | PencilRange) && self.truncation.is_empty() {
                return Err(CliError::config("truncation", "a gallery family needs a truncation"));
            }
            if !is_family && matches!(self.kind, EssRange | Sweep | Inject) {
                return Err(CliError::config("family", "a literal matrix has no truncation levels"));
            }
        }
        if let Some(m) = &self.multiplier {
            m.build()?;
        }
        if let Some(c) = &self.classify {
            for (i, s) in c.spectrum.iter().enumerate() {
                complex(&format!("classify.spectrum[{i}]"), s)?;
            }
        }
        if let Some(j) = &self.inject {
            for (i, s) in j.targets.iter().enumerate() {
                complex(&format!("inject.targets[{i}]"), s)?;
            }
        }
        if let Some(f) = &self.figure {
            if !super::PRESETS.contains(&f.preset.as_str()) {
                return Err(CliError::config(
                    "figure.preset",
                    format!("unknown preset '{}'", f.preset),
                ));
            }
        }
        Ok(())
    }

    pub fn kind_name(&self) -> String {
        serde_json::to_value(self.kind)
            .ok()
            .and_then(|v| v.as_str().map(str::to_string))
            .unwrap_or_default()
    }
}

fn line_of(src: &str, offset: usize) -> usize {
    src[..offset.min(src.len())].matches('\n').count() + 1
}
