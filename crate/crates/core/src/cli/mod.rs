//! Experiment runner: config files in, JSON/CSV/SVG artifacts and a
//! markdown summary out.

pub mod config;
pub mod svg;

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::approx::{classify, inject_pollution, run_sweep, Classification, Reference};
use crate::enclosures::{dirac_region, stokes_region, EnclosureSpec};
use crate::gallery::{stokes_symbol, EssRange, PencilFamily, TruncationSpec};
use crate::matkernel::C64;
use crate::ranges::{ess_range_tail, nrange, pencil_range, qnr_sample, w_range_hpd, PencilSection, TailOptions};
use crate::region::{Raster, Rect};

pub use config::{ExperimentConfig, ExperimentKind};
pub use svg::{emit_svg, Layer, Style};

use config::{Built, EnclosureKindConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

pub const PRESETS: [&str; 2] = ["stokes-const", "stokes-circles"];

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error{}: {message}", if field.is_empty() { String::new() } else { format!(" at {field}") })]
    Config { field: String, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CliError {
    pub fn config(field: &str, message: impl Into<String>) -> Self {
        CliError::Config {
            field: field.to_string(),
            message: message.into(),
        }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => EXIT_VALIDATION,
            CliError::Io { .. } => EXIT_IO,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

fn numerical(e: impl std::fmt::Display) -> CliError {
    CliError::Numerical(e.to_string())
}

/// Collects artifacts for one run; every file lands in `dir`.
struct Artifacts {
    dir: PathBuf,
    written: Vec<PathBuf>,
    summary: String,
}

impl Artifacts {
    fn new(dir: &Path, title: &str) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
            summary: format!("# {title}\n\n"),
        })
    }

    fn write(&mut self, name: &str, body: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        std::fs::write(&path, body).map_err(|e| CliError::io(&path, e))?;
        self.written.push(path);
        Ok(())
    }

    fn json(&mut self, name: &str, v: &serde_json::Value) -> Result<(), CliError> {
        let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
        s.push('\n');
        self.write(name, &s)
    }

    fn line(&mut self, s: impl AsRef<str>) {
        self.summary.push_str(s.as_ref());
        self.summary.push('\n');
    }

    fn finish(mut self) -> Result<Vec<PathBuf>, CliError> {
        let files: Vec<String> = self
            .written
            .iter()
            .filter_map(|p| p.file_name().map(|n| format!("- `{}`", n.to_string_lossy())))
            .collect();
        self.summary.push_str("\n## Files\n\n");
        self.summary.push_str(&files.join("\n"));
        self.summary.push('\n');
        let body = self.summary.clone();
        self.write("summary.md", &body)?;
        Ok(self.written)
    }
}

fn raster_layer(r: &Raster, fill: &str) -> Layer {
    Layer::Raster {
        raster: r.clone(),
        fill: fill.into(),
    }
}

fn region_style(rect: Rect, title: &str) -> Style {
    Style {
        frame: Some(rect),
        title: Some(title.into()),
        ..Style::default()
    }
}

fn describe_raster(r: &Raster) -> String {
    let (nx, ny) = r.resolution();
    format!("{} of {} cells on a {nx}×{ny} grid", r.count(), nx * ny)
}

/// Runs one experiment; returns the files written. A failing level of a
/// sweep still writes its artifacts before reporting the failure.
pub fn run(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>, CliError> {
    cfg.validate()?;
    let rect = cfg.region.rect()?;
    let [nx, ny] = cfg.region.res;
    let mut art = Artifacts::new(&cfg.out_dir, &format!("{} experiment", cfg.kind_name()))?;
    art.line(format!("- seed: {}", cfg.seed));
    art.line(format!(
        "- box: [{}, {}] × [{}, {}], resolution {nx}×{ny}",
        rect.re_min, rect.re_max, rect.im_min, rect.im_max
    ));
    art.write("config.toml", &cfg.to_toml())?;

    let built = match &cfg.family {
        Some(f) => Some(f.build(&cfg.truncation)?),
        None => None,
    };
    let family = |b: &Option<Built>| -> Result<PencilFamily, CliError> {
        match b {
            Some(Built::Family(f)) => Ok(match &cfg.multiplier {
                Some(m) => f.clone().multiplied(m.build()?),
                None => f.clone(),
            }),
            _ => Err(CliError::config("family", "a gallery family is required")),
        }
    };
    let section = |b: &Option<Built>| -> Result<PencilSection, CliError> {
        match b {
            Some(Built::Section(p)) => Ok(p.clone()),
            Some(Built::Family(_)) => {
                let t = cfg
                    .truncation
                    .last()
                    .ok_or_else(|| CliError::config("truncation", "missing"))?;
                family(b)?.section(t).map_err(numerical)
            }
            None => Err(CliError::config("family", "missing")),
        }
    };

    let mut failure = None;
    match cfg.kind {
        ExperimentKind::Range => {
            let p = section(&built)?;
            let ident = p.b.max_abs_diff(&crate::matkernel::CMatrix::identity(p.dim())) == 0.0;
            let s = if ident { nrange(&p.a) } else { w_range_hpd(&p) }.map_err(numerical)?;
            art.json("support.json", &serde_json::to_value(&s).expect("support serializes"))?;
            art.line(format!(
                "- {}: support function on {} angles",
                if ident { "W(A)" } else { "w(A,B)" },
                s.angles_count()
            ));
            let mut layers = vec![Layer::Curve {
                points: s.polygon(),
                stroke: "#1f4e9c".into(),
                closed: true,
            }];
            if let Some(split) = cfg.range.as_ref().and_then(|r| r.qnr_split) {
                let samples = cfg.range.as_ref().map_or(500, |r| r.qnr_samples);
                let pts = qnr_sample(&p.a, split, samples, cfg.seed).map_err(numerical)?;
                let rows: Vec<[f64; 2]> = pts.iter().map(|z| [z.re, z.im]).collect();
                art.json("qnr.json", &serde_json::json!({ "split": split, "points": rows }))?;
                art.line(format!(
                    "- quadratic numerical range: {} points, split {split}",
                    pts.len()
                ));
                layers.push(Layer::Points {
                    points: pts,
                    fill: "#c0392b".into(),
                    radius: 1.0,
                });
            }
            art.write("range.svg", &emit_svg(&layers, &region_style(rect, "numerical range")))?;
        }
        ExperimentKind::PencilRange => {
            let p = section(&built)?;
            let r = pencil_range(&p, rect, nx, ny).map_err(numerical)?;
            art.json("pencil_range.json", &r.to_json())?;
            art.line(format!("- W(A,B): {}", describe_raster(&r)));
            let layers = [raster_layer(&r, "#1f4e9c")];
            art.write(
                "pencil_range.svg",
                &emit_svg(&layers, &region_style(rect, "pencil numerical range")),
            )?;
        }
        ExperimentKind::EssRange => {
            let f = family(&built)?;
            let r = tail_estimate(cfg, &f, rect, nx, ny)?;
            art.json("ess_range.json", &r.to_json())?;
            art.line(format!("- essential range estimate: {}", describe_raster(&r)));
            let layers = [raster_layer(&r, "#1f4e9c")];
            art.write(
                "ess_range.svg",
                &emit_svg(&layers, &region_style(rect, "essential numerical range")),
            )?;
        }
        ExperimentKind::Sweep => {
            let f = family(&built)?;
            let mut run = run_sweep(&f, &cfg.truncation).map_err(numerical)?;
            let mut reference = Reference::default();
            if cfg.tail.is_some() {
                reference.region = Some(tail_estimate(cfg, &f, rect, nx, ny)?);
            }
            let (tol, persist) = cfg
                .classify
                .as_ref()
                .map_or((1e-3, 3), |c| (c.tol_drift, c.min_persistence));
            if let Some(c) = &cfg.classify {
                if !c.spectrum.is_empty() {
                    let s = c
                        .spectrum
                        .iter()
                        .map(|s| config::complex("classify.spectrum", s))
                        .collect::<Result<Vec<_>, _>>()?;
                    reference.spectrum = Some(s);
                }
            }
            if reference.region.is_some() || reference.spectrum.is_some() {
                run = run.with_reference(reference);
            }
            let run = classify(&run, tol, persist);
            art.json("sweep.json", &run.to_json())?;
            art.write("sweep.csv", &run.to_csv())?;
            art.line("\n## Levels\n");
            for (i, l) in run.levels.iter().enumerate() {
                match &l.error {
                    None => art.line(format!(
                        "- level {i} ({:?}): {} eigenvalues",
                        l.spec,
                        l.eigenvalues.len()
                    )),
                    Some(e) => {
                        art.line(format!("- level {i} ({:?}): FAILED: {e}", l.spec));
                        failure.get_or_insert_with(|| format!("level {i}: {e}"));
                    }
                }
            }
            art.line("\n## Clusters\n");
            for k in [
                Classification::Converged,
                Classification::SpuriousCandidate,
                Classification::Unresolved,
            ] {
                let n = run.clusters_of(k).count();
                art.line(format!(
                    "- {}: {n}",
                    serde_json::to_value(k).expect("enum").as_str().unwrap_or("")
                ));
            }
            for c in run.clusters_of(Classification::SpuriousCandidate).take(50) {
                art.line(format!(
                    "  - spurious candidate at {:.6}{:+.6}i (drift {:.2e}, persistence {})",
                    c.location.re, c.location.im, c.drift, c.persistence
                ));
            }
            for flag in &run.flags {
                art.line(format!("- flag: {flag}"));
            }
            let mut layers = Vec::new();
            if let Some(r) = run.reference.as_ref().and_then(|r| r.region.as_ref()) {
                layers.push(raster_layer(r, "#dde6f3"));
            }
            let levels = run.levels.len();
            for (i, l) in run.levels.iter().enumerate().take(levels.saturating_sub(1)) {
                let g = 200 - 120 * i / levels.max(1);
                layers.push(Layer::Points {
                    points: l.eigenvalues.clone(),
                    fill: format!("#{g:02x}{g:02x}{g:02x}"),
                    radius: 1.5,
                });
            }
            for (k, color) in [
                (Classification::Converged, "#1e8449"),
                (Classification::SpuriousCandidate, "#c0392b"),
                (Classification::Unresolved, "#b9770e"),
            ] {
                layers.push(Layer::Points {
                    points: run.clusters_of(k).map(|c| c.location).collect(),
                    fill: color.into(),
                    radius: 2.5,
                });
            }
            art.write(
                "sweep.svg",
                &emit_svg(&layers, &region_style(rect, "eigenvalues per level")),
            )?;
        }
        ExperimentKind::Inject => {
            let f = family(&built)?;
            let j = cfg.inject.as_ref().expect("validated");
            let targets = j
                .targets
                .iter()
                .map(|s| config::complex("inject.targets", s))
                .collect::<Result<Vec<_>, _>>()?;
            let inj = inject_pollution(&f, j.base_n, &targets, j.search_depth).map_err(numerical)?;
            let ev = inj.section.generalized_eigenvalues().map_err(numerical)?;
            let pair = |z: &C64| serde_json::json!([z.re, z.im]);
            art.json(
                "inject.json",
                &serde_json::json!({
                    "base_n": inj.base_n,
                    "vectors": inj.vectors.iter().map(|v| serde_json::json!({
                        "target": pair(&v.target), "j": v.j, "k": v.k, "alpha": v.alpha, "beta": v.beta,
                    })).collect::<Vec<_>>(),
                    "noop": inj.noop.iter().map(pair).collect::<Vec<_>>(),
                    "eigenvalues": ev.iter().map(pair).collect::<Vec<_>>(),
                }),
            )?;
            art.line(format!(
                "- {} vectors added to a base of {}; {} targets already present",
                inj.vectors.len(),
                inj.base_n,
                inj.noop.len()
            ));
            for v in &inj.vectors {
                art.line(format!(
                    "  - {:.6}{:+.6}i from e_{} and e_{}",
                    v.target.re, v.target.im, v.j, v.k
                ));
            }
            let layers = [
                Layer::Points {
                    points: ev,
                    fill: "#555555".into(),
                    radius: 2.0,
                },
                Layer::Points {
                    points: targets,
                    fill: "#c0392b".into(),
                    radius: 3.0,
                },
            ];
            art.write(
                "inject.svg",
                &emit_svg(&layers, &region_style(rect, "injected eigenvalues")),
            )?;
        }
        ExperimentKind::Enclosure => {
            let e = cfg.enclosure.as_ref().expect("validated");
            let (spec, r) = match e.kind {
                EnclosureKindConfig::Stokes => {
                    let s = EnclosureSpec::stokes(e.essran.clone());
                    let r = stokes_region(&s, rect, nx, ny).map_err(numerical)?;
                    (s, r)
                }
                EnclosureKindConfig::Dirac => {
                    let s = EnclosureSpec::dirac(e.essran.clone());
                    let r = dirac_region(&s, rect, nx, ny, e.phi_grid).map_err(numerical)?;
                    (s, r)
                }
                EnclosureKindConfig::HalfLines => {
                    let s = EnclosureSpec::half_lines(e.essran.clone());
                    let r = s.raster(rect, nx, ny).map_err(numerical)?;
                    (s, r)
                }
            };
            art.json(
                "enclosure.json",
                &serde_json::json!({ "spec": spec.to_json(), "region": r.to_json() }),
            )?;
            art.line(format!("- enclosure: {}", describe_raster(&r)));
            let layers = [raster_layer(&r, "#ffffff")];
            let style = Style {
                background: "#9e9e9e".into(),
                ..region_style(rect, "spectral enclosure")
            };
            art.write("enclosure.svg", &emit_svg(&layers, &style))?;
        }
        ExperimentKind::Figure => {
            let preset = &cfg.figure.as_ref().expect("validated").preset;
            let over = if cfg.region == Default::default() {
                FigureOverride::default()
            } else {
                FigureOverride {
                    rect: Some(rect),
                    res: Some([nx, ny]),
                }
            };
            for (name, svg, note) in figure(preset, over)? {
                art.write(&name, &svg)?;
                art.line(format!("- `{name}`: {note}"));
            }
        }
    }
    let files = art.finish()?;
    match failure {
        Some(f) => Err(CliError::Numerical(f)),
        None => Ok(files),
    }
}

fn tail_estimate(
    cfg: &ExperimentConfig,
    f: &PencilFamily,
    rect: Rect,
    nx: usize,
    ny: usize,
) -> Result<Raster, CliError> {
    let t = cfg.tail.as_ref().ok_or_else(|| CliError::config("tail", "missing"))?;
    let mut opts = TailOptions::new(t.depths.clone(), t.window);
    opts.ratio = t.ratio;
    opts.truncation = cfg
        .truncation
        .iter()
        .rev()
        .find(|s| matches!(s, TruncationSpec::Interval { .. }))
        .copied();
    ess_range_tail(f, rect, nx, ny, &opts).map_err(numerical)
}

/// Symbol curves `k ↦ stokes_symbol(u0, e^{iφ}, k)` for `φ = jπ/6`.
fn symbol_curves(u0: C64) -> Vec<Layer> {
    const COLORS: [&str; 7] = [
        "#1f4e9c", "#2e86c1", "#17a589", "#28b463", "#d4ac0d", "#ca6f1e", "#c0392b",
    ];
    let mut layers = Vec::new();
    for (j, color) in COLORS.iter().enumerate() {
        let gd = C64::from_polar(1.0, j as f64 * PI / 6.0);
        for branch in 0..2 {
            let points = (0..2000)
                .map(|k| stokes_symbol(u0, gd, k as f64 * 0.01)[branch])
                .collect();
            layers.push(Layer::Curve {
                points,
                stroke: (*color).into(),
                closed: false,
            });
        }
    }
    layers
}

/// Box and resolution overrides for figure presets.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FigureOverride {
    pub rect: Option<Rect>,
    pub res: Option<[usize; 2]>,
}

impl FigureOverride {
    fn apply(&self, rect: Rect, res: [usize; 2]) -> (Rect, usize, usize) {
        let [nx, ny] = self.res.unwrap_or(res);
        (self.rect.unwrap_or(rect), nx, ny)
    }
}

/// Named figure presets: `(file name, svg, description)` per figure.
pub fn figure(preset: &str, over: FigureOverride) -> Result<Vec<(String, String, String)>, CliError> {
    let grey = |title: &str, rect: Rect| Style {
        background: "#9e9e9e".into(),
        ..region_style(rect, title)
    };
    match preset {
        "stokes-const" => {
            let u0 = C64::new(-1.0, 1.0);
            let (rect, nx, ny) = over.apply(Rect::symmetric(-6.0, 6.0, 6.0), [400, 400]);
            let spec = EnclosureSpec::stokes(EssRange::points(vec![u0]));
            let r = stokes_region(&spec, rect, nx, ny).map_err(numerical)?;
            let mut layers = vec![raster_layer(&r, "#ffffff")];
            layers.extend(symbol_curves(u0));
            let svg = emit_svg(&layers, &grey("enclosure for U = -1+i", rect));
            Ok(vec![(
                "stokes-const.svg".into(),
                svg,
                format!(
                    "enclosure for U = -1+i with symbol curves for 7 angles; {}",
                    describe_raster(&r)
                ),
            )])
        }
        "stokes-circles" => [1.0, 3.0, 10.0]
            .iter()
            .map(|&radius| {
                let (rect, nx, ny) = over.apply(Rect::symmetric(-1.5 * radius, 1.5 * radius, 1.5 * radius), [301, 301]);
                let spec = EnclosureSpec::stokes(EssRange::Circle {
                    center: C64::new(0.0, 0.0),
                    radius,
                });
                let r = stokes_region(&spec, rect, nx, ny).map_err(numerical)?;
                let hole = r
                    .complement()
                    .points()
                    .iter()
                    .filter(|z| z.norm() < radius / 2.0)
                    .count();
                let circle = (0..=360)
                    .map(|k| C64::from_polar(radius, 2.0 * PI * k as f64 / 360.0))
                    .collect();
                let layers = [
                    raster_layer(&r, "#ffffff"),
                    Layer::Curve {
                        points: circle,
                        stroke: "#c0392b".into(),
                        closed: true,
                    },
                ];
                let svg = emit_svg(&layers, &grey(&format!("enclosure for |U| = {radius}"), rect));
                Ok((
                    format!("stokes-circle-r{radius}.svg"),
                    svg,
                    format!("R = {radius}: {hole} excluded cells within |λ| < R/2"),
                ))
            })
            .collect(),
        other => Err(CliError::config("figure.preset", format!("unknown preset '{other}'"))),
    }
}

/// Writes the figures of a preset into `dir`.
pub fn write_figure(preset: &str, dir: &Path, over: FigureOverride) -> Result<Vec<PathBuf>, CliError> {
    let mut art = Artifacts::new(dir, &format!("figure preset {preset}"))?;
    for (name, svg, note) in figure(preset, over)? {
        art.write(&name, &svg)?;
        art.line(format!("- `{name}`: {note}"));
    }
    art.finish()
}

/// Runs the acceptance suite, printing one line per criterion; returns
/// whether all passed.
pub fn check(mut out: impl std::io::Write) -> bool {
    let outcomes = crate::acceptance::run_all(|o| {
        let _ = writeln!(out, "{o}");
    });
    let passed = outcomes.iter().filter(|o| o.passed).count();
    let mut s = String::new();
    let _ = write!(s, "{passed} of {} criteria passed", outcomes.len());
    let _ = writeln!(out, "{s}");
    passed == outcomes.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(src: &str, dir: &Path) -> ExperimentConfig {
        let mut c = ExperimentConfig::parse(src).unwrap();
        c.out_dir = dir.to_path_buf();
        c
    }

    #[test]
    fn minimal_matrix_range() {
        let dir = tempfile::tempdir().unwrap();
        let c = cfg(
            "kind = \"range\"\n[family]\nkind = \"matrix\"\na = [[\"0\", \"1\"], [\"0\", \"0\"]]\n",
            dir.path(),
        );
        run(&c).unwrap();
        let s: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join("support.json")).unwrap()).unwrap();
        // W of the nilpotent Jordan block is the disc of radius 1/2
        let values = s["values"].as_array().unwrap();
        assert_eq!(s["angles_count"], 720);
        assert!(values.iter().all(|v| (v.as_f64().unwrap() - 0.5).abs() < 1e-9));
        assert!(dir.path().join("range.svg").exists());
        assert!(dir.path().join("summary.md").exists());
    }

    #[test]
    fn outputs_are_deterministic() {
        let src = "kind = \"pencil-range\"\n[family]\nkind = \"matrix\"\na = [[\"1\", \"0\"], [\"0\", \"2+i\"]]\nb = [[\"1\", \"0\"], [\"0\", \"-1\"]]\n[region]\nbox = [-4.0, 4.0, -4.0, 4.0]\nres = [40, 40]\n";
        let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        run(&cfg(src, d1.path())).unwrap();
        run(&cfg(src, d2.path())).unwrap();
        for f in ["pencil_range.json", "pencil_range.svg"] {
            let a = std::fs::read(d1.path().join(f)).unwrap();
            assert_eq!(a, std::fs::read(d2.path().join(f)).unwrap(), "{f}");
        }
    }

    #[test]
    fn circles_preset_opens_a_hole() {
        let figs = figure("stokes-circles", FigureOverride::default()).unwrap();
        assert_eq!(figs.len(), 3);
        assert!(figs[0].2.contains(": 0 excluded"), "{}", figs[0].2);
        assert!(!figs[1].2.contains(": 0 excluded"), "{}", figs[1].2);
        assert!(!figs[2].2.contains(": 0 excluded"), "{}", figs[2].2);
    }

    #[test]
    fn const_preset_draws_fourteen_curves() {
        let over = FigureOverride {
            rect: None,
            res: Some([60, 60]),
        };
        let figs = figure("stokes-const", over).unwrap();
        assert_eq!(figs[0].1.matches("<path").count(), 14);
    }

    #[test]
    fn validation_errors_map_to_exit_two() {
        let e = ExperimentConfig::parse("kind = \"sweep\"\n").unwrap_err();
        assert_eq!(e.exit_code(), EXIT_VALIDATION);
        assert_eq!(CliError::Numerical("x".into()).exit_code(), EXIT_NUMERICAL);
    }
}
