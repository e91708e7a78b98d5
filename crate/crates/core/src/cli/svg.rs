//! Deterministic SVG output for complex-plane figures.

use std::fmt::Write;

use crate::matkernel::C64;
use crate::region::{Raster, Rect};

#[derive(Debug, Clone)]
pub enum Layer {
    /// Filled cells of a raster, merged into horizontal runs.
    Raster { raster: Raster, fill: String },
    Curve {
        points: Vec<C64>,
        stroke: String,
        closed: bool,
    },
    Points {
        points: Vec<C64>,
        fill: String,
        radius: f64,
    },
}

#[derive(Debug, Clone)]
pub struct Style {
    /// Visible part of the plane; defaults to the first raster's box.
    pub frame: Option<Rect>,
    pub width: u32,
    pub height: u32,
    pub background: String,
    pub axes: bool,
    pub title: Option<String>,
}

impl Default for Style {
    fn default() -> Self {
        Self {
            frame: None,
            width: 600,
            height: 600,
            background: "#ffffff".into(),
            axes: true,
            title: None,
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Renders the layers in order over the background. Coordinates carry six
/// decimals, so equal inputs give byte-identical documents.
pub fn emit_svg(layers: &[Layer], style: &Style) -> String {
    let frame = style
        .frame
        .or_else(|| {
            layers.iter().find_map(|l| match l {
                Layer::Raster { raster, .. } => Some(raster.rect()),
                _ => None,
            })
        })
        .unwrap_or_else(|| Rect::symmetric(-1.0, 1.0, 1.0));
    let (w, h) = (style.width as f64, style.height as f64);
    let sx = |re: f64| (re - frame.re_min) / frame.width() * w;
    let sy = |im: f64| (frame.im_max - im) / frame.height() * h;

    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        style.width, style.height, style.width, style.height
    );
    if let Some(t) = &style.title {
        let _ = writeln!(out, "<title>{}</title>", escape(t));
    }
    let _ = writeln!(
        out,
        r#"<rect x="0" y="0" width="{}" height="{}" fill="{}"/>"#,
        style.width,
        style.height,
        escape(&style.background)
    );
    for layer in layers {
        match layer {
            Layer::Raster { raster, fill } => {
                let _ = writeln!(out, r#"<g fill="{}" stroke="none">"#, escape(fill));
                let (nx, ny) = raster.resolution();
                let (dx, dy) = raster.cell_size();
                let r = raster.rect();
                for iy in 0..ny {
                    let mut ix = 0;
                    while ix < nx {
                        if !raster.get(ix, iy) {
                            ix += 1;
                            continue;
                        }
                        let start = ix;
                        while ix < nx && raster.get(ix, iy) {
                            ix += 1;
                        }
                        let (x0, x1) = (sx(r.re_min + start as f64 * dx), sx(r.re_min + ix as f64 * dx));
                        let (y1, y0) = (sy(r.im_min + iy as f64 * dy), sy(r.im_min + (iy + 1) as f64 * dy));
                        let _ = writeln!(
                            out,
                            r#"<rect x="{x0:.6}" y="{y0:.6}" width="{:.6}" height="{:.6}"/>"#,
                            x1 - x0,
                            y1 - y0
                        );
                    }
                }
                let _ = writeln!(out, "</g>");
            }
            Layer::Curve { points, stroke, closed } => {
                if points.is_empty() {
                    continue;
                }
                let mut d = String::new();
                for (k, z) in points.iter().enumerate() {
                    let _ = write!(d, "{}{:.6},{:.6}", if k == 0 { "M" } else { " L" }, sx(z.re), sy(z.im));
                }
                if *closed {
                    d.push_str(" Z");
                }
                let _ = writeln!(
                    out,
                    r#"<path d="{d}" fill="none" stroke="{}" stroke-width="1.000000"/>"#,
                    escape(stroke)
                );
            }
            Layer::Points { points, fill, radius } => {
                let _ = writeln!(out, r#"<g fill="{}" stroke="none">"#, escape(fill));
                for z in points {
                    let _ = writeln!(
                        out,
                        r#"<circle cx="{:.6}" cy="{:.6}" r="{radius:.6}"/>"#,
                        sx(z.re),
                        sy(z.im)
                    );
                }
                let _ = writeln!(out, "</g>");
            }
        }
    }
    if style.axes {
        let _ = writeln!(out, r##"<g stroke="#000000" stroke-width="0.500000">"##);
        if frame.im_min <= 0.0 && 0.0 <= frame.im_max {
            let _ = writeln!(
                out,
                r#"<line x1="0.000000" y1="{y:.6}" x2="{w:.6}" y2="{y:.6}"/>"#,
                y = sy(0.0)
            );
        }
        if frame.re_min <= 0.0 && 0.0 <= frame.re_max {
            let _ = writeln!(
                out,
                r#"<line x1="{x:.6}" y1="0.000000" x2="{x:.6}" y2="{h:.6}"/>"#,
                x = sx(0.0)
            );
        }
        let _ = writeln!(out, "</g>");
    }
    out.push_str("</svg>\n");
    out
}
