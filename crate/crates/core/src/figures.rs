//! Deterministic SVG renderings of families, configuration triangles and
//! report sweeps.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::besicovitch::BesicovitchFamily;
use crate::certificates::CertificateReport;
use crate::domains::{configuration_triangle, GammaVec};
use crate::error::{Error, Result};
use crate::geometry::{Aabb, OrientedRect, Vec2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FigureKind {
    /// Rectangles and their reaches.
    Family,
    /// Vertices `-v_j` and edge vectors of a Gamma vector.
    Triangle,
    /// A report column against the sweep parameter.
    Sweep,
}

impl FigureKind {
    fn name(self) -> &'static str {
        match self {
            FigureKind::Family => "family",
            FigureKind::Triangle => "triangle",
            FigureKind::Sweep => "sweep",
        }
    }
}

impl std::str::FromStr for FigureKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "family" => Ok(FigureKind::Family),
            "triangle" => Ok(FigureKind::Triangle),
            "sweep" => Ok(FigureKind::Sweep),
            _ => Err(Error::InvalidInput(format!("unknown figure kind {s:?}"))),
        }
    }
}

pub enum FigureInput<'a> {
    Family(&'a BesicovitchFamily),
    Gamma(&'a GammaVec),
    Report(&'a CertificateReport),
}

impl FigureInput<'_> {
    fn name(&self) -> &'static str {
        match self {
            FigureInput::Family(_) => "family",
            FigureInput::Gamma(_) => "gamma vector",
            FigureInput::Report(_) => "report",
        }
    }
}

pub fn emit_figure(input: FigureInput<'_>, kind: FigureKind) -> Result<String> {
    match (&input, kind) {
        (FigureInput::Family(f), FigureKind::Family) => Ok(family_svg(f)),
        (FigureInput::Gamma(v), FigureKind::Triangle) => Ok(triangle_svg(v)),
        (FigureInput::Report(r), FigureKind::Sweep) => sweep_svg(r),
        _ => Err(Error::UnsupportedFigure {
            kind: kind.name(),
            input: input.name(),
        }),
    }
}

const SIZE: f64 = 600.0;
const MARGIN: f64 = 40.0;

/// Maps a world box onto the canvas with `y` up.
struct View {
    min: Vec2,
    scale: f64,
    height: f64,
}

impl View {
    fn new(b: Aabb) -> View {
        let w = b.width().max(b.height()).max(1e-12);
        let scale = (SIZE - 2.0 * MARGIN) / w;
        View {
            min: b.min,
            scale,
            height: SIZE,
        }
    }

    fn map(&self, p: Vec2) -> (f64, f64) {
        (
            MARGIN + (p.x - self.min.x) * self.scale,
            self.height - MARGIN - (p.y - self.min.y) * self.scale,
        )
    }
}

fn header(out: &mut String) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(out, r#"<rect width="{SIZE}" height="{SIZE}" fill="white"/>"#);
}

fn polygon(out: &mut String, view: &View, r: &OrientedRect, fill: &str) {
    let pts: Vec<String> = r
        .corners()
        .iter()
        .map(|&c| {
            let (x, y) = view.map(c);
            format!("{x:.3},{y:.3}")
        })
        .collect();
    let _ = writeln!(
        out,
        r#"<polygon points="{}" fill="{fill}" fill-opacity="0.45" stroke="{fill}" stroke-width="0.3"/>"#,
        pts.join(" ")
    );
}

fn family_svg(f: &BesicovitchFamily) -> String {
    let all = f.rects.iter().chain(&f.reaches).map(|r| r.aabb());
    let b = all.reduce(Aabb::union).unwrap_or(Aabb::square(Vec2::ZERO, 1.0));
    let view = View::new(b);
    let mut out = String::new();
    header(&mut out);
    let _ = writeln!(out, r#"<g id="rects">"#);
    for r in &f.rects {
        polygon(&mut out, &view, r, "#1f77b4");
    }
    let _ = writeln!(out, "</g>\n<g id=\"reaches\">");
    for r in &f.reaches {
        polygon(&mut out, &view, r, "#ff7f0e");
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(
        out,
        r#"<text x="10" y="20" font-size="13">N = {}, eps = {:.5}</text>"#,
        f.len(),
        f.achieved_eps.value
    );
    out.push_str("</svg>\n");
    out
}

fn label(out: &mut String, (x, y): (f64, f64), text: &str) {
    let _ = writeln!(
        out,
        r#"<text x="{x:.3}" y="{y:.3}" font-size="13" text-anchor="middle">{text}</text>"#
    );
}

fn triangle_svg(v: &GammaVec) -> String {
    let t = configuration_triangle(v);
    let b = Aabb::of_points(t.vertices.iter().copied().chain([Vec2::ZERO]))
        .expect("three vertices")
        .expand(0.25 * v.max_component().max(1e-12));
    let view = View::new(b);
    let mut out = String::new();
    header(&mut out);
    let names = ["-v1", "-v2", "-v3"];
    let edge_names = ["v1 - v2", "v2 - v3", "v3 - v1"];
    let ends = [(1, 0), (2, 1), (0, 2)];
    if t.degenerate {
        // Collinear vertices: the common line, then each edge offset to its own side.
        let dir = (t.vertices.iter().map(|p| *p - t.vertices[0]))
            .max_by(|a, b| a.norm().total_cmp(&b.norm()))
            .and_then(|d| d.normalized())
            .unwrap_or(Vec2::new(1.0, 0.0));
        let reach = b.diameter();
        let (x1, y1) = view.map(t.vertices[0] - dir * reach);
        let (x2, y2) = view.map(t.vertices[0] + dir * reach);
        let _ = writeln!(
            out,
            r##"<line x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}" stroke="#999" stroke-dasharray="4 3"/>"##
        );
        let normal = dir.perp();
        for (e, &(a, c)) in ends.iter().enumerate() {
            let off = normal * ((e as f64 + 1.0) * 0.06 * reach);
            arrow(&mut out, &view, t.vertices[c] + off, t.vertices[a] + off);
            label(
                &mut out,
                view.map((t.vertices[a] + t.vertices[c]) * 0.5 + off * 1.4),
                edge_names[e],
            );
        }
    } else {
        let pts: Vec<String> = t
            .vertices
            .iter()
            .map(|&p| {
                let (x, y) = view.map(p);
                format!("{x:.3},{y:.3}")
            })
            .collect();
        let _ = writeln!(
            out,
            r##"<polygon points="{}" fill="#dde8f4" stroke="none"/>"##,
            pts.join(" ")
        );
        let centroid = (t.vertices[0] + t.vertices[1] + t.vertices[2]) * (1.0 / 3.0);
        for (e, &(a, c)) in ends.iter().enumerate() {
            arrow(&mut out, &view, t.vertices[c], t.vertices[a]);
            let mid = (t.vertices[a] + t.vertices[c]) * 0.5;
            label(&mut out, view.map(mid + (mid - centroid) * 0.25), edge_names[e]);
        }
    }
    for (p, name) in t.vertices.iter().zip(names) {
        let (x, y) = view.map(*p);
        let _ = writeln!(out, r#"<circle cx="{x:.3}" cy="{y:.3}" r="4" fill="black"/>"#);
        label(&mut out, (x, y - 9.0), name);
    }
    let _ = writeln!(
        out,
        r#"<text x="10" y="20" font-size="13">area = {:.3e}{}</text>"#,
        t.area,
        if t.degenerate { " (collinear)" } else { "" }
    );
    out.push_str("</svg>\n");
    out
}

/// Edge vector drawn from `from` to `to`.
fn arrow(out: &mut String, view: &View, from: Vec2, to: Vec2) {
    let (x1, y1) = view.map(from);
    let (x2, y2) = view.map(to);
    let _ = writeln!(
        out,
        r#"<line x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}" stroke="black" stroke-width="1.5"/>"#
    );
    let d = Vec2::new(x2 - x1, y2 - y1).normalized().unwrap_or(Vec2::new(1.0, 0.0));
    let n = d.perp();
    let tip = Vec2::new(x2, y2);
    let a = tip - d * 10.0 + n * 4.0;
    let b = tip - d * 10.0 - n * 4.0;
    let _ = writeln!(
        out,
        r#"<polygon points="{:.3},{:.3} {:.3},{:.3} {:.3},{:.3}" fill="black"/>"#,
        tip.x, tip.y, a.x, a.y, b.x, b.y
    );
}

/// The certified ratio (or the second column) against the first column,
/// on log-log axes when every value is positive.
fn sweep_svg(r: &CertificateReport) -> Result<String> {
    let xname = r.columns.first().ok_or(Error::UnsupportedFigure {
        kind: "sweep",
        input: "empty report",
    })?;
    let yname = if r.columns.iter().any(|c| c == "certified_ratio") {
        "certified_ratio"
    } else {
        r.columns.get(1).ok_or(Error::UnsupportedFigure {
            kind: "sweep",
            input: "single-column report",
        })?
    };
    let xs = r.column(xname);
    let ys = r.column(yname);
    let log = xs.iter().chain(&ys).all(|v| *v > 0.0);
    let tr = |v: f64| if log { v.log10() } else { v };
    let pts: Vec<Vec2> = xs.iter().zip(&ys).map(|(x, y)| Vec2::new(tr(*x), tr(*y))).collect();
    let b = Aabb::of_points(pts.iter().copied()).unwrap_or(Aabb::square(Vec2::ZERO, 1.0));
    let pad = Vec2::new(b.width().max(1e-9) * 0.05, b.height().max(1e-9) * 0.05);
    let b = Aabb::new(b.min - pad, b.max + pad);
    // Separate axis scales: stretch each axis to the canvas.
    let sx = (SIZE - 2.0 * MARGIN) / b.width();
    let sy = (SIZE - 2.0 * MARGIN) / b.height();
    let map = |p: Vec2| (MARGIN + (p.x - b.min.x) * sx, SIZE - MARGIN - (p.y - b.min.y) * sy);
    let mut out = String::new();
    header(&mut out);
    let _ = writeln!(
        out,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{w}" height="{w}" fill="none" stroke="black"/>"#,
        w = SIZE - 2.0 * MARGIN
    );
    let line: Vec<String> = pts
        .iter()
        .map(|&p| {
            let (x, y) = map(p);
            format!("{x:.3},{y:.3}")
        })
        .collect();
    let _ = writeln!(
        out,
        r##"<polyline points="{}" fill="none" stroke="#1f77b4" stroke-width="2"/>"##,
        line.join(" ")
    );
    for &p in &pts {
        let (x, y) = map(p);
        let _ = writeln!(out, r##"<circle cx="{x:.3}" cy="{y:.3}" r="3.5" fill="#1f77b4"/>"##);
    }
    let scale = if log { "log10 " } else { "" };
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-size="13" text-anchor="middle">{scale}{xname}</text>"#,
        SIZE / 2.0,
        SIZE - 10.0
    );
    let _ = writeln!(
        out,
        r#"<text x="14" y="{}" font-size="13" text-anchor="middle" transform="rotate(-90 14 {})">{scale}{yname}</text>"#,
        SIZE / 2.0,
        SIZE / 2.0
    );
    let _ = writeln!(out, r#"<text x="10" y="20" font-size="13">{}</text>"#, r.experiment);
    out.push_str("</svg>\n");
    Ok(out)
}
