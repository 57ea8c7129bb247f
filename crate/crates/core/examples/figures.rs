//! Writes a Perron family, two configuration triangles and a sweep plot to
//! a directory (default `figures/`).

use besicovitch_lab::besicovitch::{build_perron_family, PerronParams};
use besicovitch_lab::certificates::{default_eps_sweep, s_l1_certificate};
use besicovitch_lab::domains::GammaVec;
use besicovitch_lab::figures::{emit_figure, FigureInput, FigureKind};
use besicovitch_lab::geometry::Vec2;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "figures".into());
    std::fs::create_dir_all(&dir)?;
    let save = |name: &str, svg: String| -> std::io::Result<()> {
        println!("{dir}/{name}: {} bytes", svg.len());
        std::fs::write(format!("{dir}/{name}"), svg)
    };

    let family = build_perron_family(PerronParams {
        depth: 5,
        ..PerronParams::default()
    })?;
    save(
        "family.svg",
        emit_figure(FigureInput::Family(&family), FigureKind::Family)?,
    )?;

    let strong = GammaVec::embed(Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0));
    save(
        "triangle.svg",
        emit_figure(FigureInput::Gamma(&strong), FigureKind::Triangle)?,
    )?;
    let d = Vec2::new(0.6, 0.8);
    let collinear = GammaVec {
        v1: d,
        v2: d * 2.0,
        v3: d * -3.0,
    };
    save(
        "triangle_degenerate.svg",
        emit_figure(FigureInput::Gamma(&collinear), FigureKind::Triangle)?,
    )?;

    let report = s_l1_certificate(&strong, 2.0, &default_eps_sweep())?;
    save(
        "sweep.svg",
        emit_figure(FigureInput::Report(&report), FigureKind::Sweep)?,
    )?;
    Ok(())
}
