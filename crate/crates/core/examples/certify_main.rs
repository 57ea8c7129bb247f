//! Main certificate on the unit ball, slice j0 = 1, exponents (4, 8/5, 8).

use besicovitch_lab::certificates::{main_certificate, ExponentTriple, MainOptions};
use besicovitch_lab::domains::{LevelSetDomain, SliceSpec};
use besicovitch_lab::geometry::Vec2;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let deepest: u32 = std::env::args().nth(1).map_or(Ok(10), |s| s.parse())?;
    let depths: Vec<u32> = (4..=deepest).collect();
    let p: ExponentTriple = "4,8/5,8".parse()?;
    let slice = SliceSpec::new(1, Vec2::ZERO)?;
    let t = std::time::Instant::now();
    let r = main_certificate(&LevelSetDomain::ball(), &slice, &p, &depths, &MainOptions::default())?;
    println!("depth      eps       lhs      sq_i      sq_k     ratio");
    for row in &r.rows {
        println!(
            "{:>5} {:>8.5} {:>9.6} {:>9.6} {:>9.6} {:>9.6}",
            row["depth"], row["eps_meas"], row["lhs"], row["sq_i"], row["sq_k"], row["certified_ratio"]
        );
    }
    for (name, v) in &r.verdicts {
        println!("{:<18} {}  {}", name, if v.pass { "pass" } else { "FAIL" }, v.detail);
    }
    println!("({:.2?})", t.elapsed());
    Ok(())
}
