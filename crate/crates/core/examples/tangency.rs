//! Blow-ups of the unit ball at a boundary point converge to the tangent
//! half-space; the symmetric difference in the unit ball decays like 1/r.

use besicovitch_lab::certificates::{tangency_certificate, TangencyOptions};
use besicovitch_lab::domains::{project_to_boundary, LevelSetDomain};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let samples: u64 = std::env::args().nth(1).map_or(Ok(10_000_000), |s| s.parse())?;
    let opts = TangencyOptions {
        samples,
        ..TangencyOptions::default()
    };
    for domain in [LevelSetDomain::ball(), "halfspace:1,2,-1,0.5,0.3".parse()?] {
        let x0 = project_to_boundary(&domain, &[0.5; 4])?;
        let t = std::time::Instant::now();
        let r = tangency_certificate(&domain, &x0, &[4.0, 8.0, 16.0, 32.0], &opts)?;
        println!("{}", domain.name);
        for row in &r.rows {
            println!(
                "  r = {:>4}  measure {:.6} +- {:.6}",
                row["r"], row["measure"], row["std_err"]
            );
        }
        println!("  fits {:?}", r.fits);
        for (name, v) in &r.verdicts {
            println!("  {name:<15} {}  {}", if v.pass { "pass" } else { "FAIL" }, v.detail);
        }
        println!("  ({:.2?})", t.elapsed());
    }
    Ok(())
}
