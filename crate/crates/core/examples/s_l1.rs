//! L1 norm of S_w(χ_R, χ_R) against ‖χ_R‖_p ‖χ_R‖_p' = ε for thin rectangles
//! parallel to w1 - w2.

use besicovitch_lab::certificates::{default_eps_sweep, s_l1_certificate};
use besicovitch_lab::domains::GammaVec;
use besicovitch_lab::geometry::Vec2;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let v = GammaVec::embed(Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0));
    let r = s_l1_certificate(&v, 2.0, &default_eps_sweep())?;
    println!("       eps          L1      ratio");
    for row in &r.rows {
        println!(
            "{:>10.6} {:>12.6e} {:>9.4}",
            row["eps"], row["l1_norm"], row["certified_ratio"]
        );
    }
    println!("fits: {:?}", r.fits);
    for (name, v) in &r.verdicts {
        println!("{name:<16} {}  {}", if v.pass { "pass" } else { "FAIL" }, v.detail);
    }
    Ok(())
}
