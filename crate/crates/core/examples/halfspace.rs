//! Half-space type certificate for p = (4/3, 4/3, -2): |Λ̃| ~ ε against a norm
//! product ~ ε^{3/2}.

use besicovitch_lab::certificates::{default_eps_sweep, halfspace_type_certificate, ExponentTriple};
use besicovitch_lab::domains::GammaVec;
use besicovitch_lab::geometry::Vec2;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let v = GammaVec::embed(Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0));
    let p: ExponentTriple = "4/3,4/3,-2".parse()?;
    let r = halfspace_type_certificate(&v, &p, &default_eps_sweep())?;
    println!("       eps     |lambda|   norm product    ratio");
    for row in &r.rows {
        println!(
            "{:>10.6} {:>12.6e} {:>12.6e} {:>10.5}",
            row["eps"], row["lambda_abs"], row["norm_product"], row["certified_ratio"]
        );
    }
    println!("fits: {:?}", r.fits);
    for (name, v) in &r.verdicts {
        println!("{name:<12} {}  {}", if v.pass { "pass" } else { "FAIL" }, v.detail);
    }
    Ok(())
}
