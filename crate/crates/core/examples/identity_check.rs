//! Checks Λ̃ = -iπ(2Λ_P - Λ₀) on Gaussian inputs at two grid spacings.

use besicovitch_lab::domains::GammaVec;
use besicovitch_lab::forms::{identity_parts, FrequencyGrid, GaussianTriple};
use besicovitch_lab::geometry::Vec2;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let v = GammaVec::embed(Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0));
    let triple = GaussianTriple {
        centers: [Vec2::new(0.1, -0.2), Vec2::new(-0.3, 0.1), Vec2::new(0.2, 0.25)],
        freqs: [Vec2::new(0.4, 0.1), Vec2::new(-0.2, 0.3), Vec2::new(-0.1, -0.5)],
    };
    for h in [0.25, 0.125, 0.0625] {
        let t = std::time::Instant::now();
        let p = identity_parts(&triple, &v, &FrequencyGrid::new(h))?;
        println!(
            "h = {h:<7} residual {:.3e}  Λ̃ = {:.6}  Λ_P = {:.6}  Λ₀ = {:.6}  ({:.2?})",
            p.residual,
            p.lambda_tilde,
            p.lambda_half,
            p.lambda_zero,
            t.elapsed()
        );
    }
    Ok(())
}
