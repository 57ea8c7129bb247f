//! Flat slices are refused before any family is built; the ball's slices
//! pass with a monotone direction field.

use besicovitch_lab::domains::{direction_field, ArcSpec, LevelSetDomain, SliceSpec};
use besicovitch_lab::geometry::Vec2;
use besicovitch_lab::Error;

fn main() -> Result<(), Error> {
    let flat = LevelSetDomain::paraboloid_d1();
    let cases = [
        (1, Vec2::new(0.3, -0.2), Vec2::new(0.5, 0.24)),
        (2, Vec2::new(1.0, 0.0), Vec2::new(0.0, 0.7)),
        (3, Vec2::new(0.2, 0.1), Vec2::new(0.4, 0.0)),
    ];
    for (j0, fp, seed) in cases {
        let slice = SliceSpec::new(j0, fp)?;
        let arc = ArcSpec {
            seed,
            range: (-0.2, 0.2),
            count: 16,
        };
        match direction_field(&flat, &slice, &arc) {
            Err(e @ Error::ZeroCurvature(_)) => println!("paraboloid-d1 j0={j0}: refused ({e})"),
            other => println!("paraboloid-d1 j0={j0}: unexpected {other:?}"),
        }
    }

    let ball = LevelSetDomain::ball();
    for j0 in 1..=3 {
        let slice = SliceSpec::new(j0, Vec2::new(0.3, 0.0))?;
        let arc = ArcSpec {
            seed: Vec2::new(0.0, 0.9),
            range: (-0.3, 0.3),
            count: 16,
        };
        let field = direction_field(&ball, &slice, &arc)?;
        let angles: Vec<f64> = field.samples.iter().map(|s| s.w.angle()).collect();
        let monotone = angles.windows(2).all(|w| w[1] > w[0]) || angles.windows(2).all(|w| w[1] < w[0]);
        println!(
            "ball4 j0={j0}: w angles {:.4} .. {:.4}, monotone = {monotone}, A* radius {:.4}",
            angles[0],
            angles[angles.len() - 1],
            field.a_star.radius
        );
    }
    Ok(())
}
