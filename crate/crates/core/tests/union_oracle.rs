//! Union and overlap measures against Monte Carlo counts and the raster
//! engine.

use besicovitch_lab::besicovitch::{build_perron_family, PerronParams};
use besicovitch_lab::geometry::{
    overlap_distribution, union_measure, union_measure_with, Aabb, ConvexPolygon, OrientedRect, UnionEngine, Vec2,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn bounding_box(polys: &[ConvexPolygon]) -> Aabb {
    let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in polys {
        for &v in p.vertices() {
            lo = Vec2::new(lo.x.min(v.x), lo.y.min(v.y));
            hi = Vec2::new(hi.x.max(v.x), hi.y.max(v.y));
        }
    }
    Aabb::new(lo, hi)
}

/// Covering-count histogram from uniform samples in the bounding box.
fn sampled_counts(polys: &[ConvexPolygon], samples: usize, seed: u64) -> (f64, Vec<f64>) {
    let b = bounding_box(polys);
    let area = (b.max.x - b.min.x) * (b.max.y - b.min.y);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hist = vec![0usize; polys.len() + 1];
    for _ in 0..samples {
        let p = Vec2::new(rng.gen_range(b.min.x..b.max.x), rng.gen_range(b.min.y..b.max.y));
        hist[polys.iter().filter(|q| q.contains(p)).count()] += 1;
    }
    (area, hist.iter().map(|&h| h as f64 / samples as f64 * area).collect())
}

#[test]
fn perron_union_matches_sampling() {
    let f = build_perron_family(PerronParams {
        depth: 5,
        ..PerronParams::default()
    })
    .unwrap();
    let polys = f.rect_polygons();
    let exact = union_measure(&polys, 1e-9).unwrap();
    let (area, hist) = sampled_counts(&polys, 2_000_000, 11);
    let mc: f64 = hist[1..].iter().sum();
    let sd = (mc * (area - mc) / 2_000_000.0).sqrt();
    assert!((exact.value - mc).abs() < 5.0 * sd, "{} vs {mc} (sd {sd})", exact.value);
}

#[test]
fn raster_agrees_with_exact() {
    let f = build_perron_family(PerronParams {
        depth: 4,
        ..PerronParams::default()
    })
    .unwrap();
    let polys = f.rect_polygons();
    let exact = union_measure(&polys, 1e-9).unwrap();
    let raster = union_measure_with(&polys, 1e-3, UnionEngine::Raster { max_cells: 1 << 26 }).unwrap();
    assert!((exact.value - raster.value).abs() <= raster.err_bound + exact.err_bound);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn overlap_levels_match_sampling(
        rects in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0, 0.0f64..3.2, 0.2f64..1.5, 0.05f64..0.8), 1..6),
        seed in 0u64..1000,
    ) {
        let polys: Vec<ConvexPolygon> = rects
            .iter()
            .map(|&(x, y, a, l, w)| OrientedRect::new(Vec2::new(x, y), Vec2::from_angle(a), l, w).unwrap().to_polygon())
            .collect();
        let d = overlap_distribution(&polys, 1e-9).unwrap();
        let n = 200_000;
        let (area, hist) = sampled_counts(&polys, n, seed);
        for (m, &mc) in hist.iter().enumerate().skip(1) {
            let exact = d.measures.get(&m).copied().unwrap_or(0.0);
            let sd = (mc.max(exact) * area / n as f64).sqrt() + 1e-12;
            prop_assert!((exact - mc).abs() < 6.0 * sd, "level {}: {} vs {}", m, exact, mc);
        }
        let total: f64 = polys.iter().map(|p| p.area()).sum();
        prop_assert!((d.lp_integral(1.0) - total).abs() < 1e-9 * total.max(1.0));
    }
}
