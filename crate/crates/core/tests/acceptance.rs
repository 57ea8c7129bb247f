//! Acceptance suite: one line `criterion N: PASS|FAIL` per criterion; exits
//! nonzero if any fails.

use std::process::Command;
use std::time::Instant;

use besicovitch_lab::besicovitch::{build_perron_family, PerronParams};
use besicovitch_lab::certificates::{
    default_eps_sweep, default_triples, degenerate_certificate, halfspace_type_certificate, identity_certificate,
    main_certificate, perron_certificate, s_l1_certificate, tangency_certificate, CertificateReport, DegenerateOptions,
    ExponentTriple, MainOptions, TangencyOptions,
};
use besicovitch_lab::domains::{direction_field, project_to_boundary, ArcSpec, GammaVec, LevelSetDomain, SliceSpec};
use besicovitch_lab::forms::lambda_tilde_indicator;
use besicovitch_lab::geometry::{union_measure, Aabb, OrientedRect, Vec2};
use besicovitch_lab::Error;

type Outcome = Result<(bool, String), Error>;

fn verdicts_pass(r: &CertificateReport, names: &[&str]) -> (bool, String) {
    let mut ok = true;
    let mut parts = Vec::new();
    for n in names {
        let v = &r.verdicts[*n];
        ok &= v.pass;
        parts.push(format!("{n}={}", v.pass));
    }
    (ok, parts.join(" "))
}

/// `∫_1^3 (1 - |t - 2|) dt / t` from the antiderivatives `t - ln t` and
/// `3 ln t - t`.
fn reach_oracle() -> f64 {
    let up = |t: f64| t - t.ln();
    let down = |t: f64| 3.0 * t.ln() - t;
    (up(2.0) - up(1.0)) + (down(3.0) - down(2.0))
}

fn criterion_1() -> Outcome {
    let oracle = reach_oracle();
    let mut ok = true;
    let mut worst: f64 = 0.0;
    let v = GammaVec::embed(Vec2::new(0.2, -0.1), Vec2::from_angle(1.1) * 0.5);
    let v = v.scale(1.0 / (v.v3 - v.v2).norm());
    let u = v.v3 - v.v2;
    for n in [16usize, 64, 256] {
        let r = OrientedRect::from_start(Vec2::new(0.4, 0.1), u, 1.0, 1.0 / n as f64);
        let q = Aabb::square(Vec2::ZERO, 40.0).to_polygon();
        let got = lambda_tilde_indicator(&q, &r.to_polygon(), &r.translate(u * -2.0).to_polygon(), &v, 1e-9)?;
        let rel = (got * n as f64 - oracle).abs() / oracle;
        worst = worst.max(rel);
        ok &= rel <= 1e-3;
    }
    Ok((
        ok,
        format!("max relative error {worst:.2e} vs ln(27/16)/N over N = 16, 64, 256"),
    ))
}

fn criterion_2() -> Outcome {
    let depths: Vec<u32> = (4..=10).collect();
    let (r, _) = perron_certificate(PerronParams::default(), &depths, 1.6)?;
    let mut ok = r.verdicts["holder_bound"].pass && r.verdicts["families_valid"].pass;
    let sq = r.column("square_function");
    let eps = r.column("eps_meas");
    for (s, e) in sq.iter().zip(&eps) {
        ok &= *s <= e.powf(0.125) + 1e-3;
    }
    // ε recomputed from a fresh family at depth 4.
    let f = build_perron_family(PerronParams {
        depth: 4,
        ..PerronParams::default()
    })?;
    let again = union_measure(&f.rect_polygons(), 1e-3)?;
    ok &= (again.value - eps[0]).abs() <= again.err_bound + 1e-12;
    Ok((
        ok,
        format!(
            "square function {:.4} .. {:.4}, eps {:.4} .. {:.4}",
            sq[0], sq[6], eps[0], eps[6]
        ),
    ))
}

fn main_report() -> Result<CertificateReport, Error> {
    let slice = SliceSpec::new(1, Vec2::ZERO)?;
    let p: ExponentTriple = "4,8/5,8".parse()?;
    let depths: Vec<u32> = (4..=10).collect();
    main_certificate(&LevelSetDomain::ball(), &slice, &p, &depths, &MainOptions::default())
}

fn criterion_3() -> Outcome {
    let r = main_report()?;
    let lhs = r.column("lhs");
    let sq_k = r.column("sq_k");
    let ratio = r.column("certified_ratio");
    let eps = r.column("eps_meas");
    let mut ok = lhs.iter().all(|&x| x >= 0.4);
    ok &= sq_k.iter().all(|&x| (x - 1.0).abs() <= 1e-6);
    ok &= ratio.windows(2).all(|w| w[1] > w[0]);
    ok &= ratio[6] >= 1.08 * ratio[0];
    ok &= eps[6] <= 0.6 * eps[0];
    let (v_ok, v) = verdicts_pass(
        &r,
        &[
            "lhs_lower_bound",
            "reach_norm_unit",
            "ratio_increasing",
            "ratio_growth",
            "eps_decay",
        ],
    );
    Ok((
        ok && v_ok,
        format!(
            "min lhs {:.4}, ratio growth {:.4}, eps(10)/eps(4) {:.4}; {v}",
            lhs.iter().cloned().fold(f64::INFINITY, f64::min),
            ratio[6] / ratio[0],
            eps[6] / eps[0]
        ),
    ))
}

fn criterion_4() -> Outcome {
    let p: ExponentTriple = "4,8,8/5".parse()?;
    let depths: Vec<u32> = (4..=10).collect();
    let r = degenerate_certificate(2.0, &p, &depths, &DegenerateOptions::default())?;
    let area = r.column("max_triangle_area");
    let win = r.column("min_window_times_n");
    let oracle = (2.5f64 / 1.5).ln();
    let mut ok = area.iter().all(|&a| a <= 1e-10);
    ok &= win.iter().all(|&w| (w - oracle).abs() <= 1e-3 * oracle);
    let (v_ok, v) = verdicts_pass(
        &r,
        &[
            "triangle_collinear",
            "q_families_disjoint",
            "window_oracle",
            "lhs_above_window",
        ],
    );
    Ok((
        ok && v_ok,
        format!(
            "max triangle area {:.1e}; {v}",
            area.iter().cloned().fold(0.0, f64::max)
        ),
    ))
}

fn criterion_5() -> Outcome {
    let p: ExponentTriple = "4/3,4/3,-2".parse()?;
    let v = GammaVec::embed(Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0));
    let eps = default_eps_sweep();
    let r = halfspace_type_certificate(&v, &p, &eps)?;
    let form = r.fits["form_slope"];
    let norm = r.fits["norm_slope"];
    let ratio = r.column("certified_ratio");
    let mut ok = (0.85..=1.15).contains(&form) && (norm - 1.5).abs() <= 1e-9;
    for k in 0..ratio.len() - 2 {
        ok &= ((ratio[k + 2] / ratio[k]) / 2.0 - 1.0).abs() <= 0.05;
    }
    let (v_ok, v) = verdicts_pass(&r, &["form_slope", "norm_slope", "ratio_law"]);
    Ok((ok && v_ok, format!("form slope {form:.5}, norm slope {norm:.12}; {v}")))
}

fn criterion_6() -> Outcome {
    let v = GammaVec::embed(Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0));
    let r = s_l1_certificate(&v, 2.0, &default_eps_sweep())?;
    let ratio = r.column("certified_ratio");
    let x = r.column("log_inv_eps");
    let mut ok = ratio.windows(2).all(|w| w[1] > w[0]) && ratio[ratio.len() - 1] >= 1.5 * ratio[0];
    // Least squares by normal equations, independent of the report's fit.
    let n = x.len() as f64;
    let (sx, sy) = (x.iter().sum::<f64>(), ratio.iter().sum::<f64>());
    let sxx: f64 = x.iter().map(|a| a * a).sum();
    let sxy: f64 = x.iter().zip(&ratio).map(|(a, b)| a * b).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let icpt = (sy - slope * sx) / n;
    let resid = x
        .iter()
        .zip(&ratio)
        .map(|(a, b)| ((slope * a + icpt) - b).abs() / b)
        .fold(0.0, f64::max);
    ok &= slope > 0.0 && resid < 0.05;
    let (v_ok, v) = verdicts_pass(&r, &["ratio_increasing", "growth", "affine_in_log"]);
    Ok((
        ok && v_ok,
        format!(
            "growth {:.3}, slope {slope:.4}, residual {resid:.2e}; {v}",
            ratio[ratio.len() - 1] / ratio[0]
        ),
    ))
}

fn criterion_7() -> Outcome {
    let v = GammaVec::embed(Vec2::new(1.0, 0.3), Vec2::new(-0.2, 0.8));
    let r = identity_certificate(&default_triples(), &v, 0.125)?;
    let res = r.column("residual");
    let half = r.column("residual_half_spacing");
    let ok = res.len() == 3 && res.iter().all(|&x| x <= 5e-2) && half.iter().zip(&res).all(|(h, x)| h < x);
    let (v_ok, v) = verdicts_pass(&r, &["residual_small", "residual_decreases"]);
    let fmt = |xs: &[f64]| xs.iter().map(|x| format!("{x:.2e}")).collect::<Vec<_>>().join(", ");
    Ok((
        ok && v_ok,
        format!("residuals [{}] -> [{}] at half spacing; {v}", fmt(&res), fmt(&half)),
    ))
}

fn criterion_8() -> Outcome {
    let rs = [4.0, 8.0, 16.0, 32.0];
    let opts = TangencyOptions {
        samples: 10_000_000,
        seed: 0x5eed,
    };
    let ball = LevelSetDomain::ball();
    let x0 = [0.5; 4];
    let r = tangency_certificate(&ball, &x0, &rs, &opts)?;
    let m = r.column("measure");
    let slope = r.fits["loglog_slope"];
    let mut ok = m.windows(2).all(|w| w[1] < w[0]) && (slope + 1.0).abs() <= 0.3;
    let hs: LevelSetDomain = "halfspace:1,2,-1,0.5,0.3".parse()?;
    let y0 = project_to_boundary(&hs, &[0.5; 4])?;
    let h = tangency_certificate(&hs, &y0, &rs, &opts)?;
    let hm = h.column("measure");
    ok &= hm.iter().all(|&x| x == 0.0);
    Ok((
        ok,
        format!("ball measures {m:.4?}, slope {slope:.3}; half-space {hm:?}"),
    ))
}

fn criterion_9() -> Outcome {
    let flat = LevelSetDomain::paraboloid_d1();
    let cases = [
        (1, Vec2::new(0.3, -0.2), Vec2::new(0.5, 0.24)),
        (2, Vec2::new(1.0, 0.0), Vec2::new(0.0, 0.7)),
        (3, Vec2::new(0.2, 0.1), Vec2::new(0.4, 0.0)),
    ];
    let mut ok = true;
    for (j0, fp, seed) in cases {
        let arc = ArcSpec {
            seed,
            range: (-0.2, 0.2),
            count: 16,
        };
        ok &= matches!(
            direction_field(&flat, &SliceSpec::new(j0, fp)?, &arc),
            Err(Error::ZeroCurvature(_))
        );
    }
    let ball = LevelSetDomain::ball();
    for j0 in 1..=3 {
        let arc = ArcSpec {
            seed: Vec2::new(0.0, 0.9),
            range: (-0.3, 0.3),
            count: 16,
        };
        let f = direction_field(&ball, &SliceSpec::new(j0, Vec2::new(0.3, 0.0))?, &arc)?;
        let a: Vec<f64> = f.samples.iter().map(|s| s.w.angle()).collect();
        ok &= a.windows(2).all(|w| w[1] > w[0]) || a.windows(2).all(|w| w[1] < w[0]);
    }
    Ok((
        ok,
        "paraboloid-d1 refused on slices 1, 2, 3; ball4 monotone on slices 1, 2, 3".into(),
    ))
}

fn criterion_10() -> Outcome {
    let dir = tempfile::tempdir()?;
    let mut bytes = Vec::new();
    for threads in ["1", "8"] {
        let out = dir.path().join(format!("t{threads}"));
        let status = Command::new(env!("CARGO_BIN_EXE_besicovitch-lab"))
            .args([
                "certify-main",
                "--domain",
                "ball4",
                "--slice",
                "1",
                "--p",
                "4,8/5,8",
                "--depths",
                "4..10",
                "--out",
            ])
            .arg(&out)
            .env("BESICOVITCH_LAB_THREADS", threads)
            .output()?;
        if !status.status.success() {
            return Ok((false, format!("{threads} threads: exit {:?}", status.status.code())));
        }
        bytes.push(std::fs::read(out.join("report.json"))?);
    }
    let same = bytes[0] == bytes[1];
    Ok((
        same,
        format!("report.json {} bytes, identical = {same}", bytes[0].len()),
    ))
}

fn main() {
    let criteria: [fn() -> Outcome; 10] = [
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
        criterion_8,
        criterion_9,
        criterion_10,
    ];
    let mut failed = 0;
    for (k, c) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (pass, detail) = match c() {
            Ok(x) => x,
            Err(e) => (false, format!("error: {e}")),
        };
        failed += usize::from(!pass);
        println!(
            "criterion {}: {} ({:.1} s) {detail}",
            k + 1,
            if pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} of 10 criteria pass", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
