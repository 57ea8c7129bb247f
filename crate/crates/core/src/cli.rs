//! Command-line front end: config parsing, dispatch, report and figure
//! persistence.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::besicovitch::{BesicovitchFamily, FamilyDocument, PerronParams};
use crate::certificates::{
    default_eps_sweep, default_triples, degenerate_certificate, halfspace_type_certificate, identity_certificate,
    main_certificate, perron_certificate, s_l1_certificate, tangency_certificate, CertificateReport, DegenerateOptions,
    ExponentTriple, MainOptions, TangencyOptions,
};
use crate::domains::{project_to_boundary, GammaVec, LevelSetDomain, SliceSpec, R4};
use crate::error::{Error, Result};
use crate::figures::{emit_figure, FigureInput, FigureKind};
use crate::geometry::Vec2;

pub const THREADS_ENV: &str = "BESICOVITCH_LAB_THREADS";

/// Everything an experiment reads. Loaded from a JSON file, then overridden
/// by flags; unset fields take the experiment's defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: Option<String>,
    pub domain: Option<String>,
    pub slice: Option<usize>,
    pub fixed_point: Option<[f64; 2]>,
    /// A triple such as `"4,8/5,8"`, or a single exponent for `s-l1`.
    pub p: Option<String>,
    /// `"4..10"` or a list `"4,6,8"`.
    pub depths: Option<String>,
    /// `"2^-3..2^-8"` or a list.
    pub eps: Option<String>,
    pub r: Option<String>,
    pub lambda: Option<f64>,
    /// `v1, v2` as four numbers; `v3 = -v1 - v2`.
    pub v: Option<[f64; 4]>,
    pub point: Option<[f64; 4]>,
    pub samples: Option<u64>,
    pub spacing: Option<f64>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub kind: Option<String>,
    pub input: Option<PathBuf>,
}

#[derive(Debug, Parser)]
#[command(
    name = "besicovitch-lab",
    version,
    about = "Divergence certificates for trilinear multipliers with curved symbols"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// JSON config file; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Perron-tree Besicovitch families: small union, disjoint reaches, and
    /// the Hölder bound on the square function.
    Perron {
        #[command(flatten)]
        common: Common,
        /// Perron depths, e.g. "4..10".
        #[arg(long)]
        depths: Option<String>,
        /// Square-function exponent in (1, 2).
        #[arg(long)]
        p: Option<String>,
    },
    /// Main theorem: Perron rectangles aimed by a curved boundary slice,
    /// tested against their reaches and a large square.
    CertifyMain {
        #[command(flatten)]
        common: Common,
        /// ball4, paraboloid-d1, cylinder-disc, ellipsoid4:a1,a2,a3,a4 or halfspace:a1,a2,a3,a4,c.
        #[arg(long)]
        domain: Option<String>,
        /// Index j0 of the fixed Gamma component.
        #[arg(long)]
        slice: Option<usize>,
        /// Fixed value of that component, "x,y".
        #[arg(long)]
        fixed_point: Option<String>,
        /// Exponent triple, e.g. "4,8/5,8".
        #[arg(long, allow_hyphen_values = true)]
        p: Option<String>,
        /// Perron depths, e.g. "4..10".
        #[arg(long)]
        depths: Option<String>,
    },
    /// Degenerate normals (v, λv, -(1+λ)v): collinear configuration triangles
    /// with reach-type inputs for both remaining indices.
    CertifyDegenerate {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<f64>,
        /// Exponent triple, e.g. "4,8/5,8".
        #[arg(long, allow_hyphen_values = true)]
        p: Option<String>,
        /// Perron depths, e.g. "4..10".
        #[arg(long)]
        depths: Option<String>,
    },
    /// Half-space type exponents (some p_i <= -1): a thin rectangle, its
    /// reach and a cube in the strip intersection.
    Halfspace {
        #[command(flatten)]
        common: Common,
        /// Exponent triple, e.g. "4,8/5,8".
        #[arg(long, allow_hyphen_values = true)]
        p: Option<String>,
        /// Rectangle widths, e.g. "2^-3..2^-8".
        #[arg(long, allow_hyphen_values = true)]
        eps: Option<String>,
        /// "v1x,v1y,v2x,v2y".
        #[arg(long, allow_hyphen_values = true)]
        v: Option<String>,
    },
    /// The bilinear operator S_w is unbounded from L^p x L^p' to L^1.
    #[command(name = "s-l1")]
    SL1 {
        #[command(flatten)]
        common: Common,
        /// Exponent p in (1, inf); the second input sits in L^p'.
        #[arg(long)]
        p: Option<String>,
        /// Rectangle widths, e.g. "2^-3..2^-8".
        #[arg(long, allow_hyphen_values = true)]
        eps: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        v: Option<String>,
    },
    /// The sliding form as a linear combination of the half-space and
    /// pointwise forms, on Gaussian inputs.
    Identity {
        #[command(flatten)]
        common: Common,
        /// Frequency grid spacing; the check also runs at half of it.
        #[arg(long)]
        spacing: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        v: Option<String>,
    },
    /// Blow-ups of a domain at a boundary point converge to the tangent
    /// half-space.
    Tangency {
        #[command(flatten)]
        common: Common,
        /// ball4, paraboloid-d1, cylinder-disc, ellipsoid4:a1,a2,a3,a4 or halfspace:a1,a2,a3,a4,c.
        #[arg(long)]
        domain: Option<String>,
        /// Start point "x1,x2,x3,x4", projected onto the boundary.
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
        /// Blow-up factors, e.g. "4,8,16,32".
        #[arg(long)]
        r: Option<String>,
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Render a family, a configuration triangle or a report sweep as SVG.
    Plot {
        #[command(flatten)]
        common: Common,
        /// family, triangle or sweep.
        #[arg(long)]
        kind: Option<String>,
        /// family.json or report.json.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, allow_hyphen_values = true)]
        v: Option<String>,
        /// Depth of a freshly built family when no input is given.
        #[arg(long)]
        depths: Option<String>,
    },
}

fn cfg_err(field: &str, e: impl std::fmt::Display) -> Error {
    Error::Config {
        field: field.to_string(),
        message: e.to_string(),
    }
}

fn numbers<const N: usize>(field: &str, s: &str) -> Result<[f64; N]> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| cfg_err(field, e))?;
    v.try_into()
        .map_err(|_| cfg_err(field, format!("expected {N} comma-separated numbers")))
}

impl Command {
    /// Loads the config file (if any) and applies the flags on top.
    pub fn to_config(&self) -> Result<RunConfig> {
        let common = match self {
            Command::Perron { common, .. }
            | Command::CertifyMain { common, .. }
            | Command::CertifyDegenerate { common, .. }
            | Command::Halfspace { common, .. }
            | Command::SL1 { common, .. }
            | Command::Identity { common, .. }
            | Command::Tangency { common, .. }
            | Command::Plot { common, .. } => common,
        };
        let mut c = match &common.config {
            Some(path) => load_config(path)?,
            None => RunConfig::default(),
        };
        let set = |slot: &mut Option<String>, v: &Option<String>| {
            if v.is_some() {
                *slot = v.clone();
            }
        };
        if common.out.is_some() {
            c.out = common.out.clone();
        }
        let name = match self {
            Command::Perron { depths, p, .. } => {
                set(&mut c.depths, depths);
                set(&mut c.p, p);
                "perron"
            }
            Command::CertifyMain {
                domain,
                slice,
                fixed_point,
                p,
                depths,
                ..
            } => {
                set(&mut c.domain, domain);
                c.slice = slice.or(c.slice);
                if let Some(fp) = fixed_point {
                    c.fixed_point = Some(numbers::<2>("fixed_point", fp)?);
                }
                set(&mut c.p, p);
                set(&mut c.depths, depths);
                "certify-main"
            }
            Command::CertifyDegenerate { lambda, p, depths, .. } => {
                c.lambda = lambda.or(c.lambda);
                set(&mut c.p, p);
                set(&mut c.depths, depths);
                "certify-degenerate"
            }
            Command::Halfspace { p, eps, v, .. } | Command::SL1 { p, eps, v, .. } => {
                set(&mut c.p, p);
                set(&mut c.eps, eps);
                if let Some(v) = v {
                    c.v = Some(numbers::<4>("v", v)?);
                }
                if matches!(self, Command::Halfspace { .. }) {
                    "halfspace"
                } else {
                    "s-l1"
                }
            }
            Command::Identity { spacing, v, .. } => {
                c.spacing = spacing.or(c.spacing);
                if let Some(v) = v {
                    c.v = Some(numbers::<4>("v", v)?);
                }
                "identity"
            }
            Command::Tangency {
                domain,
                point,
                r,
                samples,
                seed,
                ..
            } => {
                set(&mut c.domain, domain);
                if let Some(p) = point {
                    c.point = Some(numbers::<4>("point", p)?);
                }
                set(&mut c.r, r);
                c.samples = samples.or(c.samples);
                c.seed = seed.or(c.seed);
                "tangency"
            }
            Command::Plot {
                kind, input, v, depths, ..
            } => {
                set(&mut c.kind, kind);
                if input.is_some() {
                    c.input = input.clone();
                }
                if let Some(v) = v {
                    c.v = Some(numbers::<4>("v", v)?);
                }
                set(&mut c.depths, depths);
                "plot"
            }
        };
        if let Some(e) = &c.experiment {
            if e != name {
                return Err(cfg_err(
                    "experiment",
                    format!("config names {e:?} but the subcommand is {name:?}"),
                ));
            }
        }
        c.experiment = Some(name.to_string());
        Ok(c)
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| cfg_err("config", format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| cfg_err("config", e))
}

/// `"4..10"` (inclusive), `"4,6,8"` or `"6"`.
pub fn parse_depths(s: &str) -> Result<Vec<u32>> {
    let int = |t: &str| {
        t.trim()
            .parse::<u32>()
            .map_err(|e| cfg_err("depths", format!("{t:?}: {e}")))
    };
    let out: Vec<u32> = match s.split_once("..") {
        Some((a, b)) => {
            let (a, b) = (int(a)?, int(b.trim_start_matches('='))?);
            if a > b {
                return Err(cfg_err("depths", format!("empty range {s}")));
            }
            (a..=b).collect()
        }
        None => s.split(',').map(int).collect::<Result<_>>()?,
    };
    if out.is_empty() {
        return Err(cfg_err("depths", "no depths"));
    }
    Ok(out)
}

fn parse_scalar(field: &str, t: &str) -> Result<f64> {
    let t = t.trim();
    let v = match t.split_once('^') {
        Some((b, e)) => {
            let b: f64 = b.trim().parse().map_err(|e| cfg_err(field, format!("{t:?}: {e}")))?;
            let e: f64 = e.trim().parse().map_err(|e| cfg_err(field, format!("{t:?}: {e}")))?;
            b.powf(e)
        }
        None => t.parse().map_err(|e| cfg_err(field, format!("{t:?}: {e}")))?,
    };
    if !v.is_finite() {
        return Err(cfg_err(field, format!("{t:?} is not finite")));
    }
    Ok(v)
}

/// `"2^-3..2^-8"` (unit steps in the exponent, either direction) or a list
/// such as `"0.125,0.0625"`.
pub fn parse_sweep(field: &str, s: &str) -> Result<Vec<f64>> {
    if let Some((a, b)) = s.split_once("..") {
        let exp = |t: &str| -> Result<(f64, i32)> {
            let (base, e) = t
                .trim()
                .split_once('^')
                .ok_or_else(|| cfg_err(field, format!("range end {t:?} must look like 2^-3")))?;
            let base: f64 = base.trim().parse().map_err(|e| cfg_err(field, e))?;
            let e: i32 = e.trim().parse().map_err(|e| cfg_err(field, e))?;
            Ok((base, e))
        };
        let ((b1, e1), (b2, e2)) = (exp(a)?, exp(b)?);
        if b1 != b2 || !(b1 > 0.0) {
            return Err(cfg_err(field, "range ends need the same positive base"));
        }
        let step = if e2 >= e1 { 1 } else { -1 };
        let mut out = Vec::new();
        let mut e = e1;
        loop {
            out.push(b1.powi(e));
            if e == e2 {
                break;
            }
            e += step;
        }
        return Ok(out);
    }
    s.split(',').map(|t| parse_scalar(field, t)).collect()
}

fn gamma_from(field: &str, v: Option<[f64; 4]>) -> Result<GammaVec> {
    let v = v.unwrap_or([1.0, 0.0, 0.0, 1.0]);
    GammaVec::new(
        Vec2::new(v[0], v[1]),
        Vec2::new(v[2], v[3]),
        Vec2::new(-v[0] - v[2], -v[1] - v[3]),
    )
    .map_err(|e| cfg_err(field, e))
}

fn triple(c: &RunConfig, default: &str) -> Result<ExponentTriple> {
    c.p.as_deref().unwrap_or(default).parse().map_err(|e| cfg_err("p", e))
}

fn domain(c: &RunConfig) -> Result<LevelSetDomain> {
    c.domain
        .as_deref()
        .unwrap_or("ball4")
        .parse()
        .map_err(|e| cfg_err("domain", e))
}

fn write(dir: &Path, name: &str, text: &str) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(name), text)?;
    Ok(())
}

fn sweep_figure(dir: &Path, r: &CertificateReport) -> Result<()> {
    write(
        dir,
        "sweep.svg",
        &emit_figure(FigureInput::Report(r), FigureKind::Sweep)?,
    )
}

/// Runs the configured experiment and writes its outputs. `plot` writes
/// only its figure and returns no report.
pub fn run(config: &RunConfig) -> Result<Option<CertificateReport>> {
    let out = config.out.clone().unwrap_or_else(|| PathBuf::from("out"));
    let experiment = config
        .experiment
        .as_deref()
        .ok_or_else(|| cfg_err("experiment", "missing"))?;
    let depths = |default: &str| parse_depths(config.depths.as_deref().unwrap_or(default));
    let eps = || match &config.eps {
        Some(s) => parse_sweep("eps", s),
        None => Ok(default_eps_sweep()),
    };
    let report = match experiment {
        "perron" => {
            let p = parse_scalar("p", config.p.as_deref().unwrap_or("1.6"))?;
            let (report, family) = perron_certificate(PerronParams::default(), &depths("4..10")?, p)?;
            write(
                &out,
                "family.json",
                &(serde_json::to_string(&family.document()).map_err(|e| cfg_err("out", e))? + "\n"),
            )?;
            write(
                &out,
                "family.svg",
                &emit_figure(FigureInput::Family(&family), FigureKind::Family)?,
            )?;
            report
        }
        "certify-main" => {
            let fp = config.fixed_point.unwrap_or([0.0, 0.0]);
            let slice =
                SliceSpec::new(config.slice.unwrap_or(1), Vec2::new(fp[0], fp[1])).map_err(|e| cfg_err("slice", e))?;
            let mut opts = MainOptions::default();
            if let Some(t) = config.tol {
                opts.tol = t;
            }
            main_certificate(
                &domain(config)?,
                &slice,
                &triple(config, "4,8/5,8")?,
                &depths("4..10")?,
                &opts,
            )?
        }
        "certify-degenerate" => {
            let lambda = config.lambda.unwrap_or(2.0);
            let mut opts = DegenerateOptions::default();
            if let Some(t) = config.tol {
                opts.tol = t;
            }
            let r = degenerate_certificate(lambda, &triple(config, "4,8,8/5")?, &depths("4..10")?, &opts)?;
            let d = Vec2::new(1.0, 0.0);
            let v = GammaVec {
                v1: d,
                v2: d * lambda,
                v3: d * -(1.0 + lambda),
            };
            write(
                &out,
                "triangle.svg",
                &emit_figure(FigureInput::Gamma(&v), FigureKind::Triangle)?,
            )?;
            r
        }
        "halfspace" => {
            let v = gamma_from("v", config.v)?;
            let r = halfspace_type_certificate(&v, &triple(config, "4/3,4/3,-2")?, &eps()?)?;
            write(
                &out,
                "triangle.svg",
                &emit_figure(FigureInput::Gamma(&v), FigureKind::Triangle)?,
            )?;
            r
        }
        "s-l1" => {
            let v = gamma_from("v", config.v)?;
            let p = parse_scalar("p", config.p.as_deref().unwrap_or("2"))?;
            s_l1_certificate(&v, p, &eps()?)?
        }
        "identity" => {
            let v = gamma_from("v", config.v)?;
            identity_certificate(&default_triples(), &v, config.spacing.unwrap_or(0.125))?
        }
        "tangency" => {
            let d = domain(config)?;
            let start: R4 = config.point.unwrap_or([0.5; 4]);
            let x0 = project_to_boundary(&d, &start).map_err(|e| cfg_err("point", e))?;
            let rs = match &config.r {
                Some(s) => parse_sweep("r", s)?,
                None => vec![4.0, 8.0, 16.0, 32.0],
            };
            let defaults = TangencyOptions::default();
            let opts = TangencyOptions {
                samples: config.samples.unwrap_or(defaults.samples),
                seed: config.seed.unwrap_or(defaults.seed),
            };
            tangency_certificate(&d, &x0, &rs, &opts)?
        }
        "plot" => {
            plot(config, &out)?;
            return Ok(None);
        }
        other => return Err(cfg_err("experiment", format!("unknown experiment {other:?}"))),
    };
    report.write(&out)?;
    sweep_figure(&out, &report)?;
    Ok(Some(report))
}

fn plot(config: &RunConfig, out: &Path) -> Result<()> {
    let kind: FigureKind = config
        .kind
        .as_deref()
        .unwrap_or("family")
        .parse()
        .map_err(|e| cfg_err("kind", e))?;
    let svg = match &config.input {
        Some(path) => {
            let text =
                std::fs::read_to_string(path).map_err(|e| cfg_err("input", format!("{}: {e}", path.display())))?;
            let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| cfg_err("input", e))?;
            if value.get("experiment").is_some() {
                let r: CertificateReport = serde_json::from_value(value).map_err(|e| cfg_err("input", e))?;
                emit_figure(FigureInput::Report(&r), kind)?
            } else if value.get("family").is_some() {
                let d: FamilyDocument = serde_json::from_value(value).map_err(|e| cfg_err("input", e))?;
                emit_figure(FigureInput::Family(&d.family), kind)?
            } else {
                let f: BesicovitchFamily = serde_json::from_value(value).map_err(|e| cfg_err("input", e))?;
                emit_figure(FigureInput::Family(&f), kind)?
            }
        }
        None if kind == FigureKind::Triangle => {
            let v = gamma_from("v", config.v)?;
            emit_figure(FigureInput::Gamma(&v), kind)?
        }
        None => {
            let depth = *parse_depths(config.depths.as_deref().unwrap_or("6"))?
                .last()
                .expect("nonempty");
            let f = crate::besicovitch::build_perron_family(PerronParams {
                depth,
                ..PerronParams::default()
            })?;
            emit_figure(FigureInput::Family(&f), kind)?
        }
    };
    let name = match kind {
        FigureKind::Family => "family.svg",
        FigureKind::Triangle => "triangle.svg",
        FigureKind::Sweep => "sweep.svg",
    };
    write(out, name, &svg)
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| cfg_err(THREADS_ENV, format!("{v:?} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| cfg_err(THREADS_ENV, e))
}

fn summary(r: &CertificateReport) {
    println!("{}: {} rows", r.experiment, r.rows.len());
    for (name, v) in &r.fits {
        println!("  fit {name} = {v}");
    }
    for (name, v) in &r.verdicts {
        println!("  {} {name}: {}", if v.pass { "pass" } else { "FAIL" }, v.detail);
    }
}

/// Parses arguments, runs, and returns the exit status: 0 when every verdict
/// passes, 2 on a failed verdict, 1 on an error.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let result = configure_threads()
        .and_then(|_| cli.command.to_config())
        .and_then(|c| run(&c));
    match result {
        Ok(Some(report)) => {
            summary(&report);
            if report.all_pass() {
                0
            } else {
                2
            }
        }
        Ok(None) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
