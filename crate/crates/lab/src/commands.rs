//! Subcommands. Each resolves its flags into a [`RunConfig`], runs the
//! computation and returns the report with its exit status.

use clap::{Parser, Subcommand};
use num_bigint::BigInt;
use num_complex::Complex64;
use serde::Serialize;
use serde_json::Value;
use seshadri_core::degeneration::{trivialization_check, DegenerationPath};
use seshadri_core::interpolation::{
    basis_split, evaluation_surjective, form_count, h0_linear_system, jet_target_dim, select_subbasis_for_blowup,
    PointConfiguration, Surjectivity,
};
use seshadri_core::kahler::{
    fs_expansion, fs_potential, fs_section_sum, glue_potentials, metric_fd, packing_report, perturbed_section_sum,
    GridSpec,
};
use seshadri_core::picard::seshadri_constant_general;
use seshadri_core::Error;

use crate::config::{parse_mults, Flags, RunConfig};
use crate::report::{self, Bounds, Glue, Packing, Trivialization};
use crate::{Envelope, Failure, Status};

pub const DEFAULT_DEGREE_BOUND: i64 = 20;

#[derive(Debug, Parser)]
#[command(name = "seshadri-lab", version, about = "Multipoint Seshadri constants, interpolation and Kähler packings")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bounds on the Seshadri constant of O(1) at k general points of the plane.
    Seshadri(Flags),
    /// Basis split of degree-d forms adapted to fat points.
    Interpolate(Flags),
    /// Rank constancy across the degeneration at one blow-up stage.
    Degenerate(Flags),
    /// Ball packing radii from the Seshadri constant.
    Pack(Flags),
    /// Multinomial expansion of the Fubini–Study potential.
    FsExpand(Flags),
    /// Glue a perturbed potential to the Fubini–Study one and test positivity.
    GlueDemo(Flags),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Seshadri(_) => "seshadri",
            Command::Interpolate(_) => "interpolate",
            Command::Degenerate(_) => "degenerate",
            Command::Pack(_) => "pack",
            Command::FsExpand(_) => "fs-expand",
            Command::GlueDemo(_) => "glue-demo",
        }
    }

    fn flags(&self) -> &Flags {
        match self {
            Command::Seshadri(f)
            | Command::Interpolate(f)
            | Command::Degenerate(f)
            | Command::Pack(f)
            | Command::FsExpand(f)
            | Command::GlueDemo(f) => f,
        }
    }

    fn accepted(&self) -> &'static [&'static str] {
        match self {
            Command::Seshadri(_) => &["k", "degree-bound"],
            Command::Interpolate(_) => &["k", "d", "mults", "seed", "n"],
            Command::Degenerate(_) => &["k", "d", "mults", "stage", "seed", "n"],
            Command::Pack(_) => &["k", "n", "degree-bound"],
            Command::FsExpand(_) => &["m", "n", "tol"],
            Command::GlueDemo(_) => &["m", "n", "grid", "tol", "amplitude"],
        }
    }
}

/// A finished run: rendered report plus exit status.
pub struct Outcome {
    pub config: RunConfig,
    pub report: Vec<u8>,
    pub status: Status,
}

pub fn run(command: &Command) -> Result<Outcome, Failure> {
    let cli = command.flags();
    cli.reject_unused(command.name(), command.accepted())?;
    let flags = match &cli.config {
        Some(path) => cli.clone().over(Flags::from_config_file(path)?),
        None => cli.clone(),
    };
    let mut config = RunConfig::new(command.name(), &flags)?;
    let (result, status) = match command {
        Command::Seshadri(_) => seshadri(&flags, &mut config)?,
        Command::Interpolate(_) => interpolate(&flags, &mut config)?,
        Command::Degenerate(_) => degenerate(&flags, &mut config)?,
        Command::Pack(_) => pack(&flags, &mut config)?,
        Command::FsExpand(_) => fs_expand(&flags, &mut config)?,
        Command::GlueDemo(_) => glue_demo(&flags, &mut config)?,
    };
    let report = Envelope::new(config.clone(), result).render()?;
    Ok(Outcome { config, report, status })
}

fn required<T: Copy>(value: Option<T>, flag: &str) -> Result<T, Failure> {
    value.ok_or_else(|| Failure::Usage(format!("--{flag} is required")))
}

fn to_value(v: impl Serialize) -> Result<Value, Failure> {
    serde_json::to_value(v).map_err(|e| Failure::Io(e.into()))
}

fn seshadri(f: &Flags, config: &mut RunConfig) -> Result<(Value, Status), Failure> {
    let k = required(f.k, "k")?;
    let bound = f.degree_bound.unwrap_or(DEFAULT_DEGREE_BOUND);
    config.k = Some(k);
    config.degree_bound = Some(bound);
    let b = seshadri_constant_general(k, bound)?;
    let status = if b.is_conditional() { Status::BoundsOnly } else { Status::Success };
    Ok((to_value(Bounds::from(&b))?, status))
}

fn pack(f: &Flags, config: &mut RunConfig) -> Result<(Value, Status), Failure> {
    let k = required(f.k, "k")?;
    let n = f.n.unwrap_or(2);
    let bound = f.degree_bound.unwrap_or(DEFAULT_DEGREE_BOUND);
    config.k = Some(k);
    config.n = Some(n);
    config.degree_bound = Some(bound);
    let b = seshadri_constant_general(k, bound)?;
    let conditional = b.is_conditional();
    let dim = u32::try_from(n).map_err(|_| Failure::Usage(format!("--n {n} is too large")))?;
    let r = packing_report(k, b, dim)?;
    let status = if conditional { Status::BoundsOnly } else { Status::Success };
    Ok((to_value(Packing::from(&r))?, status))
}

/// Multiplicities from `--mults`, broadcast or checked against `--k`.
fn resolve_mults(f: &Flags) -> Result<Vec<u32>, Failure> {
    let mults = match (&f.mults, f.k) {
        (Some(s), None) => parse_mults(s)?,
        (Some(s), Some(k)) => {
            let m = parse_mults(s)?;
            match m.len() {
                len if len == k => m,
                1 => vec![m[0]; k],
                len => return Err(Failure::Usage(format!("--mults lists {len} values for --k {k}"))),
            }
        }
        (None, Some(k)) => vec![1; k],
        (None, None) => return Err(Failure::Usage("--mults or --k is required".into())),
    };
    Ok(mults)
}

/// Random points, re-seeded once with `seed + 1` if the draw is degenerate.
fn random_points(n: usize, k: usize, seed: u64) -> Result<(PointConfiguration, u64), Failure> {
    match PointConfiguration::random(n, k, seed) {
        Err(Error::InvalidConfiguration(_)) => {
            let next = seed.wrapping_add(1);
            Ok((PointConfiguration::random(n, k, next)?, next))
        }
        other => Ok((other?, seed)),
    }
}

fn configure_points(f: &Flags, config: &mut RunConfig) -> Result<(u32, Vec<u32>, PointConfiguration), Failure> {
    let d = required(f.d, "d")?;
    let mults = resolve_mults(f)?;
    let n = f.n.unwrap_or(2);
    let (pts, seed) = random_points(n, mults.len(), f.seed.unwrap_or(0))?;
    config.d = Some(d);
    config.k = Some(mults.len());
    config.mults = Some(mults.clone());
    config.n = Some(n);
    config.seed = Some(seed);
    Ok((d, mults, pts))
}

/// `h⁰` of degree-`d` forms vanishing to order `reqs[i]`, skipping zeros.
fn h0(pts: &PointConfiguration, d: u32, reqs: &[u32]) -> Result<usize, Failure> {
    let (kept, reqs): (Vec<_>, Vec<u32>) =
        reqs.iter().enumerate().filter(|p| *p.1 > 0).map(|(i, &m)| (pts.point(i).to_vec(), m)).unzip();
    let sub = PointConfiguration::new(pts.ambient_dim(), kept)?;
    Ok(h0_linear_system(&sub, d, &reqs)?.h0())
}

#[derive(Serialize)]
struct Split {
    b0: usize,
    b: Vec<usize>,
    btilde: Vec<usize>,
    total: usize,
    stage_h0: Vec<usize>,
}

#[derive(Serialize)]
struct InterpolateResult {
    ambient_dim: usize,
    degree: u32,
    mults: Vec<u32>,
    points: Vec<Vec<String>>,
    form_count: usize,
    h0: usize,
    h0_next_order: usize,
    jet_target_dim: usize,
    surjective: bool,
    corank: usize,
    split: Option<Split>,
}

fn interpolate(f: &Flags, config: &mut RunConfig) -> Result<(Value, Status), Failure> {
    let (d, mults, pts) = configure_points(f, config)?;
    let n = pts.ambient_dim();
    let next: Vec<u32> = mults.iter().map(|m| m + 1).collect();
    let corank = match evaluation_surjective(&pts, d, &mults)? {
        Surjectivity::Surjective => 0,
        Surjectivity::Deficient { corank } => corank,
    };
    let split = if corank == 0 {
        let s = basis_split(&pts, d, &mults)?;
        let stage_h0 = (0..=mults.len())
            .map(|i| select_subbasis_for_blowup(&s, i).map(|b| b.len()))
            .collect::<Result<_, _>>()?;
        Some(Split {
            b0: s.b0.len(),
            b: s.b.iter().map(Vec::len).collect(),
            btilde: (0..mults.len()).map(|i| s.btilde_len(i)).collect(),
            total: s.all_forms().len(),
            stage_h0,
        })
    } else {
        None
    };
    let result = InterpolateResult {
        ambient_dim: n,
        degree: d,
        points: report::points(&pts),
        form_count: form_count(n, d),
        h0: h0(&pts, d, &mults)?,
        h0_next_order: h0(&pts, d, &next)?,
        jet_target_dim: jet_target_dim(n, &mults),
        surjective: corank == 0,
        corank,
        split,
        mults,
    };
    let status = if corank == 0 { Status::Success } else { Status::Deficient };
    Ok((to_value(result)?, status))
}

#[derive(Serialize)]
struct DegenerateResult {
    points: Vec<Vec<String>>,
    #[serde(flatten)]
    report: Trivialization,
}

fn degenerate(f: &Flags, config: &mut RunConfig) -> Result<(Value, Status), Failure> {
    let (d, mults, pts) = configure_points(f, config)?;
    let stage = f.stage.unwrap_or(1);
    config.stage = Some(stage);
    if stage == 0 || stage > mults.len() {
        return Err(Failure::Usage(format!("--stage must lie in 1..={}", mults.len())));
    }
    let r = trivialization_check(&pts, d, &mults, stage, &DegenerationPath::standard(mults.len()))?;
    let status = if r.passed() { Status::Success } else { Status::PropertyFailure };
    let result = DegenerateResult {
        points: report::points(&pts),
        report: (&r).into(),
    };
    Ok((to_value(result)?, status))
}

#[derive(Serialize)]
struct Term {
    alpha: Vec<u32>,
    beta: u32,
    coefficient: String,
}

#[derive(Serialize)]
struct FsResult {
    m: u32,
    n: usize,
    term_count: usize,
    coefficient_sum: String,
    expected_sum: String,
    metric_at_origin_error: f64,
    passed: bool,
    terms: Vec<Term>,
}

fn fs_expand(f: &Flags, config: &mut RunConfig) -> Result<(Value, Status), Failure> {
    let m = f.m.unwrap_or(1);
    let n = f.n.unwrap_or(2);
    let tol = f.tol.unwrap_or(1e-8);
    config.m = Some(m);
    config.n = Some(n);
    config.tol = Some(tol);
    if n == 0 {
        return Err(Failure::Usage("--n must be at least 1".into()));
    }
    let exp = fs_expansion(m, n);
    let sum = exp.terms.iter().fold(BigInt::ZERO, |acc, t| acc + &t.c);
    let expected = BigInt::from(n + 1).pow(m);
    let origin = vec![Complex64::new(0.0, 0.0); n];
    let g = metric_fd(|z| fs_potential(m, z), &origin, 1e-4)?;
    let mut err: f64 = 0.0;
    for j in 0..n {
        for k in 0..n {
            let want = if j == k { f64::from(m) } else { 0.0 };
            err = err.max((g.get(j, k) - Complex64::new(want, 0.0)).norm());
        }
    }
    let passed = sum == expected && exp.terms.len() == form_count(n, m) && err <= tol;
    let result = FsResult {
        m,
        n,
        term_count: exp.terms.len(),
        coefficient_sum: sum.to_string(),
        expected_sum: expected.to_string(),
        metric_at_origin_error: err,
        passed,
        terms: exp
            .terms
            .iter()
            .map(|t| Term {
                alpha: t.alpha.clone(),
                beta: t.beta,
                coefficient: t.c.to_string(),
            })
            .collect(),
    };
    let status = if passed { Status::Success } else { Status::PropertyFailure };
    Ok((to_value(result)?, status))
}

#[derive(Serialize)]
struct GlueResult {
    m: u32,
    amplitude: f64,
    grid: GridView,
    tol: f64,
    passed: bool,
    #[serde(flatten)]
    report: Glue,
}

#[derive(Serialize)]
struct GridView {
    n: usize,
    side: usize,
    radius: f64,
    h: f64,
}

fn glue_demo(f: &Flags, config: &mut RunConfig) -> Result<(Value, Status), Failure> {
    let m = f.m.unwrap_or(1);
    let amplitude = f.amplitude.unwrap_or(1e-2);
    let tol = f.tol.unwrap_or(0.0);
    let spec = GridSpec {
        n: f.n.unwrap_or(2),
        side: f.grid.unwrap_or(21),
        ..GridSpec::default()
    };
    config.m = Some(m);
    config.amplitude = Some(amplitude);
    config.tol = Some(tol);
    config.n = Some(spec.n);
    config.grid = Some(spec.side);
    let r = glue_potentials(
        |z| perturbed_section_sum(m, amplitude, z),
        |z| fs_section_sum(m, z),
        1.0,
        2.0,
        &spec,
    )?;
    let passed = r.positive_definite() && r.min_eigenvalue > tol;
    let result = GlueResult {
        m,
        amplitude,
        grid: GridView {
            n: spec.n,
            side: spec.side,
            radius: spec.radius,
            h: spec.h,
        },
        tol,
        passed,
        report: (&r).into(),
    };
    let status = if passed { Status::Success } else { Status::PropertyFailure };
    Ok((to_value(result)?, status))
}
