//! Run configuration: command-line flags layered over a flat `key=value` file.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::Serialize;

use crate::Failure;

pub const THREADS_VAR: &str = "SESHADRI_LAB_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Flags shared by every subcommand. Unset flags fall back to the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Number of points.
    #[arg(long)]
    pub k: Option<usize>,
    /// Degree of the forms.
    #[arg(long)]
    pub d: Option<u32>,
    /// Comma-separated multiplicities, e.g. `2,1`; `""` for no points.
    #[arg(long, allow_hyphen_values = true)]
    pub mults: Option<String>,
    /// Blow-up stage (1-based).
    #[arg(long)]
    pub stage: Option<usize>,
    /// Largest curve degree searched for obstructions.
    #[arg(long)]
    pub degree_bound: Option<i64>,
    /// Seed for random point configurations.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Samples per axis of the gluing grid.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Numerical tolerance of the floating-point checks.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Flat `key=value` file supplying defaults for the flags above.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Power of the hyperplane bundle.
    #[arg(long)]
    pub m: Option<u32>,
    /// Dimension of the ambient projective space.
    #[arg(long)]
    pub n: Option<usize>,
    /// Amplitude of the potential perturbation.
    #[arg(long)]
    pub amplitude: Option<f64>,
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, Failure> {
    value
        .trim()
        .parse()
        .map_err(|_| Failure::Usage(format!("invalid value {value:?} for {key}")))
}

impl Flags {
    /// Parses a config file: one `key = value` per line, `#` starts a comment.
    /// Keys are flag names with either `-` or `_`.
    pub fn from_config_text(text: &str) -> Result<Self, Failure> {
        let mut f = Flags::default();
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Failure::Usage(format!("config line {}: expected key=value", no + 1)))?;
            let key = key.trim().replace('_', "-");
            let value = value.trim();
            match key.as_str() {
                "k" => f.k = Some(parse(&key, value)?),
                "d" => f.d = Some(parse(&key, value)?),
                "mults" => f.mults = Some(value.trim_matches('"').to_string()),
                "stage" => f.stage = Some(parse(&key, value)?),
                "degree-bound" => f.degree_bound = Some(parse(&key, value)?),
                "seed" => f.seed = Some(parse(&key, value)?),
                "grid" => f.grid = Some(parse(&key, value)?),
                "tol" => f.tol = Some(parse(&key, value)?),
                "out" => f.out = Some(PathBuf::from(value)),
                "format" => {
                    f.format = Some(Format::from_str(value, true).map_err(|_| {
                        Failure::Usage(format!("invalid value {value:?} for format"))
                    })?)
                }
                "m" => f.m = Some(parse(&key, value)?),
                "n" => f.n = Some(parse(&key, value)?),
                "amplitude" => f.amplitude = Some(parse(&key, value)?),
                _ => return Err(Failure::Usage(format!("config line {}: unknown key {key:?}", no + 1))),
            }
        }
        Ok(f)
    }

    pub fn from_config_file(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_config_text(&text)
    }

    /// Flags set here win; the rest come from `file`.
    pub fn over(self, file: Flags) -> Flags {
        Flags {
            k: self.k.or(file.k),
            d: self.d.or(file.d),
            mults: self.mults.or(file.mults),
            stage: self.stage.or(file.stage),
            degree_bound: self.degree_bound.or(file.degree_bound),
            seed: self.seed.or(file.seed),
            grid: self.grid.or(file.grid),
            tol: self.tol.or(file.tol),
            out: self.out.or(file.out),
            format: self.format.or(file.format),
            config: self.config,
            m: self.m.or(file.m),
            n: self.n.or(file.n),
            amplitude: self.amplitude.or(file.amplitude),
        }
    }

    /// Names of the flags that are set, for rejecting ones a command ignores.
    fn set_keys(&self) -> Vec<&'static str> {
        let pairs = [
            ("k", self.k.is_some()),
            ("d", self.d.is_some()),
            ("mults", self.mults.is_some()),
            ("stage", self.stage.is_some()),
            ("degree-bound", self.degree_bound.is_some()),
            ("seed", self.seed.is_some()),
            ("grid", self.grid.is_some()),
            ("tol", self.tol.is_some()),
            ("m", self.m.is_some()),
            ("n", self.n.is_some()),
            ("amplitude", self.amplitude.is_some()),
        ];
        pairs.iter().filter(|p| p.1).map(|p| p.0).collect()
    }

    pub fn reject_unused(&self, command: &str, used: &[&str]) -> Result<(), Failure> {
        match self.set_keys().into_iter().find(|k| !used.contains(k)) {
            Some(k) => Err(Failure::Usage(format!("--{k} does not apply to {command}"))),
            None => Ok(()),
        }
    }
}

pub fn parse_mults(s: &str) -> Result<Vec<u32>, Failure> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|v| parse("mults", v)).collect()
}

/// The configuration a run actually used, with defaults filled in.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mults: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stage: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree_bound: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
    pub output_path: Option<String>,
    pub format: Format,
    /// Value of `SESHADRI_LAB_THREADS`; the computations are sequential.
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn new(command: &str, flags: &Flags) -> Result<Self, Failure> {
        let threads = match std::env::var(THREADS_VAR) {
            Ok(v) => Some(parse(THREADS_VAR, &v)?),
            Err(_) => None,
        };
        Ok(RunConfig {
            command: command.to_string(),
            output_path: flags.out.as_ref().map(|p| p.display().to_string()),
            format: flags.format.unwrap_or_default(),
            threads,
            ..RunConfig::default()
        })
    }
}
