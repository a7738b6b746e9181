//! Command-line experiments on top of `seshadri-core`: configuration, report
//! types and JSON/CSV output.

pub mod commands;
pub mod config;
pub mod report;

use std::fmt;
use std::io::Write;

use serde::Serialize;
use serde_json::Value;

use config::{Format, RunConfig};

/// Outcome of a command that produced a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success,
    PropertyFailure,
    BoundsOnly,
    Deficient,
}

impl Status {
    pub fn code(self) -> u8 {
        match self {
            Status::Success => 0,
            Status::PropertyFailure => 1,
            Status::BoundsOnly => 2,
            Status::Deficient => 3,
        }
    }
}

pub const USAGE_EXIT: u8 = 64;

/// A command that stopped without a report.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Library(seshadri_core::Error),
    Io(std::io::Error),
}

impl Failure {
    pub fn code(&self) -> u8 {
        use seshadri_core::Error as E;
        match self {
            Failure::Usage(_) => USAGE_EXIT,
            Failure::Library(E::SurjectivityRequired { .. }) => Status::Deficient.code(),
            Failure::Library(
                E::InvariantViolation(_)
                | E::NumericalInstability(_)
                | E::BoundInconsistency(_)
                | E::InvalidConfiguration(_),
            ) => Status::PropertyFailure.code(),
            Failure::Library(_) => USAGE_EXIT,
            Failure::Io(_) => Status::PropertyFailure.code(),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "{m}"),
            Failure::Library(e) => write!(f, "{e}"),
            Failure::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<seshadri_core::Error> for Failure {
    fn from(e: seshadri_core::Error) -> Self {
        Failure::Library(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

/// Every report carries the versions and the effective configuration.
#[derive(Debug, Serialize)]
pub struct Envelope<T> {
    pub tool: &'static str,
    pub tool_version: &'static str,
    pub library_version: &'static str,
    pub config: RunConfig,
    pub result: T,
}

impl<T: Serialize> Envelope<T> {
    pub fn new(config: RunConfig, result: T) -> Self {
        Envelope {
            tool: env!("CARGO_PKG_NAME"),
            tool_version: env!("CARGO_PKG_VERSION"),
            library_version: seshadri_core::VERSION,
            config,
            result,
        }
    }

    pub fn render(&self) -> Result<Vec<u8>, Failure> {
        let value = serde_json::to_value(self).map_err(|e| Failure::Io(e.into()))?;
        match self.config.format {
            Format::Json => {
                let mut out = serde_json::to_vec_pretty(&value).map_err(|e| Failure::Io(e.into()))?;
                out.push(b'\n');
                Ok(out)
            }
            Format::Csv => to_csv(&value),
        }
    }
}

/// Flattens a JSON value into `key,value` rows with dotted paths.
pub fn to_csv(value: &Value) -> Result<Vec<u8>, Failure> {
    let mut rows = Vec::new();
    flatten("", value, &mut rows);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["key", "value"]).map_err(csv_error)?;
    for (k, v) in rows {
        w.write_record([k, v]).map_err(csv_error)?;
    }
    w.into_inner().map_err(|e| Failure::Io(e.into_error()))
}

fn csv_error(e: csv::Error) -> Failure {
    Failure::Io(std::io::Error::other(e))
}

fn flatten(prefix: &str, value: &Value, rows: &mut Vec<(String, String)>) {
    let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match value {
        Value::Object(map) => map.iter().for_each(|(k, v)| flatten(&join(k), v, rows)),
        Value::Array(items) if !items.is_empty() => {
            items.iter().enumerate().for_each(|(i, v)| flatten(&join(&i.to_string()), v, rows))
        }
        Value::Array(_) => rows.push((prefix.to_string(), String::new())),
        Value::Null => rows.push((prefix.to_string(), String::new())),
        Value::String(s) => rows.push((prefix.to_string(), s.clone())),
        other => rows.push((prefix.to_string(), other.to_string())),
    }
}

/// Writes a rendered report to `config.output_path` or standard output.
pub fn emit(config: &RunConfig, bytes: &[u8]) -> Result<(), Failure> {
    match &config.output_path {
        Some(path) => std::fs::write(path, bytes)?,
        None => std::io::stdout().lock().write_all(bytes)?,
    }
    Ok(())
}
