//! Library side of the `fracstab` binary: argument handling, parameter
//! ingestion and artifact writers.

pub mod cli;
mod commands;
pub mod output;

use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::Parser;
use fracstab_core::mlmodel::MLParams;

pub use cli::Cli;

/// Environment variable naming a default parameter file.
pub const PARAMS_ENV: &str = "FRACSTAB_PARAMS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 1;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_DIVERGED: i32 = 3;
pub const EXIT_FIXTURE: i32 = 4;

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments, parameter file or override.
    Parse(String),
    /// The requested computation has no answer for these inputs.
    Domain(String),
    /// The simulation left the divergence bound.
    Diverged(String),
    /// `verify` found a mismatch.
    Fixture(String),
    Io(String),
}

impl CliError {
    pub fn io(path: &Path, e: impl fmt::Display) -> Self {
        CliError::Io(format!("{}: {e}", path.display()))
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Io(_) => EXIT_PARSE,
            CliError::Domain(_) => EXIT_DOMAIN,
            CliError::Diverged(_) => EXIT_DIVERGED,
            CliError::Fixture(_) => EXIT_FIXTURE,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Parse(m) => write!(f, "parse error: {m}"),
            CliError::Domain(m) => write!(f, "domain error: {m}"),
            CliError::Diverged(m) => write!(f, "diverged: {m}"),
            CliError::Fixture(m) => write!(f, "fixture mismatch: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<fracstab_core::Error> for CliError {
    fn from(e: fracstab_core::Error) -> Self {
        match e {
            fracstab_core::Error::Parse(m) => CliError::Parse(m),
            other => CliError::Domain(other.to_string()),
        }
    }
}

/// Effective parameters and where they came from.
#[derive(Debug, Clone)]
pub struct LoadedParams {
    pub params: MLParams,
    pub source: String,
}

/// Defaults, then the parameter file (`--params`, else `$FRACSTAB_PARAMS`),
/// then `--set` overrides in order.
pub fn load_params(path: Option<&Path>, env_path: Option<PathBuf>, overrides: &[String]) -> Result<LoadedParams, CliError> {
    let file = path.map(Path::to_path_buf).or(env_path);
    let (mut params, source) = match &file {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| CliError::Parse(format!("{}: {e}", p.display())))?;
            let params = MLParams::parse(&text).map_err(|e| CliError::Parse(format!("{}: {e}", p.display())))?;
            (params, p.display().to_string())
        }
        None => (MLParams::default(), "defaults".to_string()),
    };
    for o in overrides {
        let (key, value) = o
            .split_once('=')
            .ok_or_else(|| CliError::Parse(format!("override `{o}` is not KEY=VALUE")))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| CliError::Parse(format!("override `{o}`: bad number")))?;
        params
            .set(key.trim(), value)
            .map_err(|e| CliError::Parse(format!("override `{o}`: {e}")))?;
    }
    params.validate().map_err(|e| CliError::Parse(e.to_string()))?;
    Ok(LoadedParams { params, source })
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn run_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_PARSE,
            };
        }
    };
    match commands::run(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("fracstab: {e}");
            e.exit_code()
        }
    }
}

/// `lo:hi` with `lo < hi`.
pub fn parse_range(s: &str) -> Result<(f64, f64), CliError> {
    let bad = || CliError::Parse(format!("range `{s}` is not LO:HI"));
    let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    if !(lo < hi) {
        return Err(CliError::Parse(format!("range `{s}` needs LO < HI")));
    }
    Ok((lo, hi))
}

/// Duration in ms: `250ms`, `2s`, or a bare number of ms.
pub fn parse_duration_ms(s: &str) -> Result<f64, CliError> {
    let t = s.trim();
    let (num, scale) = if let Some(v) = t.strip_suffix("ms") {
        (v, 1.0)
    } else if let Some(v) = t.strip_suffix('s') {
        (v, 1000.0)
    } else {
        (t, 1.0)
    };
    let v: f64 = num
        .trim()
        .parse()
        .map_err(|_| CliError::Parse(format!("bad duration `{s}`")))?;
    if !(v > 0.0) || !v.is_finite() {
        return Err(CliError::Parse(format!("duration `{s}` must be positive")));
    }
    Ok(v * scale)
}
