//! Run configuration and command execution behind the `alcove` binary.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use alcove::{Error, Family, RootSystem, Weight};
use serde::{Deserialize, Serialize};

mod commands;

pub use commands::execute;

/// Output encoding of a report.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Fusion,
    Kernel,
    Spectrum,
    Measure,
    Count,
    Asymptotics,
    Simulate,
    Convolve,
    Fit,
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Fusion => "fusion",
            Command::Kernel => "kernel",
            Command::Spectrum => "spectrum",
            Command::Measure => "measure",
            Command::Count => "count",
            Command::Asymptotics => "asymptotics",
            Command::Simulate => "simulate",
            Command::Convolve => "convolve",
            Command::Fit => "fit",
            Command::Verify => "verify",
        }
    }
}

/// Every parameter a command may read. Fields absent from both the config
/// file and the command line fall back to per-command defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub family: Option<Family>,
    pub rank: Option<usize>,
    pub level: Option<i64>,
    pub gamma: Option<Weight>,
    pub lambda: Option<Weight>,
    pub beta: Option<Weight>,
    pub xi: Option<Weight>,
    pub n: Option<u64>,
    pub t: Option<f64>,
    pub seed: Option<u64>,
    pub tolerance: Option<f64>,
    pub bins: Option<usize>,
    pub sigmas: Option<Vec<Weight>>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
}

impl RunConfig {
    pub fn from_json(s: &str) -> Result<Self, Error> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn load(path: &Path) -> Result<Self, Error> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    /// Fields set in `flags` override those of `self`.
    pub fn overridden_by(self, flags: RunConfig) -> RunConfig {
        RunConfig {
            family: flags.family.or(self.family),
            rank: flags.rank.or(self.rank),
            level: flags.level.or(self.level),
            gamma: flags.gamma.or(self.gamma),
            lambda: flags.lambda.or(self.lambda),
            beta: flags.beta.or(self.beta),
            xi: flags.xi.or(self.xi),
            n: flags.n.or(self.n),
            t: flags.t.or(self.t),
            seed: flags.seed.or(self.seed),
            tolerance: flags.tolerance.or(self.tolerance),
            bins: flags.bins.or(self.bins),
            sigmas: flags.sigmas.or(self.sigmas),
            output: flags.output.or(self.output),
            format: flags.format.or(self.format),
        }
    }

    pub fn root_system(&self) -> Result<RootSystem, CliError> {
        let family = self.family.ok_or(CliError::Missing("family"))?;
        let rank = self.rank.ok_or(CliError::Missing("rank"))?;
        Ok(RootSystem::new(family, rank)?)
    }

    pub fn level(&self) -> Result<i64, CliError> {
        self.level.ok_or(CliError::Missing("level"))
    }

    pub fn gamma(&self) -> Result<&Weight, CliError> {
        self.gamma.as_ref().ok_or(CliError::Missing("gamma"))
    }
}

/// Failure of a command, carrying its process exit code.
#[derive(Debug)]
pub enum CliError {
    Missing(&'static str),
    Core(Error),
    /// A verification tolerance was not met.
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Missing(_) => 2,
            CliError::Core(Error::BoundExceeded { .. }) => 3,
            CliError::Core(Error::Consistency(_)) | CliError::Failed(_) => 4,
            CliError::Core(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Missing(what) => write!(f, "missing parameter `{what}` (pass --{what} or set it in the config file)"),
            CliError::Core(e) => e.fmt(f),
            CliError::Failed(msg) => write!(f, "verification failed: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Core(e.into())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Core(e.into())
    }
}

/// A rendered report and the file extension it should be stored under.
#[derive(Debug)]
pub struct Report {
    pub body: String,
    pub extension: &'static str,
    /// Set when the report records a failed check.
    pub failure: Option<String>,
}

/// Where a report goes: `output` (relative paths resolve against
/// `out_dir`), else `out_dir/<command>.<ext>`, else standard output.
pub fn destination(command: Command, cfg: &RunConfig, out_dir: Option<&Path>, extension: &str) -> Option<PathBuf> {
    match (&cfg.output, out_dir) {
        (Some(p), Some(dir)) if p.is_relative() => Some(dir.join(p)),
        (Some(p), _) => Some(p.clone()),
        (None, Some(dir)) => Some(dir.join(format!("{}.{extension}", command.name()))),
        (None, None) => None,
    }
}

/// Executes a command and delivers its report; returns the path written, if any.
pub fn run(command: Command, cfg: &RunConfig, out_dir: Option<&Path>) -> Result<Option<PathBuf>, CliError> {
    let report = execute(command, cfg)?;
    let dest = destination(command, cfg, out_dir, report.extension);
    match &dest {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(parent)?;
            }
            fs::write(path, &report.body)?;
        }
        None => {
            let mut out = std::io::stdout().lock();
            match out.write_all(report.body.as_bytes()).and_then(|_| out.flush()) {
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
                r => r?,
            }
        }
    }
    match report.failure {
        Some(msg) => Err(CliError::Failed(msg)),
        None => Ok(dest),
    }
}
