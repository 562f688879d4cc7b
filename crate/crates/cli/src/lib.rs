//! Command-line front end: sweeps, oracle cross-checks and viscosity fits,
//! each writing CSV/JSON artifacts plus a run manifest.
//!
//! Exit status: 0 on success, 1 on numerical or data failure (including a
//! failed self-test), 2 on usage errors.

pub mod args;
pub mod commands;
pub mod fixtures;
pub mod ingest;
pub mod manifest;
pub mod output;
pub mod selftest;
pub mod units;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::Parser;
use thiserror::Error;

use args::Cli;
use manifest::RunManifest;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "ENWIDTH_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "enwidth-out";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Numerical(#[from] enwidth_core::Error),
    #[error("input: {0}")]
    Input(String),
    #[error("i/o: {0}")]
    Io(String),
    #[error("self-test failed: {0} check(s) violated")]
    SelftestFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

/// Files produced by a subcommand, before they are written.
#[derive(Debug, Default)]
pub struct Artifacts {
    /// `(file name, contents)` in emission order.
    pub files: Vec<(String, Vec<u8>)>,
    /// Ingested path → sha256 hex digest.
    pub input_digests: BTreeMap<String, String>,
    /// Violated self-test checks.
    pub failures: usize,
}

impl Artifacts {
    pub fn add(&mut self, name: impl Into<String>, contents: Vec<u8>) {
        self.files.push((name.into(), contents));
    }
}

/// Resolved output directory: flag, then environment, then the default.
pub fn output_dir(flag: Option<&Path>) -> PathBuf {
    match flag {
        Some(p) => p.to_path_buf(),
        None => std::env::var_os(OUT_DIR_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR)),
    }
}

/// Parses `argv`, runs the subcommand and writes its artifacts and manifest.
/// Returns the process exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(manifest) => {
            for f in &manifest.outputs {
                println!("{f}");
            }
            0
        }
        Err(e) => {
            eprintln!("enwidth {}: {e}", cli.command.name());
            e.exit_code()
        }
    }
}

/// Runs a parsed command and writes everything under the output directory.
pub fn execute(cli: &Cli) -> Result<RunManifest, CliError> {
    let name = cli.command.name();
    let artifacts = if cli.selftest {
        selftest::run(&cli.command)?
    } else {
        commands::run(&cli.command)?
    };
    let dir = output_dir(cli.out.as_deref());
    std::fs::create_dir_all(&dir)?;
    for (file, bytes) in &artifacts.files {
        std::fs::write(dir.join(file), bytes)?;
    }
    let manifest = RunManifest::new(&cli.command, cli.selftest, &artifacts)?;
    std::fs::write(dir.join(format!("{name}.manifest.json")), output::to_json(&manifest)?)?;
    if artifacts.failures > 0 {
        return Err(CliError::SelftestFailed(artifacts.failures));
    }
    Ok(manifest)
}
