//! Experiment runner: configuration, subcommands and artifact emission.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod plots;

use clap::ValueEnum;
use serde::Serialize;
use std::path::{Path, PathBuf};

pub use config::ExperimentConfig;
pub use error::CliError;
pub use output::{OutputDir, Timings, SCHEMA_VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Simulate,
    Norms,
    Verify,
    Scatter,
    Probe,
    Hnorm,
    Sweep,
}

/// A parsed invocation.
#[derive(Debug, Clone)]
pub struct Invocation {
    pub command: Command,
    pub config: PathBuf,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: Command,
    config: &'a ExperimentConfig,
    status: &'static str,
    /// Set when the run stopped early; the listed artifacts are incomplete.
    partial: bool,
    error: Option<String>,
    artifacts: &'a [String],
    timings: &'static str,
}

/// Effective configuration: the file with `--seed` and `--out` applied.
pub fn resolve(inv: &Invocation) -> Result<(ExperimentConfig, PathBuf), CliError> {
    let mut cfg = ExperimentConfig::load(&inv.config)?;
    if let Some(seed) = inv.seed {
        cfg.seed = Some(seed);
    }
    let out = match (&inv.out, &cfg.output) {
        (Some(dir), _) => dir.clone(),
        (None, Some(o)) => inv.config.parent().unwrap_or(Path::new(".")).join(&o.dir),
        (None, None) => return Err(CliError::Config("output.dir: required unless --out is given".into())),
    };
    Ok((cfg, out))
}

/// Runs a subcommand; the manifest is written even when the run fails.
pub fn run(inv: &Invocation) -> Result<PathBuf, CliError> {
    let (cfg, root) = resolve(inv)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(inv.threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Config(format!("--threads: {e}")))?;
    let hash = cfg.hash();
    let mut out = OutputDir::create(&root, &hash)?;
    let mut timings = Timings::default();
    let result = pool.install(|| match inv.command {
        Command::Simulate => commands::simulate(&cfg, &mut out, &mut timings),
        Command::Norms => commands::norms(&cfg, &mut out, &mut timings),
        Command::Verify => commands::verify(&cfg, &mut out, &mut timings),
        Command::Scatter => commands::scatter(&cfg, &mut out, &mut timings),
        Command::Probe => commands::probe(&cfg, &mut out, &mut timings),
        Command::Hnorm => commands::hnorm(&cfg, &mut out, &mut timings),
        Command::Sweep => commands::sweep(&cfg, &mut out, &mut timings),
    });
    let artifacts = out.written().to_vec();
    let manifest = Manifest {
        tool: "faddeev",
        version: env!("CARGO_PKG_VERSION"),
        command: inv.command,
        config: &cfg,
        status: if result.is_ok() { "ok" } else { "failed" },
        partial: result.is_err(),
        error: result.as_ref().err().map(|e| e.to_string()),
        artifacts: &artifacts,
        timings: "timings.json",
    };
    out.json("manifest.json", &manifest)?;
    out.json("timings.json", &timings)?;
    result.map(|()| root)
}
