//! Configuration-driven runner for the `truncfield` experiments.
//!
//! ```text
//! truncfield <subcommand> --config <file.toml> --out <dir> [--seed N]
//! ```
//!
//! Exit status is `0` when every asserted check passed, `1` when a check
//! failed and `2` for configuration, I/O or model errors.

pub mod commands;
pub mod config;

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

pub use commands::{execute, Artifact, Command, Outcome};
pub use config::{ConfigError, ExperimentConfig, Resolved};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(#[from] ConfigError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{command}: {reason}")]
    Unsupported { command: &'static str, reason: &'static str },
    #[error(transparent)]
    Model(#[from] truncfield::Error),
    #[error("serialization failed: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        2
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Read and validate a configuration file, applying a seed override.
pub fn load_config(path: &Path, seed: Option<u64>) -> Result<Resolved, CliError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let mut config = ExperimentConfig::from_toml(&text)?;
    if let Some(seed) = seed {
        config.seed = seed;
    }
    Ok(config.resolve()?)
}

/// Run one subcommand and write its artifacts into `out`.
pub fn run(command: Command, config: &Path, out: &Path, seed: Option<u64>) -> Result<Outcome, CliError> {
    let resolved = load_config(config, seed)?;
    let outcome = execute(command, &resolved)?;
    fs::create_dir_all(out).map_err(io_err(out))?;
    for artifact in &outcome.artifacts {
        let path = out.join(&artifact.file_name);
        fs::write(&path, &artifact.contents).map_err(io_err(&path))?;
    }
    Ok(outcome)
}
