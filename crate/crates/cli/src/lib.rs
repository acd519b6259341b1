//! Config-driven batch runs: mode tables, coupling constants, precession
//! estimates and trajectories.

pub mod commands;
pub mod config;
pub mod sweep;

use std::path::Path;

use thiserror::Error;

pub use commands::{Command, Options, Report, NO_RESONANCE};
pub use config::RunConfig;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid config: {0}")]
    Parse(String),
    #[error("invalid {field}: {reason}")]
    Invalid { field: String, reason: String },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("output failed: {0}")]
    Io(String),
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_EMPTY: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_FAILURE: i32 = 3;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Invalid { .. } => EXIT_INVALID,
            CliError::Numerical(_) | CliError::Io(_) => EXIT_FAILURE,
        }
    }
}

/// Everything a command invocation writes to the terminal, plus its exit code.
#[derive(Debug, Default)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

/// Loads the config, expands sweeps and runs `command` for every variant.
pub fn execute(command: Command, config_path: &Path, out: Option<&Path>, opts: Options) -> Outcome {
    let mut outcome = Outcome::default();
    let config = match RunConfig::load(config_path) {
        Ok(c) => c,
        Err(e) => {
            outcome.stderr = format!("error: {e}\n");
            outcome.code = e.exit_code();
            return outcome;
        }
    };
    let out = out
        .map(Path::to_path_buf)
        .unwrap_or_else(|| config.output.directory.clone());
    let variants = match sweep::expand(&config, &out) {
        Ok(v) => v,
        Err(e) => {
            outcome.stderr = format!("error: {e}\n");
            outcome.code = e.exit_code();
            return outcome;
        }
    };
    if !config.sweep.is_empty() {
        let written = std::fs::create_dir_all(&out)
            .and_then(|_| std::fs::write(out.join("sweep.csv"), sweep::index_csv(&variants)));
        if let Err(e) = written {
            outcome.stderr = format!(
                "error: cannot write sweep index in {}: {e}\n",
                out.display()
            );
            outcome.code = EXIT_FAILURE;
            return outcome;
        }
    }
    let results = sweep::run_all(command, &variants, opts);
    let tagged = variants.len() > 1;
    let mut empty = false;
    let mut worst = EXIT_OK;
    for (v, result) in variants.iter().zip(results) {
        let prefix = if tagged {
            format!("[{}] ", v.label)
        } else {
            String::new()
        };
        match result {
            Ok(report) => {
                empty |= report.empty;
                for line in report.stdout.lines() {
                    outcome.stdout.push_str(&format!("{prefix}{line}\n"));
                }
                for line in report.log.lines() {
                    outcome.stderr.push_str(&format!("{prefix}{line}\n"));
                }
            }
            Err(e) => {
                worst = worst.max(e.exit_code());
                outcome.stderr.push_str(&format!("{prefix}error: {e}\n"));
            }
        }
    }
    outcome.code = if worst != EXIT_OK {
        worst
    } else if empty {
        EXIT_EMPTY
    } else {
        EXIT_OK
    };
    outcome
}
