use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::thread;

use crate::commands::{run, Command, Options, Report};
use crate::config::RunConfig;
use crate::CliError;

/// One concrete run of a sweep.
#[derive(Debug, Clone)]
pub struct Variant {
    pub label: String,
    pub directory: PathBuf,
    pub config: RunConfig,
}

fn set_path(root: &mut toml::Table, path: &str, value: toml::Value) -> Result<(), CliError> {
    let bad = |reason: &str| CliError::Invalid {
        field: format!("sweep.{path}"),
        reason: reason.to_string(),
    };
    let mut parts = path.split('.').peekable();
    let mut table = root;
    while let Some(part) = parts.next() {
        if part.is_empty() {
            return Err(bad("empty path segment"));
        }
        if parts.peek().is_none() {
            table.insert(part.to_string(), value);
            return Ok(());
        }
        let entry = table
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        table = entry
            .as_table_mut()
            .ok_or_else(|| bad("path runs through a value that is not a section"))?;
    }
    Err(bad("empty path"))
}

/// The cartesian product of all sweep lists, in key order, each with its
/// own output directory under `out`. A config without sweeps yields itself.
pub fn expand(config: &RunConfig, out: &Path) -> Result<Vec<Variant>, CliError> {
    if config.sweep.is_empty() {
        return Ok(vec![Variant {
            label: String::new(),
            directory: out.to_path_buf(),
            config: config.clone(),
        }]);
    }
    let mut base = config.clone();
    let sweep = std::mem::take(&mut base.sweep);
    let base_value = toml::Table::try_from(&base).map_err(|e| CliError::Parse(e.to_string()))?;
    let keys: Vec<&String> = sweep.keys().collect();
    let total: usize = sweep.values().map(Vec::len).product();
    let mut variants = Vec::with_capacity(total);
    for index in 0..total {
        let mut table = base_value.clone();
        let mut label = String::new();
        let mut rest = index;
        for key in keys.iter().rev() {
            let values = &sweep[*key];
            let value = values[rest % values.len()].clone();
            rest /= values.len();
            set_path(&mut table, key, value.clone())?;
            label = if label.is_empty() {
                format!("{key}={value}")
            } else {
                format!("{key}={value} {label}")
            };
        }
        let text = toml::to_string(&table).map_err(|e| CliError::Parse(e.to_string()))?;
        let variant: RunConfig = toml::from_str(&text).map_err(|e| CliError::Invalid {
            field: format!("sweep ({label})"),
            reason: e.to_string(),
        })?;
        variant.validate()?;
        variants.push(Variant {
            label,
            directory: out.join(format!("run_{index:03}")),
            config: variant,
        });
    }
    Ok(variants)
}

/// Runs every variant in its own directory, several at a time, and returns
/// the results in variant order.
pub fn run_all(
    command: Command,
    variants: &[Variant],
    opts: Options,
) -> Vec<Result<Report, CliError>> {
    let width = thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
        .max(1);
    let mut results = Vec::with_capacity(variants.len());
    for chunk in variants.chunks(width) {
        thread::scope(|scope| {
            let handles: Vec<_> = chunk
                .iter()
                .map(|v| scope.spawn(move || run(command, &v.config, &v.directory, opts)))
                .collect();
            for h in handles {
                results.push(
                    h.join()
                        .unwrap_or_else(|_| Err(CliError::Numerical("run panicked".into()))),
                );
            }
        });
    }
    results
}

/// Index of a sweep: one row per run with its directory and values.
pub fn index_csv(variants: &[Variant]) -> String {
    let mut out = String::from("run,parameters\n");
    for v in variants {
        let name = v
            .directory
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        let _ = writeln!(out, "{name},\"{}\"", v.label.replace('"', "\"\""));
    }
    out
}
