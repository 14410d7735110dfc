//! Run reports: a reproducibility block (command, version, seed, full config
//! echo) plus the command's result, written as 17-significant-digit JSON.

use std::path::{Path, PathBuf};

use chemospec::numfmt::to_json_sig17;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Serialize)]
struct Report<'a, T: Serialize> {
    command: &'a str,
    version: &'a str,
    seed: u64,
    config: &'a ExperimentConfig,
    result: &'a T,
}

/// Writes `<dir>/<stem>.json` and returns its text.
pub fn write_report<T: Serialize>(
    dir: &Path,
    stem: &str,
    command: &str,
    cfg: &ExperimentConfig,
    result: &T,
) -> Result<String, CliError> {
    let text = to_json_sig17(&Report {
        command,
        version: VERSION,
        seed: cfg.seed(),
        config: cfg,
        result,
    })?;
    std::fs::write(dir.join(format!("{stem}.json")), format!("{text}\n"))?;
    Ok(text)
}

pub fn output_file(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}
