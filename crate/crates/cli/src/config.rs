//! Flat experiment configuration: a JSON object file merged with command-line
//! overrides (overrides win), then validated per subcommand.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use chemospec::dynamics::{FitMode, Scheme};
use chemospec::raster::RasterMode;
use chemospec::sweep::AxisValues;
use chemospec::{ChemoParams, Extended};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::CliError;

/// Initial condition for `propagate` and `simulate`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialCondition {
    Zero,
    /// Centered Gaussian with `ic_width` and `L¹` mass `ic_mass`.
    Bump,
    /// Wave packet at `τ*` (requires `A > A*`) with `ic_width`, `L^p` norm `ic_mass`.
    Packet,
    /// Seeded smooth noise (correlation length `ic_width`), `L¹` norm `ic_mass`.
    Random,
    /// Snapshot file given by `ic_file`.
    File,
}

/// Every input in one namespace. Absent keys take per-command defaults;
/// the echo written with each run has those defaults filled in.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda2: Option<f64>,
    #[serde(rename = "A", skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[serde(rename = "L", skip_serializing_if = "Option::is_none")]
    pub length: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_start: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub scheme: Option<Scheme>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dealias: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub norms: Option<Vec<Extended>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stride: Option<usize>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub ic: Option<InitialCondition>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ic_mass: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ic_width: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ic_file: Option<PathBuf>,
    /// Run the instability experiment instead of a plain simulation.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub instability: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit_p: Option<Extended>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit_window: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit_mode: Option<FitMode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radii: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<RasterMode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resolution: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub svg: Option<bool>,

    /// Swept coordinates keyed by `A`, `beta1`, `beta2`, `lambda1`, `lambda2`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<BTreeMap<String, AxisValues>>,
    /// Attach a short nonlinear run summary to every sweep row.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep_simulate: Option<bool>,
}

fn parse_json(text: &str, origin: &str) -> Result<ExperimentConfig, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Config(format!("{origin}: {e}")))
}

/// Parses a `key=value` override; the value is read as JSON, else as a string.
pub fn parse_override(spec: &str) -> Result<(String, Value), CliError> {
    let (key, raw) = spec
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override {spec:?} is not key=value")))?;
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    Ok((key.trim().to_string(), value))
}

/// Loads `file` (if any), then applies `overrides` in order.
pub fn load(file: Option<&Path>, overrides: &[(String, Value)]) -> Result<ExperimentConfig, CliError> {
    let mut map = match file {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            match serde_json::from_str::<Value>(&text) {
                Ok(Value::Object(m)) => {
                    // Full typed parse for line/column diagnostics on bad fields.
                    parse_json(&text, &path.display().to_string())?;
                    m
                }
                Ok(_) => {
                    return Err(CliError::Config(format!(
                        "{}: top level must be an object",
                        path.display()
                    )))
                }
                Err(e) => return Err(CliError::Config(format!("{}: {e}", path.display()))),
            }
        }
        None => Map::new(),
    };
    for (k, v) in overrides {
        map.insert(k.clone(), v.clone());
    }
    serde_json::from_value(Value::Object(map)).map_err(|e| CliError::Config(format!("command line overrides: {e}")))
}

fn need<T: Copy>(v: Option<T>, name: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Config(format!("missing required field `{name}`")))
}

impl ExperimentConfig {
    pub fn params(&self) -> Result<ChemoParams, CliError> {
        Ok(ChemoParams::new(
            need(self.beta1, "beta1")?,
            need(self.beta2, "beta2")?,
            need(self.lambda1, "lambda1")?,
            need(self.lambda2, "lambda2")?,
        )?)
    }

    pub fn amplitude(&self) -> Result<f64, CliError> {
        let a = need(self.amplitude, "A")?;
        chemospec::regions::check_amplitude(a)?;
        Ok(a)
    }

    pub fn output_dir(&self) -> PathBuf {
        self.output.clone().unwrap_or_else(|| PathBuf::from("."))
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }
}

/// Fills `slot` with `value` when absent and returns the effective value.
pub fn default_to<T: Clone>(slot: &mut Option<T>, value: T) -> T {
    slot.get_or_insert(value).clone()
}
