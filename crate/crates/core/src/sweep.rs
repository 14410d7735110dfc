//! Cartesian parameter sweeps evaluated in parallel, one CSV row per point.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::dynamics::{integrate, SimConfig};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::numfmt::sig17;
use crate::regions::{analyze, ChemoParams, RegionReport};
use crate::spectral::{lp_norm, Field, GridSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SweepParam {
    #[serde(rename = "A")]
    Amplitude,
    #[serde(rename = "beta1")]
    Beta1,
    #[serde(rename = "beta2")]
    Beta2,
    #[serde(rename = "lambda1")]
    Lambda1,
    #[serde(rename = "lambda2")]
    Lambda2,
}

impl SweepParam {
    pub fn parse(name: &str) -> Option<Self> {
        Some(match name {
            "A" => Self::Amplitude,
            "beta1" => Self::Beta1,
            "beta2" => Self::Beta2,
            "lambda1" => Self::Lambda1,
            "lambda2" => Self::Lambda2,
            _ => return None,
        })
    }
}

/// Sampling of one swept coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AxisValues {
    List { values: Vec<f64> },
    Range {
        start: f64,
        stop: f64,
        count: usize,
        #[serde(default)]
        log: bool,
    },
}

impl AxisValues {
    pub fn values(&self) -> Result<Vec<f64>> {
        match self {
            AxisValues::List { values } => Ok(values.clone()),
            AxisValues::Range { start, stop, count, log } => {
                let (start, stop, count) = (*start, *stop, *count);
                if *log && (start <= 0.0 || stop <= 0.0) {
                    return Err(Error::Config("log-spaced axis needs positive bounds".into()));
                }
                Ok((0..count)
                    .map(|i| {
                        let s = if count == 1 { 0.0 } else { i as f64 / (count - 1) as f64 };
                        if *log {
                            (start.ln() + s * (stop.ln() - start.ln())).exp()
                        } else {
                            start + s * (stop - start)
                        }
                    })
                    .collect())
            }
        }
    }
}

/// Optional short nonlinear run at each sweep point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimSummarySpec {
    pub grid: GridSpec,
    pub t_end: f64,
    pub dt: f64,
    /// `L¹` mass of the centered Gaussian initial bump.
    pub mass: f64,
    pub width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimSummary {
    pub l2_ratio: f64,
    pub blow_up: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: [f64; 5],
    pub axes: Vec<(SweepParam, Vec<f64>)>,
    pub simulate: Option<SimSummarySpec>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub index: usize,
    /// `(β1, β2, λ1, λ2, A)`.
    pub point: [f64; 5],
    pub outcome: std::result::Result<(RegionReport, Option<SimSummary>), String>,
}

fn slot(p: SweepParam) -> usize {
    match p {
        SweepParam::Beta1 => 0,
        SweepParam::Beta2 => 1,
        SweepParam::Lambda1 => 2,
        SweepParam::Lambda2 => 3,
        SweepParam::Amplitude => 4,
    }
}

impl SweepSpec {
    /// `base` is `(β1, β2, λ1, λ2, A)`.
    pub fn new(base: [f64; 5]) -> Self {
        Self {
            base,
            axes: Vec::new(),
            simulate: None,
        }
    }

    pub fn with_axis(mut self, p: SweepParam, values: Vec<f64>) -> Self {
        self.axes.push((p, values));
        self
    }

    pub fn point_count(&self) -> usize {
        self.axes.iter().map(|(_, v)| v.len()).product()
    }

    /// Grid point `index`, with the last axis varying fastest.
    pub fn point(&self, mut index: usize) -> [f64; 5] {
        let mut pt = self.base;
        for (p, values) in self.axes.iter().rev() {
            let n = values.len();
            pt[slot(*p)] = values[index % n];
            index /= n;
        }
        pt
    }
}

fn simulate_point(params: &ChemoParams, a: f64, spec: &SimSummarySpec) -> Result<SimSummary> {
    let grid = spec.grid.build()?;
    let c = 0.5 * grid.length();
    let w = spec.width;
    let norm = spec.mass / (w * (2.0 * std::f64::consts::PI).sqrt()).powi(grid.dim() as i32);
    let v0 = Field::from_fn(grid, |x, y| {
        let r2 = (x - c).powi(2) + if spec.grid.dim == 2 { (y - c).powi(2) } else { 0.0 };
        norm * (-r2 / (2.0 * w * w)).exp()
    })?;
    let cfg = SimConfig::new(*params, a, spec.grid, spec.t_end, spec.dt);
    let (series, last) = integrate(&cfg, &v0)?;
    Ok(SimSummary {
        l2_ratio: lp_norm(&last, 2.0) / lp_norm(&v0, 2.0),
        blow_up: series.blow_up_time.is_some(),
    })
}

fn evaluate(spec: &SweepSpec, point: [f64; 5]) -> Result<(RegionReport, Option<SimSummary>)> {
    let params = ChemoParams::new(point[0], point[1], point[2], point[3])?;
    let report = analyze(&params, point[4])?;
    let sim = match &spec.simulate {
        Some(s) => Some(simulate_point(&params, point[4], s)?),
        None => None,
    };
    Ok((report, sim))
}

/// Evaluates every grid point; failures are kept in the row.
pub fn run_sweep(spec: &SweepSpec, exec: Exec) -> Vec<SweepRow> {
    exec.map_range(spec.point_count(), |index| {
        let point = spec.point(index);
        SweepRow {
            index,
            point,
            outcome: evaluate(spec, point).map_err(|e| e.to_string()),
        }
    })
}

pub const SWEEP_HEADER: &str = "index,beta1,beta2,lambda1,lambda2,A,case,on_boundary,a_star,c_star,monotone_threshold,monotone,big_m,tau_star,sim_l2_ratio,sim_blow_up,error";

fn opt(v: Option<f64>) -> String {
    v.map(sig17).unwrap_or_default()
}

/// Writes rows in index order with 17 significant digits.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], mut out: W) -> Result<()> {
    writeln!(out, "{SWEEP_HEADER}")?;
    for row in rows {
        let pt: Vec<String> = row.point.iter().map(|&v| sig17(v)).collect();
        write!(out, "{},{}", row.index, pt.join(","))?;
        match &row.outcome {
            Ok((r, sim)) => {
                let (ratio, blow) = match sim {
                    Some(s) => (sig17(s.l2_ratio), s.blow_up.to_string()),
                    None => (String::new(), String::new()),
                };
                writeln!(
                    out,
                    ",{},{},{},{},{},{},{},{},{},{},",
                    r.case.index(),
                    r.on_boundary,
                    r.a_star,
                    opt(r.c_star),
                    r.monotone_threshold,
                    r.monotone,
                    sig17(r.big_m),
                    opt(r.tau_star),
                    ratio,
                    blow
                )?;
            }
            Err(e) => {
                let clean = e.replace(['"', '\n'], "'");
                writeln!(out, ",,,,,,,,,,,\"{clean}\"")?;
            }
        }
    }
    Ok(())
}
