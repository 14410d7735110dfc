//! Instability witness: a small wave packet at the most unstable frequency,
//! evolved by the full nonlinear flow and compared against the linear one.

use serde::{Deserialize, Serialize};

use super::fit::{fit_rate, FitMode, RateFit};
use super::integrate::{integrate_observed, Scheme, SimConfig, TimeSeries};
use crate::error::{Error, Result};
use crate::regions::{spectral_bound_m, threshold_a_star, ChemoParams};
use crate::spectral::{lp_norm, wave_packet, GridSpec, LinearPropagator};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstabilityConfig {
    pub params: ChemoParams,
    pub amplitude: f64,
    pub grid: GridSpec,
    pub delta: f64,
    pub t_end: f64,
    /// Time step; defaults to `0.05 / M(A)`.
    pub dt: Option<f64>,
    /// Packet envelope width; defaults to `L / 10`.
    pub width: Option<f64>,
    #[serde(default = "default_p")]
    pub norm_p: f64,
    #[serde(default)]
    pub scheme: Scheme,
}

fn default_p() -> f64 {
    2.0
}

impl InstabilityConfig {
    pub fn new(params: ChemoParams, amplitude: f64, grid: GridSpec, delta: f64, t_end: f64) -> Self {
        Self {
            params,
            amplitude,
            grid,
            delta,
            t_end,
            dt: None,
            width: None,
            norm_p: 2.0,
            scheme: Scheme::IfRk4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstabilityReport {
    pub big_m: f64,
    pub tau_star: f64,
    /// `T* = log(2/δ) / M`.
    pub t_star: f64,
    pub early_fit: RateFit,
    /// First recorded time with `‖v‖_p > 5δ`.
    pub escape_time: Option<f64>,
    /// First recorded time with `‖v‖_p > 1/2`.
    pub half_time: Option<f64>,
    /// Last recorded time up to which `‖v − e^{tL}v0‖_p ≤ (δ/2) e^{Mt}` held throughout.
    pub deviation_held_until: f64,
    /// Whether the deviation bound held up to the escape time.
    pub deviation_held_to_escape: bool,
    pub blow_up_time: Option<f64>,
    pub series: TimeSeries,
}

/// Runs the nonlinear flow from `δ ·` (unit-norm packet at `τ*`).
pub fn instability_experiment(config: &InstabilityConfig) -> Result<InstabilityReport> {
    let params = &config.params;
    let a = config.amplitude;
    let a_star = threshold_a_star(params)?;
    if a_star.admits(a) {
        return Err(Error::Domain(format!("A = {a} does not exceed A* = {a_star}")));
    }
    if !(config.delta > 0.0 && config.delta < 1.0) {
        return Err(Error::InvalidParameter {
            name: "delta",
            reason: format!("must lie in (0, 1), got {}", config.delta),
        });
    }
    let bound = spectral_bound_m(params, a)?;
    let big_m = bound.big_m;
    let tau_star = bound.tau_star.expect("M > 0 has a maximizer");
    let grid = config.grid.build()?;
    let width = config.width.unwrap_or(grid.length() / 10.0);
    let p = config.norm_p;
    let v0 = wave_packet(&grid, tau_star, width, p, config.delta)?;

    let mut sim = SimConfig::new(*params, a, config.grid, config.t_end, config.dt.unwrap_or(0.05 / big_m));
    sim.scheme = config.scheme;
    sim.norms = if p == 2.0 { vec![2.0] } else { vec![p, 2.0] };

    let prop = LinearPropagator::new(params, a, grid.clone())?;
    let mut held_until = 0.0;
    let mut still_holding = true;
    let mut linear_error: Option<Error> = None;
    let (series, _) = integrate_observed(&sim, &v0, |t, v| {
        if !still_holding || linear_error.is_some() {
            return;
        }
        match prop.apply(&v0, t) {
            Ok(lin) => {
                let dev = lp_norm(&v.sub(&lin), p);
                if dev <= 0.5 * config.delta * (big_m * t).exp() {
                    held_until = t;
                } else {
                    still_holding = false;
                }
            }
            // Past the exponent guard the comparison is meaningless.
            Err(e) => linear_error = Some(e),
        }
    })?;

    let t_star = (2.0 / config.delta).ln() / big_m;
    let early_fit = fit_rate(&series, p, (0.0, 0.5 * t_star), FitMode::Exponential)?;
    let norms = series.norm(p).expect("tracked");
    let first_above = |level: f64| {
        series
            .times
            .iter()
            .zip(norms)
            .find(|(_, &v)| v > level)
            .map(|(&t, _)| t)
    };
    let escape_time = first_above(5.0 * config.delta);
    let half_time = first_above(0.5);
    let deviation_held_to_escape = escape_time.is_some_and(|te| held_until >= te);
    Ok(InstabilityReport {
        big_m,
        tau_star,
        t_star,
        early_fit,
        escape_time,
        half_time,
        deviation_held_until: held_until,
        deviation_held_to_escape,
        blow_up_time: series.blow_up_time,
        series,
    })
}
