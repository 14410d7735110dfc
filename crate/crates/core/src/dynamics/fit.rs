use serde::{Deserialize, Serialize};

use super::integrate::TimeSeries;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitMode {
    /// Slope of `log‖v‖` against `log t`.
    Algebraic,
    /// Slope of `log‖v‖` against `t`.
    Exponential,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub rate: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub samples: usize,
}

/// Ordinary least squares `y ≈ a + b x`.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> Result<RateFit> {
    let n = xs.len();
    if n < 2 || n != ys.len() {
        return Err(Error::Fit(format!("need matching samples, got {n} and {}", ys.len())));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit("abscissae are all equal".into()));
    }
    let b = sxy / sxx;
    let a = my - b * mx;
    let ss_res: f64 = xs.iter().zip(ys).map(|(x, y)| (y - a - b * x).powi(2)).sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    Ok(RateFit {
        rate: b,
        intercept: a,
        r_squared,
        samples: n,
    })
}

/// Fits the growth or decay rate of `‖v‖_p` over `[t0, t1]`.
pub fn fit_rate(series: &TimeSeries, p: f64, window: (f64, f64), mode: FitMode) -> Result<RateFit> {
    let norms = series
        .norm(p)
        .ok_or_else(|| Error::Fit(format!("norm p = {p} was not tracked")))?;
    let (t0, t1) = window;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&t, &v) in series.times.iter().zip(norms) {
        if t < t0 || t > t1 {
            continue;
        }
        if !(v > 0.0) {
            return Err(Error::Fit(format!("nonpositive norm {v} at t = {t}")));
        }
        let x = match mode {
            FitMode::Algebraic => {
                if t <= 0.0 {
                    return Err(Error::Fit("algebraic fit needs t > 0".into()));
                }
                t.ln()
            }
            FitMode::Exponential => t,
        };
        xs.push(x);
        ys.push(v.ln());
    }
    if xs.len() < 10 {
        return Err(Error::Fit(format!(
            "only {} samples in window [{t0}, {t1}], need >= 10",
            xs.len()
        )));
    }
    least_squares(&xs, &ys)
}
