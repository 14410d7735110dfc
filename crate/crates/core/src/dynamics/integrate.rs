use std::io::Write;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::nonlinear::NonlinearOperator;
use crate::error::{Error, Result};
use crate::numfmt::sig17;
use crate::regions::{check_amplitude, spectral_bound_m, symbol_h, ChemoParams};
use crate::spectral::{lp_norm_of, transform, Field, GridSpec, SpectralGrid, SpectrumField};

/// Magnitude of `‖v‖_∞` treated as blow-up.
pub const BLOW_UP_LEVEL: f64 = 1e12;

/// Exponential time-stepping scheme; the linear part is exact in both.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Lawson integrating-factor RK4.
    #[default]
    IfRk4,
    /// Cox–Matthews ETDRK4 with contour-integral φ-functions.
    Etdrk4,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub params: ChemoParams,
    pub amplitude: f64,
    pub grid: GridSpec,
    pub t_end: f64,
    pub dt: f64,
    #[serde(default)]
    pub scheme: Scheme,
    #[serde(default = "default_true")]
    pub dealias: bool,
    /// Tracked `p` values; `inf` is the sup norm.
    #[serde(default = "default_norms")]
    pub norms: Vec<f64>,
    /// Record every `stride` steps.
    #[serde(default = "default_stride")]
    pub stride: usize,
}

fn default_true() -> bool {
    true
}
fn default_norms() -> Vec<f64> {
    vec![1.0, 2.0, f64::INFINITY]
}
fn default_stride() -> usize {
    1
}

impl SimConfig {
    pub fn new(params: ChemoParams, amplitude: f64, grid: GridSpec, t_end: f64, dt: f64) -> Self {
        Self {
            params,
            amplitude,
            grid,
            t_end,
            dt,
            scheme: Scheme::default(),
            dealias: true,
            norms: default_norms(),
            stride: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_amplitude(self.amplitude)?;
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidParameter {
                name: "dt",
                reason: format!("must be > 0, got {}", self.dt),
            });
        }
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "t_end",
                reason: format!("must be >= 0, got {}", self.t_end),
            });
        }
        if self.stride == 0 {
            return Err(Error::InvalidParameter {
                name: "stride",
                reason: "must be >= 1".into(),
            });
        }
        if let Some(p) = self.norms.iter().find(|p| !(**p >= 1.0)) {
            return Err(Error::InvalidParameter {
                name: "norms",
                reason: format!("norm exponent {p} < 1"),
            });
        }
        let m = spectral_bound_m(&self.params, self.amplitude)?.big_m;
        if m > 0.0 && self.dt * m > 0.1 + 1e-12 {
            return Err(Error::InvalidParameter {
                name: "dt",
                reason: format!("dt * M(A) = {} exceeds 0.1 (M = {m})", self.dt * m),
            });
        }
        Ok(())
    }
}

/// Column label for a tracked norm.
pub fn norm_label(p: f64) -> String {
    if p.is_infinite() {
        "Linf".into()
    } else if p == 1.0 {
        "L1".into()
    } else if p == 2.0 {
        "L2".into()
    } else {
        format!("Lq:{p}")
    }
}

/// Sampled norms and mean of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    pub norm_ps: Vec<f64>,
    /// `norms[j][i]` is `‖v(times[i])‖_{norm_ps[j]}`.
    pub norms: Vec<Vec<f64>>,
    pub mean_trace: Vec<f64>,
    /// Time of the first step whose state exceeded the blow-up level.
    pub blow_up_time: Option<f64>,
}

impl TimeSeries {
    fn new(norm_ps: &[f64]) -> Self {
        Self {
            times: Vec::new(),
            norm_ps: norm_ps.to_vec(),
            norms: vec![Vec::new(); norm_ps.len()],
            mean_trace: Vec::new(),
            blow_up_time: None,
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Trace of `‖·‖_p`, if tracked.
    pub fn norm(&self, p: f64) -> Option<&[f64]> {
        self.norm_ps
            .iter()
            .position(|&q| q == p)
            .map(|j| self.norms[j].as_slice())
    }

    fn record(&mut self, t: f64, values: &[f64], cell: f64, mean: f64) {
        self.times.push(t);
        for (j, &p) in self.norm_ps.iter().enumerate() {
            self.norms[j].push(lp_norm_of(values, cell, p));
        }
        self.mean_trace.push(mean);
    }

    /// CSV with columns `t, mean, <norm labels>`, 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let mut header = vec!["t".to_string(), "mean".to_string()];
        header.extend(self.norm_ps.iter().map(|&p| norm_label(p)));
        writeln!(out, "{}", header.join(","))?;
        for i in 0..self.times.len() {
            let mut row = vec![sig17(self.times[i]), sig17(self.mean_trace[i])];
            row.extend(self.norms.iter().map(|n| sig17(n[i])));
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Kassam–Trefethen contour average of `f(z)` for every `z` in `zs`.
fn contour_mean<F: Fn(Complex64) -> Complex64>(z: f64, f: F) -> f64 {
    const POINTS: usize = 32;
    let mut acc = 0.0;
    for j in 0..POINTS {
        let theta = std::f64::consts::PI * (j as f64 + 0.5) / POINTS as f64;
        let r = Complex64::from_polar(1.0, theta);
        acc += f(z + r).re;
    }
    acc / POINTS as f64
}

enum Stepper {
    IfRk4 {
        e: Vec<f64>,
        e2: Vec<f64>,
    },
    Etdrk4 {
        e: Vec<f64>,
        e2: Vec<f64>,
        q: Vec<f64>,
        f1: Vec<f64>,
        f2: Vec<f64>,
        f3: Vec<f64>,
    },
}

impl Stepper {
    fn new(scheme: Scheme, symbol: &[f64], dt: f64) -> Self {
        let e: Vec<f64> = symbol.iter().map(|h| (dt * h).exp()).collect();
        let e2: Vec<f64> = symbol.iter().map(|h| (0.5 * dt * h).exp()).collect();
        match scheme {
            Scheme::IfRk4 => Stepper::IfRk4 { e, e2 },
            Scheme::Etdrk4 => {
                let coeff = |f: &dyn Fn(Complex64) -> Complex64| -> Vec<f64> {
                    symbol.iter().map(|h| dt * contour_mean(dt * h, f)).collect()
                };
                let q = coeff(&|z| ((z / 2.0).exp() - 1.0) / z);
                let f1 = coeff(&|z| (-4.0 - z + z.exp() * (4.0 - 3.0 * z + z * z)) / (z * z * z));
                let f2 = coeff(&|z| (2.0 + z + z.exp() * (z - 2.0)) / (z * z * z));
                let f3 = coeff(&|z| (-4.0 - 3.0 * z - z * z + z.exp() * (4.0 - z)) / (z * z * z));
                Stepper::Etdrk4 { e, e2, q, f1, f2, f3 }
            }
        }
    }

    /// Advances `v` by one step; returns `max |v|` seen at the first stage.
    fn step(&self, op: &NonlinearOperator, v: &mut [Complex64], dt: f64) -> f64 {
        let n = v.len();
        match self {
            Stepper::IfRk4 { e, e2 } => {
                let (k1, vmax) = op.apply_spectrum(v);
                let s2: Vec<Complex64> = (0..n).map(|i| (v[i] + 0.5 * dt * k1[i]) * e2[i]).collect();
                let (k2, _) = op.apply_spectrum(&s2);
                let s3: Vec<Complex64> = (0..n).map(|i| v[i] * e2[i] + 0.5 * dt * k2[i]).collect();
                let (k3, _) = op.apply_spectrum(&s3);
                let s4: Vec<Complex64> = (0..n).map(|i| v[i] * e[i] + dt * e2[i] * k3[i]).collect();
                let (k4, _) = op.apply_spectrum(&s4);
                for i in 0..n {
                    v[i] = v[i] * e[i]
                        + dt / 6.0 * (k1[i] * e[i] + 2.0 * e2[i] * (k2[i] + k3[i]) + k4[i]);
                }
                vmax
            }
            Stepper::Etdrk4 { e, e2, q, f1, f2, f3 } => {
                let (nv, vmax) = op.apply_spectrum(v);
                let a: Vec<Complex64> = (0..n).map(|i| v[i] * e2[i] + q[i] * nv[i]).collect();
                let (na, _) = op.apply_spectrum(&a);
                let b: Vec<Complex64> = (0..n).map(|i| v[i] * e2[i] + q[i] * na[i]).collect();
                let (nb, _) = op.apply_spectrum(&b);
                let c: Vec<Complex64> = (0..n)
                    .map(|i| a[i] * e2[i] + q[i] * (2.0 * nb[i] - nv[i]))
                    .collect();
                let (nc, _) = op.apply_spectrum(&c);
                for i in 0..n {
                    v[i] = v[i] * e[i] + nv[i] * f1[i] + 2.0 * (na[i] + nb[i]) * f2[i] + nc[i] * f3[i];
                }
                vmax
            }
        }
    }
}

fn to_physical(grid: &Arc<SpectralGrid>, v_hat: &[Complex64]) -> Vec<f64> {
    let mut data = v_hat.to_vec();
    grid.fft_in_place(&mut data, false);
    data.into_iter().map(|z| z.re).collect()
}

/// Integrates the perturbation equation, calling `observer(t, &v)` at every
/// recorded time.
pub fn integrate_observed<F>(config: &SimConfig, v0: &Field, mut observer: F) -> Result<(TimeSeries, Field)>
where
    F: FnMut(f64, &Field),
{
    config.validate()?;
    let grid = v0.grid().clone();
    if grid.spec() != config.grid {
        return Err(Error::Config(format!(
            "initial field grid {:?} differs from configured grid {:?}",
            grid.spec(),
            config.grid
        )));
    }
    let symbol: Vec<f64> = grid
        .xi_sq()
        .iter()
        .map(|&t| symbol_h(&config.params, config.amplitude, t))
        .collect();
    let steps = (config.t_end / config.dt).ceil().max(0.0) as usize;
    let dt = if steps == 0 { config.dt } else { config.t_end / steps as f64 };
    let stepper = Stepper::new(config.scheme, &symbol, dt);
    let op = NonlinearOperator::new(&config.params, grid.clone(), config.dealias);

    let cell = grid.cell_volume();
    let root_n = (grid.len() as f64).sqrt();
    let mut series = TimeSeries::new(&config.norms);
    let mut v_hat = transform(v0).coeffs().to_vec();
    let mut emit = |t: f64, v_hat: &[Complex64], series: &mut TimeSeries| {
        let values = to_physical(&grid, v_hat);
        series.record(t, &values, cell, v_hat[0].re / root_n);
        observer(t, &Field::from_raw(grid.clone(), values));
    };
    emit(0.0, &v_hat, &mut series);

    let mut last_good = v_hat.clone();
    for step in 1..=steps {
        let vmax = stepper.step(&op, &mut v_hat, dt);
        let t = step as f64 * dt;
        if !vmax.is_finite() || vmax > BLOW_UP_LEVEL || v_hat.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            series.blow_up_time = Some(t - dt);
            v_hat = last_good;
            break;
        }
        if step % config.stride == 0 || step == steps {
            let values = to_physical(&grid, &v_hat);
            if values.iter().any(|x| x.abs() > BLOW_UP_LEVEL) {
                series.blow_up_time = Some(t);
                emit(t, &v_hat, &mut series);
                break;
            }
            emit(t, &v_hat, &mut series);
        }
        last_good.copy_from_slice(&v_hat);
    }
    let final_field = crate::spectral::inverse_transform(&SpectrumField::new(grid.clone(), v_hat)?);
    Ok((series, final_field))
}

/// [`integrate_observed`] without an observer.
pub fn integrate(config: &SimConfig, v0: &Field) -> Result<(TimeSeries, Field)> {
    integrate_observed(config, v0, |_, _| {})
}
