//! Gaussian wave packets concentrated near one lattice frequency, and the
//! near-eigenfunction witness built from them.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::field::{lp_norm, transform, Field};
use super::grid::SpectralGrid;
use super::propagate::LinearPropagator;
use crate::error::{Error, Result};
use crate::regions::{spectral_bound_m, ChemoParams};

/// Lattice wavenumber (x axis) nearest to `√carrier_xi_sq`.
pub fn nearest_lattice_wavenumber(grid: &SpectralGrid, carrier_xi_sq: f64) -> f64 {
    let target = carrier_xi_sq.max(0.0).sqrt();
    let dk = 2.0 * std::f64::consts::PI / grid.length();
    (target / dk).round() * dk
}

/// Gaussian envelope of the given width times `cos(ξ_c x)`, centered in the
/// box and scaled to `‖·‖_p = norm`. An infinite width gives a pure cosine.
pub fn wave_packet(
    grid: &Arc<SpectralGrid>,
    carrier_xi_sq: f64,
    width: f64,
    p: f64,
    norm: f64,
) -> Result<Field> {
    if !(carrier_xi_sq > 0.0 && carrier_xi_sq.is_finite()) {
        return Err(Error::Config(format!("carrier |xi|^2 must be > 0, got {carrier_xi_sq}")));
    }
    if !(width > 0.0) {
        return Err(Error::Config(format!("packet width must be > 0, got {width}")));
    }
    let k = nearest_lattice_wavenumber(grid, carrier_xi_sq);
    if k > 2.0 / 3.0 * grid.nyquist() {
        return Err(Error::Config(format!(
            "carrier {k} exceeds 2/3 of the Nyquist frequency {}",
            grid.nyquist()
        )));
    }
    if k == 0.0 {
        return Err(Error::Config("carrier rounds to the zero mode".into()));
    }
    let c = 0.5 * grid.length();
    let dim = grid.dim();
    let raw = Field::from_fn(grid.clone(), |x, y| {
        let r2 = (x - c).powi(2) + if dim == 2 { (y - c).powi(2) } else { 0.0 };
        let env = if width.is_infinite() {
            1.0
        } else {
            (-r2 / (2.0 * width * width)).exp()
        };
        env * (k * (x - c)).cos()
    })?;
    let current = lp_norm(&raw, p);
    Ok(raw.scaled(norm / current))
}

/// Fraction of discrete `L²` mass within `radius` of `±ξ_c` along x.
pub fn spectral_mass_near(field: &Field, carrier: f64, radius: f64) -> f64 {
    let spec = transform(field);
    let grid = field.grid();
    let mut inside = 0.0;
    let mut total = 0.0;
    for (i, c) in spec.coeffs().iter().enumerate() {
        let (kx, ky) = grid.xi_vector(i);
        let w = c.norm_sqr();
        total += w;
        let d1 = ((kx - carrier).powi(2) + ky * ky).sqrt();
        let d2 = ((kx + carrier).powi(2) + ky * ky).sqrt();
        if d1.min(d2) <= radius {
            inside += w;
        }
    }
    inside / total
}

/// Outcome of the near-eigenfunction construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub big_m: f64,
    pub tau_star: f64,
    pub width: f64,
    /// `max_t ‖e^{tL}u₀ − e^{Mt}u₀‖ / ‖u₀‖` over the sampled horizon.
    pub deviation_ratio: f64,
    /// `max_t ‖e^{tL}u₀‖ / (e^{Mt}‖u₀‖)`.
    pub growth_ratio: f64,
    pub gamma: f64,
    pub horizon: f64,
    pub satisfied: bool,
}

fn witness_ratios(
    prop: &LinearPropagator,
    u0: &Field,
    big_m: f64,
    horizon: f64,
    samples: usize,
    p: f64,
) -> Result<(f64, f64)> {
    let norm0 = lp_norm(u0, p);
    let mut dev: f64 = 0.0;
    let mut growth: f64 = 0.0;
    for j in 0..=samples {
        let t = horizon * j as f64 / samples as f64;
        let ut = prop.apply(u0, t)?;
        let e = (big_m * t).exp();
        dev = dev.max(lp_norm(&ut.sub(&u0.scaled(e)), p) / norm0);
        growth = growth.max(lp_norm(&ut, p) / (e * norm0));
    }
    Ok((dev, growth))
}

/// Builds a packet at `τ*` whose evolution stays within `γ‖u₀‖` of
/// `e^{Mt}u₀` on `[0, 1/M]`, choosing the smallest such width by bisection.
pub fn near_eigenfunction_witness(
    params: &ChemoParams,
    amplitude: f64,
    grid: &Arc<SpectralGrid>,
    gamma: f64,
    p: f64,
) -> Result<(Field, WitnessReport)> {
    let bound = spectral_bound_m(params, amplitude)?;
    let tau_star = bound
        .tau_star
        .ok_or_else(|| Error::Domain(format!("A = {amplitude} does not exceed A*")))?;
    let big_m = bound.big_m;
    let horizon = 1.0 / big_m;
    let prop = LinearPropagator::new(params, amplitude, grid.clone())?;
    let samples = 40;
    let eval = |w: f64| -> Result<(Field, f64, f64)> {
        let u0 = wave_packet(grid, tau_star, w, p, 1.0)?;
        let (d, g) = witness_ratios(&prop, &u0, big_m, horizon, samples, p)?;
        Ok((u0, d, g))
    };

    let mut hi = grid.length() / 8.0;
    let mut lo = 2.0 * grid.spacing();
    let (mut best, mut best_d, mut best_g) = eval(hi)?;
    if best_d > gamma || best_g > 2.0 {
        return Err(Error::Domain(format!(
            "widest packet (width {hi}) still deviates by {best_d}; enlarge the box"
        )));
    }
    for _ in 0..30 {
        let mid = 0.5 * (lo + hi);
        let (u, d, g) = eval(mid)?;
        if d <= gamma && g <= 2.0 {
            hi = mid;
            best = u;
            best_d = d;
            best_g = g;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-3 * hi {
            break;
        }
    }
    let report = WitnessReport {
        big_m,
        tau_star,
        width: hi,
        deviation_ratio: best_d,
        growth_ratio: best_g,
        gamma,
        horizon,
        satisfied: best_d <= gamma && best_g <= 2.0,
    };
    Ok((best, report))
}
