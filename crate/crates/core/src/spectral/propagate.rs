//! Exact Fourier-multiplier propagators.
//!
//! `e^{tL_A}` acts mode by mode as `e^{t h_A(|ξ|²)}`; it factors into the heat
//! semigroup `e^{−t|ξ|²}` and the bounded part `e^{t(|ξ|² + h_A)}`.

use std::sync::Arc;

use num_complex::Complex64;

use super::field::{inverse_transform, transform, Field, SpectrumField};
use super::grid::SpectralGrid;
use crate::error::{Error, Result};
use crate::regions::{check_amplitude, spectral_bound_m, symbol_h, ChemoParams};

/// Largest exponent a multiplier may reach before `exp` loses range.
pub const EXPONENT_LIMIT: f64 = 700.0;

fn check_time(t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("time must be finite and >= 0, got {t}")))
    }
}

fn check_exponent(exponent: f64) -> Result<()> {
    if exponent > EXPONENT_LIMIT {
        Err(Error::Range {
            exponent,
            limit: EXPONENT_LIMIT,
        })
    } else {
        Ok(())
    }
}

/// Applies `e^{t·rate(|ξ|²)}` to every mode.
fn apply_rate<F: Fn(f64) -> f64>(field: &Field, t: f64, rate: F) -> Field {
    if t == 0.0 {
        return field.clone();
    }
    let spec = transform(field).map_radial(|xi_sq| (t * rate(xi_sq)).exp());
    inverse_transform(&spec)
}

/// Cached symbol table for `e^{tL_A}` on one grid.
#[derive(Debug, Clone)]
pub struct LinearPropagator {
    grid: Arc<SpectralGrid>,
    symbol: Vec<f64>,
    big_m: f64,
}

impl LinearPropagator {
    pub fn new(params: &ChemoParams, amplitude: f64, grid: Arc<SpectralGrid>) -> Result<Self> {
        check_amplitude(amplitude)?;
        let symbol = grid
            .xi_sq()
            .iter()
            .map(|&t| symbol_h(params, amplitude, t))
            .collect();
        let big_m = spectral_bound_m(params, amplitude)?.big_m;
        Ok(Self { grid, symbol, big_m })
    }

    /// `h_A` on the lattice, FFT order.
    pub fn symbol(&self) -> &[f64] {
        &self.symbol
    }

    /// Continuous-space `M(A)`.
    pub fn big_m(&self) -> f64 {
        self.big_m
    }

    /// Largest lattice value of `h_A`.
    pub fn lattice_max(&self) -> f64 {
        self.symbol.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn grid(&self) -> &Arc<SpectralGrid> {
        &self.grid
    }

    /// Multiplies a spectrum by `e^{t h_A}`.
    pub fn apply_spectrum(&self, spectrum: &SpectrumField, t: f64) -> Result<SpectrumField> {
        check_time(t)?;
        check_exponent(t * self.big_m)?;
        let coeffs: Vec<Complex64> = spectrum
            .coeffs()
            .iter()
            .zip(&self.symbol)
            .map(|(c, &h)| c * (t * h).exp())
            .collect();
        Ok(SpectrumField::from_raw(self.grid.clone(), coeffs))
    }

    pub fn apply(&self, field: &Field, t: f64) -> Result<Field> {
        if field.grid().spec() != self.grid.spec() {
            return Err(Error::Config("field and propagator grids differ".into()));
        }
        if t == 0.0 {
            check_time(t)?;
            return Ok(field.clone());
        }
        Ok(inverse_transform(&self.apply_spectrum(&transform(field), t)?))
    }
}

/// `e^{tL_A} f`.
pub fn propagate_linear(params: &ChemoParams, amplitude: f64, field: &Field, t: f64) -> Result<Field> {
    check_amplitude(amplitude)?;
    check_time(t)?;
    check_exponent(t * spectral_bound_m(params, amplitude)?.big_m)?;
    Ok(apply_rate(field, t, |xi_sq| symbol_h(params, amplitude, xi_sq)))
}

/// Heat semigroup `e^{tDΔ} f`.
pub fn propagate_heat(field: &Field, t: f64, diffusivity: f64) -> Result<Field> {
    check_time(t)?;
    if !(diffusivity.is_finite() && diffusivity >= 0.0) {
        return Err(Error::Domain(format!("diffusivity must be >= 0, got {diffusivity}")));
    }
    Ok(apply_rate(field, t, |xi_sq| -diffusivity * xi_sq))
}

/// Bounded part `e^{tM_A} f`, multiplier `e^{t(|ξ|² + h_A)}`.
pub fn propagate_bounded_part(params: &ChemoParams, amplitude: f64, field: &Field, t: f64) -> Result<Field> {
    check_amplitude(amplitude)?;
    check_time(t)?;
    let rate = |xi_sq: f64| xi_sq + symbol_h(params, amplitude, xi_sq);
    let top = field
        .grid()
        .xi_sq()
        .iter()
        .map(|&x| rate(x))
        .fold(0.0, f64::max);
    check_exponent(t * top)?;
    Ok(apply_rate(field, t, rate))
}
