use std::sync::Arc;

use num_complex::Complex64;

use super::grid::SpectralGrid;
use crate::error::{Error, Result};

/// Real samples on a [`SpectralGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Arc<SpectralGrid>,
    values: Vec<f64>,
}

/// Unitary DFT coefficients of a field, FFT order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumField {
    grid: Arc<SpectralGrid>,
    coeffs: Vec<Complex64>,
}

impl Field {
    pub fn new(grid: Arc<SpectralGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Config(format!(
                "field has {} samples, grid expects {}",
                values.len(),
                grid.len()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite field sample {bad}")));
        }
        Ok(Self { grid, values })
    }

    pub(crate) fn from_raw(grid: Arc<SpectralGrid>, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn zeros(grid: Arc<SpectralGrid>) -> Self {
        let n = grid.len();
        Self::from_raw(grid, vec![0.0; n])
    }

    pub fn constant(grid: Arc<SpectralGrid>, c: f64) -> Self {
        let n = grid.len();
        Self::from_raw(grid, vec![c; n])
    }

    /// Samples `f(x, y)` at every grid point (`y = 0` in 1D).
    pub fn from_fn<F: Fn(f64, f64) -> f64>(grid: Arc<SpectralGrid>, f: F) -> Result<Self> {
        let values = (0..grid.len())
            .map(|i| {
                let (x, y) = grid.coordinates(i);
                f(x, y)
            })
            .collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &Arc<SpectralGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Spatial average over the box.
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn scaled(&self, factor: f64) -> Field {
        Field::from_raw(self.grid.clone(), self.values.iter().map(|v| v * factor).collect())
    }

    /// `self − other` (panics if the grids differ).
    pub fn sub(&self, other: &Field) -> Field {
        assert_eq!(self.grid.spec(), other.grid.spec(), "grid mismatch");
        Field::from_raw(
            self.grid.clone(),
            self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect(),
        )
    }
}

impl SpectrumField {
    pub fn new(grid: Arc<SpectralGrid>, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::Config(format!(
                "spectrum has {} coefficients, grid expects {}",
                coeffs.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, coeffs })
    }

    pub(crate) fn from_raw(grid: Arc<SpectralGrid>, coeffs: Vec<Complex64>) -> Self {
        Self { grid, coeffs }
    }

    pub fn grid(&self) -> &Arc<SpectralGrid> {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient of the zero mode.
    pub fn zero_mode(&self) -> Complex64 {
        self.coeffs[0]
    }

    /// Multiplies every mode by `m(|ξ|²)`.
    pub fn map_radial<F: Fn(f64) -> f64>(&self, m: F) -> SpectrumField {
        let coeffs = self
            .coeffs
            .iter()
            .zip(self.grid.xi_sq())
            .map(|(c, &t)| c * m(t))
            .collect();
        SpectrumField::from_raw(self.grid.clone(), coeffs)
    }
}

/// Unitary forward DFT.
pub fn transform(field: &Field) -> SpectrumField {
    let mut data: Vec<Complex64> = field.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    field.grid.fft_in_place(&mut data, true);
    SpectrumField::from_raw(field.grid.clone(), data)
}

/// Inverse of [`transform`], keeping the real part.
pub fn inverse_transform(spectrum: &SpectrumField) -> Field {
    let mut data = spectrum.coeffs.clone();
    spectrum.grid.fft_in_place(&mut data, false);
    Field::from_raw(spectrum.grid.clone(), data.into_iter().map(|z| z.re).collect())
}

/// Discrete `L^p` norm `(Σ|f_i|^p h^n)^{1/p}`; `p = ∞` gives `max |f_i|`.
pub fn lp_norm(field: &Field, p: f64) -> f64 {
    lp_norm_of(field.values(), field.grid().cell_volume(), p)
}

pub(crate) fn lp_norm_of(values: &[f64], cell: f64, p: f64) -> f64 {
    assert!(p >= 1.0, "L^p norm needs p >= 1, got {p}");
    if p.is_infinite() {
        values.iter().fold(0.0, |m, v| m.max(v.abs()))
    } else if p == 1.0 {
        values.iter().map(|v| v.abs()).sum::<f64>() * cell
    } else if p == 2.0 {
        (values.iter().map(|v| v * v).sum::<f64>() * cell).sqrt()
    } else {
        (values.iter().map(|v| v.abs().powf(p)).sum::<f64>() * cell).powf(1.0 / p)
    }
}
