use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shape of a periodic box: dimension, points per axis, side length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub dim: usize,
    pub points: usize,
    pub length: f64,
}

impl GridSpec {
    pub fn new(dim: usize, points: usize, length: f64) -> Self {
        Self { dim, points, length }
    }

    pub fn build(&self) -> Result<Arc<SpectralGrid>> {
        make_grid(self.dim, self.points, self.length)
    }
}

/// Periodic box `[0, L)^n` sampled at `N` points per axis with its frequency
/// lattice `ξ_k = 2πk/L`, `k ∈ {−N/2, …, N/2−1}`.
///
/// Tables are stored in FFT order: `k = 0, 1, …, N/2−1, −N/2, …, −1`.
/// Samples are row-major with the x axis fastest.
pub struct SpectralGrid {
    spec: GridSpec,
    spacing: f64,
    wavenumbers: Vec<f64>,
    xi_sq: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for SpectralGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralGrid")
            .field("dim", &self.spec.dim)
            .field("points", &self.spec.points)
            .field("length", &self.spec.length)
            .finish()
    }
}

impl PartialEq for SpectralGrid {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

/// Builds a grid after validating `n ∈ {1, 2}`, `N` a power of two `≥ 16`, `L > 0`.
pub fn make_grid(dim: usize, points: usize, length: f64) -> Result<Arc<SpectralGrid>> {
    if dim != 1 && dim != 2 {
        return Err(Error::Config(format!("dimension must be 1 or 2, got {dim}")));
    }
    if points < 16 || !points.is_power_of_two() {
        return Err(Error::Config(format!(
            "points per axis must be a power of two >= 16, got {points}"
        )));
    }
    if !(length.is_finite() && length > 0.0) {
        return Err(Error::Config(format!("box length must be > 0, got {length}")));
    }
    let n = points;
    let wavenumbers: Vec<f64> = (0..n)
        .map(|i| 2.0 * PI * signed_index(i, n) as f64 / length)
        .collect();
    let xi_sq = match dim {
        1 => wavenumbers.iter().map(|k| k * k).collect(),
        _ => {
            let mut t = Vec::with_capacity(n * n);
            for ky in &wavenumbers {
                for kx in &wavenumbers {
                    t.push(kx * kx + ky * ky);
                }
            }
            t
        }
    };
    let mut planner = FftPlanner::new();
    Ok(Arc::new(SpectralGrid {
        spec: GridSpec::new(dim, points, length),
        spacing: length / n as f64,
        wavenumbers,
        xi_sq,
        forward: planner.plan_fft_forward(n),
        inverse: planner.plan_fft_inverse(n),
    }))
}

/// Signed frequency index of FFT slot `i`.
pub fn signed_index(i: usize, n: usize) -> i64 {
    if i < n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

impl SpectralGrid {
    pub fn spec(&self) -> GridSpec {
        self.spec
    }
    pub fn dim(&self) -> usize {
        self.spec.dim
    }
    pub fn points(&self) -> usize {
        self.spec.points
    }
    pub fn length(&self) -> f64 {
        self.spec.length
    }
    pub fn spacing(&self) -> f64 {
        self.spacing
    }
    /// Total sample count `N^n`.
    pub fn len(&self) -> usize {
        self.xi_sq.len()
    }
    pub fn is_empty(&self) -> bool {
        self.xi_sq.is_empty()
    }
    /// Cell volume `h^n`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing.powi(self.spec.dim as i32)
    }
    pub fn nyquist(&self) -> f64 {
        PI * self.spec.points as f64 / self.spec.length
    }
    /// Per-axis wavenumbers in FFT order.
    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }
    /// Per-axis lattice frequencies, ascending.
    pub fn frequencies(&self) -> Vec<f64> {
        let mut f = self.wavenumbers.clone();
        f.sort_by(f64::total_cmp);
        f
    }
    /// `|ξ|²` for every mode, FFT order.
    pub fn xi_sq(&self) -> &[f64] {
        &self.xi_sq
    }

    /// Per-axis FFT slot indices `(ix, iy)` of a flat index (`iy = 0` in 1D).
    pub fn axis_indices(&self, flat: usize) -> (usize, usize) {
        let n = self.spec.points;
        (flat % n, flat / n)
    }

    /// Frequency vector of a mode as `(ξx, ξy)` (`ξy = 0` in 1D).
    pub fn xi_vector(&self, flat: usize) -> (f64, f64) {
        let (ix, iy) = self.axis_indices(flat);
        let ky = if self.spec.dim == 2 { self.wavenumbers[iy] } else { 0.0 };
        (self.wavenumbers[ix], ky)
    }

    /// Physical coordinates of sample `flat`.
    pub fn coordinates(&self, flat: usize) -> (f64, f64) {
        let (ix, iy) = self.axis_indices(flat);
        (ix as f64 * self.spacing, iy as f64 * self.spacing)
    }

    /// Whether the mode sits on a Nyquist line of any axis.
    pub fn is_nyquist(&self, flat: usize) -> bool {
        let n = self.spec.points;
        let (ix, iy) = self.axis_indices(flat);
        ix == n / 2 || (self.spec.dim == 2 && iy == n / 2)
    }

    /// Whether the mode survives 2/3-rule truncation (`|k| ≤ N/3` on every axis).
    pub fn within_two_thirds(&self, flat: usize) -> bool {
        let n = self.spec.points;
        let cut = n as f64 / 3.0;
        let (ix, iy) = self.axis_indices(flat);
        let kx = signed_index(ix, n).unsigned_abs() as f64;
        let ky = if self.spec.dim == 2 {
            signed_index(iy, n).unsigned_abs() as f64
        } else {
            0.0
        };
        kx <= cut && ky <= cut
    }

    /// In-place unitary DFT (`forward = true`) or its inverse.
    pub(crate) fn fft_in_place(&self, data: &mut [Complex64], forward: bool) {
        let n = self.spec.points;
        let plan = if forward { &self.forward } else { &self.inverse };
        let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
        // Rows (x axis).
        for row in data.chunks_exact_mut(n) {
            plan.process_with_scratch(row, &mut scratch);
        }
        if self.spec.dim == 2 {
            let mut column = vec![Complex64::new(0.0, 0.0); n];
            for ix in 0..n {
                for iy in 0..n {
                    column[iy] = data[iy * n + ix];
                }
                plan.process_with_scratch(&mut column, &mut scratch);
                for iy in 0..n {
                    data[iy * n + ix] = column[iy];
                }
            }
        }
        let norm = 1.0 / (data.len() as f64).sqrt();
        for z in data.iter_mut() {
            *z *= norm;
        }
    }
}
