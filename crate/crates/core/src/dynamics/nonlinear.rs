use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernels::k_multiplier;
use crate::regions::ChemoParams;
use crate::spectral::{inverse_transform, transform, Field, SpectralGrid, SpectrumField};

/// Precomputed multipliers for `−∇·(v ∇K*v)` on one grid.
#[derive(Debug, Clone)]
pub struct NonlinearOperator {
    grid: Arc<SpectralGrid>,
    /// `ξ_j k(|ξ|²)` per axis, zero on Nyquist lines.
    grad: Vec<Vec<f64>>,
    /// `ξ_j` per axis, zero on Nyquist lines.
    div: Vec<Vec<f64>>,
    keep: Option<Vec<bool>>,
}

impl NonlinearOperator {
    pub fn new(params: &ChemoParams, grid: Arc<SpectralGrid>, dealias: bool) -> Self {
        let dim = grid.dim();
        let mut grad = vec![Vec::with_capacity(grid.len()); dim];
        let mut div = vec![Vec::with_capacity(grid.len()); dim];
        for i in 0..grid.len() {
            let (kx, ky) = grid.xi_vector(i);
            let nyq = grid.is_nyquist(i);
            let k = k_multiplier(params, grid.xi_sq()[i]);
            for (axis, xi) in [kx, ky].into_iter().take(dim).enumerate() {
                let xi = if nyq { 0.0 } else { xi };
                grad[axis].push(xi * k);
                div[axis].push(xi);
            }
        }
        let keep = dealias.then(|| (0..grid.len()).map(|i| grid.within_two_thirds(i)).collect());
        Self { grid, grad, div, keep }
    }

    pub fn grid(&self) -> &Arc<SpectralGrid> {
        &self.grid
    }

    fn truncate(&self, coeffs: &mut [Complex64]) {
        if let Some(keep) = &self.keep {
            for (c, &k) in coeffs.iter_mut().zip(keep) {
                if !k {
                    *c = Complex64::new(0.0, 0.0);
                }
            }
        }
    }

    /// Spectral evaluation; also returns `max |v|` of the (truncated) input.
    pub fn apply_spectrum(&self, v_hat: &[Complex64]) -> (Vec<Complex64>, f64) {
        let grid = &self.grid;
        let mut vt = v_hat.to_vec();
        self.truncate(&mut vt);
        let v = physical(grid, vt.clone());
        let vmax = v.iter().fold(0.0f64, |m, x| if x.is_nan() { f64::NAN } else { m.max(x.abs()) });

        let mut out = vec![Complex64::new(0.0, 0.0); vt.len()];
        for axis in 0..grid.dim() {
            let w_hat: Vec<Complex64> = vt
                .iter()
                .zip(&self.grad[axis])
                .map(|(c, &g)| Complex64::new(0.0, g) * c)
                .collect();
            let w = physical(grid, w_hat);
            let flux: Vec<Complex64> = v
                .iter()
                .zip(&w)
                .map(|(a, b)| Complex64::new(a * b, 0.0))
                .collect();
            let flux_hat = spectral(grid, flux);
            for ((o, f), &d) in out.iter_mut().zip(&flux_hat).zip(&self.div[axis]) {
                *o -= Complex64::new(0.0, d) * f;
            }
        }
        self.truncate(&mut out);
        (out, vmax)
    }

    pub fn apply(&self, v: &Field) -> Result<Field> {
        let (out, vmax) = self.apply_spectrum(transform(v).coeffs());
        let field = inverse_transform(&SpectrumField::new(self.grid.clone(), out)?);
        if !vmax.is_finite() || field.values().iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain("non-finite values in nonlinear term (blow-up)".into()));
        }
        Ok(field)
    }
}

fn physical(grid: &SpectralGrid, mut data: Vec<Complex64>) -> Vec<f64> {
    grid.fft_in_place(&mut data, false);
    data.into_iter().map(|z| z.re).collect()
}

fn spectral(grid: &SpectralGrid, mut data: Vec<Complex64>) -> Vec<Complex64> {
    grid.fft_in_place(&mut data, true);
    data
}

/// `−∇·(v ∇K*v)` with optional 2/3-rule dealiasing.
pub fn nonlinear_term(params: &ChemoParams, v: &Field, dealias: bool) -> Result<Field> {
    NonlinearOperator::new(params, v.grid().clone(), dealias).apply(v)
}
