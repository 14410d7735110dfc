//! Bessel potential kernels `B_λ`, the interaction kernel
//! `K = β1 B_{λ1} − β2 B_{λ2}`, and their Fourier multipliers.
//!
//! `B_λ(x) = (4π)^{−n/2} ∫₀^∞ exp(−λσ − |x|²/(4σ)) σ^{−n/2} dσ` is evaluated
//! after the substitution `σ = e^u`, which turns both endpoint singularities
//! into doubly-exponential decay.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::regions::ChemoParams;
use crate::spectral::{Field, SpectralGrid};

/// Fundamental solution of `λ − Δ` in dimension `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselKernel {
    lambda: f64,
    dim: usize,
}

impl BesselKernel {
    pub fn new(lambda: f64, dim: usize) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::InvalidParameter {
                name: "lambda",
                reason: format!("must be > 0, got {lambda}"),
            });
        }
        if dim == 0 {
            return Err(Error::InvalidParameter {
                name: "n",
                reason: "dimension must be >= 1".into(),
            });
        }
        Ok(Self { lambda, dim })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Samples the kernel at the periodic (minimum-image) distance from the
    /// origin of every grid point. For `n ≥ 2` the origin is clamped to
    /// radius `h/10`.
    pub fn sample_on_grid(&self, grid: &Arc<SpectralGrid>, tol: f64, exec: Exec) -> Result<Field> {
        if grid.dim() != self.dim {
            return Err(Error::Config(format!(
                "kernel dimension {} does not match grid dimension {}",
                self.dim,
                grid.dim()
            )));
        }
        let l = grid.length();
        let wrap = |c: f64| if c > 0.5 * l { c - l } else { c };
        let floor = if self.dim >= 2 { grid.spacing() / 10.0 } else { 0.0 };
        let values = exec.map_range(grid.len(), |i| {
            let (x, y) = grid.coordinates(i);
            let r = (wrap(x).powi(2) + wrap(y).powi(2)).sqrt().max(floor);
            bessel_pointwise(self, r, tol)
        });
        Field::new(grid.clone(), values.into_iter().collect::<Result<Vec<_>>>()?)
    }
}

/// `B_λ(|x|)` by adaptive quadrature to absolute tolerance `tol`.
pub fn bessel_pointwise(kernel: &BesselKernel, x_norm: f64, tol: f64) -> Result<f64> {
    let n = kernel.dim as f64;
    let lambda = kernel.lambda;
    if !(x_norm >= 0.0 && x_norm.is_finite()) {
        return Err(Error::Domain(format!("|x| must be finite and >= 0, got {x_norm}")));
    }
    if x_norm == 0.0 && kernel.dim >= 2 {
        return Err(Error::Domain(format!(
            "B_lambda is singular at x = 0 in dimension {}",
            kernel.dim
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be > 0, got {tol}")));
    }
    let x2 = x_norm * x_norm;
    let prefactor = (4.0 * PI).powf(-n / 2.0);
    let log_integrand = move |u: f64| -lambda * u.exp() - 0.25 * x2 * (-u).exp() + (1.0 - 0.5 * n) * u;

    // Cut where the exponent drops below −750 (or, for x = 0 in 1D, where the
    // algebraic tail e^{u/2} integrates to far below tol).
    let u_hi = (750.0 / lambda).ln() + 8.0;
    let u_lo = if x_norm > 0.0 {
        (x2 / 3000.0).ln() - 8.0
    } else {
        2.0 * (tol * 1e-3).ln()
    };
    // Center the first bisection on the integrand's peak.
    let peak = {
        // d/du of the exponent: −λe^u + x²e^{−u}/4 + (1 − n/2) = 0.
        let c = 1.0 - 0.5 * n;
        let e = (c + (c * c + lambda * x2).sqrt()) / (2.0 * lambda);
        if e > 0.0 {
            e.ln().clamp(u_lo, u_hi)
        } else {
            0.5 * (u_lo + u_hi)
        }
    };
    let f = |u: f64| log_integrand(u).exp();
    let inner = tol / prefactor / 2.0;
    let left = crate::quadrature::adaptive_gk15(f, u_lo, peak, inner)?;
    let right = crate::quadrature::adaptive_gk15(f, peak, u_hi, inner)?;
    Ok(prefactor * (left + right))
}

/// `(λ − Δ)^{−1}` multiplier `1/(λ + |ξ|²)`.
pub fn resolvent_multiplier(lambda: f64, xi_sq: f64) -> f64 {
    1.0 / (lambda + xi_sq)
}

/// Multiplier of `K*`: `β1/(λ1 + |ξ|²) − β2/(λ2 + |ξ|²)`.
pub fn k_multiplier(params: &ChemoParams, xi_sq: f64) -> f64 {
    let (b1, b2, l1, l2) = params.coefficients();
    b1 * resolvent_multiplier(l1, xi_sq) - b2 * resolvent_multiplier(l2, xi_sq)
}

/// Components `ξ_j · k(|ξ|²)`; the caller supplies the factor `i`.
pub fn grad_k_multiplier(params: &ChemoParams, xi: &[f64]) -> Vec<f64> {
    let xi_sq: f64 = xi.iter().map(|v| v * v).sum();
    let k = k_multiplier(params, xi_sq);
    xi.iter().map(|v| v * k).collect()
}

/// The interaction kernel `K` in dimension `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteractionKernel {
    pub params: ChemoParams,
    pub dim: usize,
}

impl InteractionKernel {
    pub fn pointwise(&self, x_norm: f64, tol: f64) -> Result<f64> {
        let (b1, b2, l1, l2) = self.params.coefficients();
        let k1 = BesselKernel::new(l1, self.dim)?;
        let k2 = BesselKernel::new(l2, self.dim)?;
        let scale = b1.max(b2);
        Ok(b1 * bessel_pointwise(&k1, x_norm, 0.5 * tol / scale)?
            - b2 * bessel_pointwise(&k2, x_norm, 0.5 * tol / scale)?)
    }

    pub fn multiplier(&self, xi_sq: f64) -> f64 {
        k_multiplier(&self.params, xi_sq)
    }
}
