//! Stability analysis and pseudospectral simulation for the
//! attraction–repulsion chemotaxis system around a constant steady state
//! `(A, A/λ1, A/λ2)`.
//!
//! * [`regions`]: closed-form thresholds `A*`, `c*`, `M(A)` and monotonicity.
//! * [`algebra`]: Ferrari/Cardano solution of the critical-point quartic.
//! * [`kernels`]: Bessel potential kernels and their multipliers.
//! * [`spectral`]: periodic grids, unitary transforms, exact propagators.
//! * [`dynamics`]: nonlinear exponential integrators, Picard mild solutions,
//!   rate fitting and the instability experiment.
//! * [`sweep`] and [`raster`]: parallel parameter sweeps and region maps.

pub mod algebra;
pub mod dynamics;
pub mod error;
pub mod exec;
pub mod kernels;
pub mod numfmt;
pub mod quadrature;
pub mod raster;
pub mod regions;
pub mod spectral;
pub mod sweep;

pub use error::{Error, Result};
pub use exec::Exec;
pub use regions::{ChemoParams, Extended, RegionCase, RegionReport};
