//! Nonlinear evolution of the perturbation `v = u − A`:
//! `∂t v = Δv − AΔK*v − ∇·(v∇K*v)`.

mod experiment;
mod fit;
mod integrate;
mod nonlinear;
mod picard;

pub use experiment::{instability_experiment, InstabilityConfig, InstabilityReport};
pub use fit::{fit_rate, least_squares, FitMode, RateFit};
pub use integrate::{integrate, integrate_observed, norm_label, Scheme, SimConfig, TimeSeries, BLOW_UP_LEVEL};
pub use nonlinear::{nonlinear_term, NonlinearOperator};
pub use picard::{
    picard_mild_solution, ExecChoice, PicardOptions, PicardSolution, DEFAULT_PICARD_ITERATIONS,
    DEFAULT_PICARD_NODES,
};
