//! Periodic-box discretization, unitary transforms and multiplier propagators.

mod field;
mod grid;
pub mod io;
mod packet;
mod propagate;

pub use field::{inverse_transform, lp_norm, transform, Field, SpectrumField};
pub(crate) use field::lp_norm_of;
pub use grid::{make_grid, signed_index, GridSpec, SpectralGrid};
pub use packet::{
    near_eigenfunction_witness, nearest_lattice_wavenumber, spectral_mass_near, wave_packet,
    WitnessReport,
};
pub use propagate::{
    propagate_bounded_part, propagate_heat, propagate_linear, LinearPropagator, EXPONENT_LIMIT,
};
