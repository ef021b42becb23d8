//! Periodic-lattice Fourier machinery for six-component photon wave functions.
//!
//! Conventions: k = 2πm/L with m ∈ [−n/2, n/2); sums over the dual lattice carry
//! weight 1/V = Δk³/(2π)³; position multiplication uses box-centered coordinates.

pub mod field;
pub mod fourier;
pub mod grid;
pub mod helicity;
pub mod packets;

pub use field::SixField;
pub use grid::GridSpec;
pub use helicity::{
    berry_connection, decompose, longitudinal_residual, polarization_triad, positive_frequency_project, synthesize,
    translate, transverse_project, HelicitySpectrum, PolarizationTriad, POLE_CONE,
};
