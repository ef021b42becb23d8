//! Phase-space and hydrodynamic descriptions of a single-helicity photon wave function.
//!
//! Internal units have c = 1.

pub mod hydro;
pub mod wigner;

pub use hydro::{
    berry_curvature_term, hydro_evolution_residual, hydro_from_field, hydro_identity_residuals, quantization_integral,
    HydroIdentities, HydroResiduals, HydroState, LatticePatch,
};
pub use wigner::{
    join_hermitian, quarter_band_limit, split_hermitian, wigner_build, wigner_decompose, wigner_fiber,
    wigner_fiber_six, wigner_reduced_step, wigner_subsidiary_residual, WignerDecomp, WignerField, WignerFiber,
};
