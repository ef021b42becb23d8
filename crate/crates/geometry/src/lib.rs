//! Photon wave function in curved space and in spinor form.
//!
//! A static metric enters only through the constitutive relation between 𝓕 and 𝒢; the
//! evolution i∂ₜ𝓕 = ρ₃∇×𝒢 uses ordinary derivatives and never mixes helicities.

pub mod curved;
pub mod metric;
pub mod spinor;

pub use curved::{constitutive_apply, curved_generator, divergence_norm, step_curved, validate_curved};
pub use metric::{f_from_g, g_from_f, MetricField, MetricPoint};
pub use spinor::{
    alpha_matrices, dirac_form_step, rotation_spinor, rs_from_spinor, spinor_from_rs, FourSpinor, FourSpinorField,
    SymSpinor2,
};
