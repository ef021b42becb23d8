//! Point-level Riemann–Silberstein algebra: six-component values, spin-1 and ρ
//! matrices, field invariants, Lorentz and duality transforms, and the
//! Bessel-family special functions used by the mode solvers.

pub mod error;
pub mod special;
pub mod spin;
pub mod transforms;
pub mod types;

pub use error::{Error, Result};
pub use spin::{apply_s, levi_civita, SpinMatrices};
pub use transforms::{conjugate, duality_rotate, fields_from_rs, invariants, lorentz_boost, rotate, rs_from_fields};
pub use types::{c, dot_h, dot_u, norm_sqr, to_complex, FieldInvariants, RSPair, SixVector, Vec3C, Vec3R, C64, I};
