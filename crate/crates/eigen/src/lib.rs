//! Eigenvalue problems solved semi-analytically: plane-wave helicity modes, the
//! z-component of the moment of energy, and bound modes of a step-index fiber.

pub mod boost;
pub mod fiber;
pub mod roots;

pub use boost::{boost_eigenfunction, macdonald_imag, BoostEigenfunction};
pub use fiber::{
    classical_dispersion_determinant, exterior_log_slope, fiber_matching_determinant, fiber_mode_field,
    fiber_mode_residuals, fiber_modes, interface_jump, mode_table_csv, FiberMode, FiberResiduals, FiberSpec,
    RadialSample,
};
pub use roots::{bisect, scan_roots};
