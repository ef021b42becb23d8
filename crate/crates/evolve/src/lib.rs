//! Time evolution: exact spectral propagation in vacuum, Hamiltonian stepping in
//! smooth static media, and the medium divergence condition.

pub mod free;
pub mod medium;
pub mod stepper;

pub use free::propagate_free;
pub use medium::{divergence_residual, hamiltonian_apply, hamiltonian_parts, medium_basis_change, MediumMap};
pub use stepper::{step_medium, Scheme, StepperConfig};
