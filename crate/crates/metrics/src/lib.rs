//! Observables of the photon wave function.
//!
//! Two scalar products are used. The energy product ⟨a|b⟩ = (1/V) Σ_k â†b̂/|k|
//! gives photon number; in coordinate space it is the nonlocal
//! (1/2π²)∬ a†(r)|r−r′|⁻²b(r′). The plain L² product ∫a†b is the energy.

pub mod densities;
pub mod direct;
pub mod generators;
pub mod kernels;
pub mod observables;

pub use densities::{energy_density, energy_probability, landau_peierls, k_power, Region};
pub use direct::{direct_scalar_product, DIRECT_MAX_POINTS};
pub use generators::{commutator_residual, expected_commutator, generator_apply, CommutatorExpectation, GeneratorTag};
pub use kernels::{kernel_identity_check, newton_wigner_kernel, KernelQuadrature};
pub use observables::{
    classical_observables, observables_coordinate, observables_momentum, photon_number, scalar_product_coordinate,
    scalar_product_momentum, Observables, ProductMethod,
};
