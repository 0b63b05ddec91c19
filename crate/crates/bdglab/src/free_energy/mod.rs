//! The BdG free energy on truncated states: energy terms, entropies, residuals
//! of the stationarity equations, and second-order expansions.

mod checks;
mod entropy;
mod model;
mod state;

pub use checks::{expansion_check, gauge_invariance_check, ExpansionReport};
pub use entropy::{checked_spectrum, entropy, entropy_of_block, relative_entropy, von_neumann_entropy};
pub use model::{
    admissibility_check, bdg_residual, entropy_hessian_gamma, free_energy, quadratic_entropy_form_alpha,
    random_admissible_alpha,
    FreeEnergyBreakdown, FreeEnergyModel, FreeEnergyParams, ReferenceState,
};
pub use state::{
    gamma_block, half_modes, random_ph_hamiltonian, random_ph_state, BdGState, FourierField, ScalarField,
};
