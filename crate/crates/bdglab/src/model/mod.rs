//! Shared model layer: lattice geometry, occupation functions, Landau levels
//! and wavefunctions, pair potentials.

mod geometry;
mod landau;
mod occupation;
mod potential;

pub use geometry::{build_geometry, LatticeGeometry};
pub use landau::{
    landau_levels, landau_wavefunction, laguerre, ln_factorial, pi_psi, psi, LandauBasis,
};
pub use occupation::{entropy_density, g_prime, g_sharp, s_entropy, OccupationFunctions};
pub use potential::{PairPotential, PotentialKind};
pub(crate) use occupation::{entropy_density_raw, g_prime_raw, g_sharp_raw};
