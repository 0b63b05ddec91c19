//! Numerical laboratory for the stationary Bogoliubov-de Gennes equations of a
//! superconductor in a constant magnetic field.
//!
//! The crate is organised bottom-up:
//!
//! * [`model`]: lattice geometry, Landau levels and wavefunctions, occupation
//!   functions and pair potentials.
//! * [`normal`]: the self-consistent shift of magnetically translation invariant
//!   normal states.
//! * [`stability`]: the pairing operator `L = K + v#` on Landau pair states, its
//!   lowest eigenvalue, the Birman-Schwinger test and critical temperatures.
//! * [`free_energy`]: truncated BdG states, the free energy, entropies, residuals
//!   and Hessians.
//! * [`minimizer`]: constrained descent of the free energy.
//! * [`linalg`]: the dense symmetric eigensolver and quadrature rules used above.

pub mod error;
pub mod free_energy;
pub mod linalg;
pub mod minimizer;
pub mod model;
pub mod normal;
pub mod stability;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
/// Dense complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;
/// Dense real matrix.
pub type RMatrix = nalgebra::DMatrix<f64>;
