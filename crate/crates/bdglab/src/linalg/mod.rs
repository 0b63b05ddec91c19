//! Dense eigensolvers, Hermitian functional calculus and quadrature rules.

mod eigen;
mod hermitian;
pub mod quadrature;

pub use eigen::{sym_eigen, SymEigen, DEFAULT_DIMENSION_CAP};
pub use hermitian::{embed, extract, herm_apply, herm_eigen, HermEigen};
