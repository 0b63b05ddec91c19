//! The pairing operator `L = K + v♯` on truncated Landau pair states.
//!
//! Two-particle states are written in centre-of-mass and relative ladder
//! variables. The pair potential only acts on the relative part, so its matrix
//! elements reduce to one-dimensional radial integrals combined with
//! beam-splitter coefficients.

mod kernel;
mod operator;
mod pair;
mod product;

pub use kernel::{gamma_kernel, k_kernel};
pub use operator::{
    birman_schwinger_value, build_stability_operator, find_tc, lowest_eigenpair, lowest_eigenpair_capped,
    StabilityOperator, TcResult, TcSetup,
};
pub use pair::{beam_splitter, pair_interaction, relative_matrix_element, PairBasis, RelativeInteraction};
pub use product::ProductInteraction;
