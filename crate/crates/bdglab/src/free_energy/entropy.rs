use super::state::BdGState;
use crate::linalg::{herm_apply, herm_eigen};
use crate::model::{entropy_density_raw, s_entropy};
use crate::{CMatrix, Error, Result};

const SPECTRAL_TOL: f64 = 1e-10;

/// Spectrum of a density block, checked against `[0, 1]`.
pub fn checked_spectrum(block: &CMatrix) -> Result<Vec<f64>> {
    let e = herm_eigen(block)?;
    for &v in &e.values {
        if !(v >= -SPECTRAL_TOL && v <= 1.0 + SPECTRAL_TOL) {
            return Err(Error::ConstraintViolation(format!("eigenvalue {v} of Γ outside [0, 1]")));
        }
    }
    Ok(e.values)
}

/// `Tr g(Γ)` over the full `2D × 2D` block.
pub fn entropy_of_block(block: &CMatrix) -> Result<f64> {
    Ok(checked_spectrum(block)?.iter().map(|&v| entropy_density_raw(v.clamp(0.0, 1.0))).sum())
}

/// `S(Γ) = Tr g(Γ)` of a BdG state.
pub fn entropy(state: &BdGState) -> Result<f64> {
    entropy_of_block(&state.block())
}

/// `-Tr Γ ln Γ`, an independent evaluation equal to `Tr g(Γ)` when `Γ` is
/// particle-hole symmetric.
pub fn von_neumann_entropy(block: &CMatrix) -> Result<f64> {
    Ok(checked_spectrum(block)?.iter().map(|&v| s_entropy(v.max(0.0))).sum())
}

/// `Tr A(ln A - ln B)`.
pub fn relative_entropy(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    let sb = herm_eigen(b)?;
    if let Some(&v) = sb.values.iter().find(|&&v| !(v > 0.0 && v < 1.0)) {
        return Err(Error::SingularReference(format!("reference eigenvalue {v} not inside (0, 1)")));
    }
    let sa = checked_spectrum(a)?;
    let a_ln_a: f64 = sa.iter().map(|&v| -s_entropy(v.max(0.0))).sum();
    let ln_b = herm_apply(b, f64::ln)?;
    let cross = (a * ln_b).trace().re;
    Ok(a_ln_a - cross)
}
