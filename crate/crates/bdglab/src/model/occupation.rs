use crate::{Error, Result};

/// Marker type grouping the scalar occupation maps; all maps are free functions.
#[derive(Debug, Clone, Copy, Default)]
pub struct OccupationFunctions;

const CLAMP_TOL: f64 = 1e-12;

/// Fermi-Dirac map `g♯(h) = 1/(e^{2h}+1)`; the caller passes `h/T`.
pub fn g_sharp(h: f64) -> Result<f64> {
    if h.is_nan() {
        return Err(Error::Domain("g_sharp of NaN".into()));
    }
    Ok(g_sharp_raw(h))
}

pub(crate) fn g_sharp_raw(h: f64) -> f64 {
    if h > 0.0 {
        let e = (-2.0 * h).exp();
        e / (1.0 + e)
    } else {
        1.0 / ((2.0 * h).exp() + 1.0)
    }
}

fn clamp_unit(lambda: f64) -> Result<f64> {
    if lambda.is_nan() || lambda < -CLAMP_TOL || lambda > 1.0 + CLAMP_TOL {
        return Err(Error::Domain(format!("occupation {lambda} outside [0, 1]")));
    }
    Ok(lambda.clamp(0.0, 1.0))
}

/// `s(λ) = -λ ln λ`, with `s(0) = 0`.
pub fn s_entropy(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        0.0
    } else {
        -lambda * lambda.ln()
    }
}

/// Entropy density `g(λ) = -½(λ ln λ + (1-λ) ln(1-λ))`.
pub fn entropy_density(lambda: f64) -> Result<f64> {
    let l = clamp_unit(lambda)?;
    Ok(entropy_density_raw(l))
}

pub(crate) fn entropy_density_raw(l: f64) -> f64 {
    if l <= 0.0 || l >= 1.0 {
        return 0.0;
    }
    // ln_1p keeps digits when one of the two terms is tiny.
    0.5 * (s_entropy(l) - (1.0 - l) * (-l).ln_1p())
}

/// `g′(λ) = -½ ln(λ/(1-λ))`, defined on the open interval.
pub fn g_prime(lambda: f64) -> Result<f64> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::Domain(format!("g' needs 0 < λ < 1, got {lambda}")));
    }
    Ok(g_prime_raw(lambda))
}

pub(crate) fn g_prime_raw(l: f64) -> f64 {
    -0.5 * (l.ln() - (-l).ln_1p())
}
