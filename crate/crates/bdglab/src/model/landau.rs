//! Landau levels and full-plane symmetric-gauge eigenfunctions of `-Δ_{a_b}` with
//! `a_b(x) = (b/2)(-x₂, x₁)`.
//!
//! `ψ_{n,k}` carries cyclotron index `n` (level, energy `b(2n+1)`) and guiding
//! index `k ≥ 0`; its angular momentum is `l = k - n`. Radial parts are real.

use super::geometry::LatticeGeometry;
use crate::{Error, Result, C64};
use std::f64::consts::PI;

/// Retained Landau levels `λ_m = b(2m+1)`, `m = 0..=M`.
#[derive(Debug, Clone, PartialEq)]
pub struct LandauBasis {
    pub geometry: LatticeGeometry,
    pub cutoff: usize,
    pub levels: Vec<f64>,
    pub degeneracy_per_cell: u32,
}

pub fn landau_levels(geometry: &LatticeGeometry, cutoff: usize) -> LandauBasis {
    let b = geometry.b;
    LandauBasis {
        geometry: *geometry,
        cutoff,
        levels: (0..=cutoff).map(|m| b * (2 * m + 1) as f64).collect(),
        degeneracy_per_cell: geometry.n,
    }
}

impl LandauBasis {
    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn with_cutoff(&self, cutoff: usize) -> LandauBasis {
        landau_levels(&self.geometry, cutoff)
    }
}

/// `ln n!` by direct summation (indices here stay in the hundreds).
pub fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

/// Generalised Laguerre polynomial `L_n^{(α)}(x)` by the three-term recurrence.
pub fn laguerre(n: usize, alpha: f64, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut l0 = 1.0;
    let mut l1 = 1.0 + alpha - x;
    for k in 1..n {
        let kf = k as f64;
        let l2 = ((2.0 * kf + 1.0 + alpha - x) * l1 - (kf + alpha) * l0) / (kf + 1.0);
        l0 = l1;
        l1 = l2;
    }
    l1
}

/// `ψ_{n,k}(x)` for field strength `b`.
pub fn psi(n: usize, k: usize, b: f64, x: [f64; 2]) -> C64 {
    let scale = (0.5 * b).sqrt();
    let wr = scale * x[0];
    let wi = scale * x[1];
    let s = wr * wr + wi * wi;
    let (lo, hi) = if k >= n { (n, k) } else { (k, n) };
    let p = hi - lo;
    let lag = laguerre(lo, p as f64, s);
    if lag == 0.0 {
        return C64::new(0.0, 0.0);
    }
    let radial_pow = if p == 0 {
        0.0
    } else if s == 0.0 {
        return C64::new(0.0, 0.0);
    } else {
        0.5 * p as f64 * s.ln()
    };
    let ln_mag = 0.5 * (b / (2.0 * PI)).ln() + 0.5 * (ln_factorial(lo) - ln_factorial(hi)) + radial_pow
        - 0.5 * s;
    let mag = ln_mag.exp() * lag;
    let theta = wi.atan2(wr);
    if k >= n {
        // w^{k-n}
        C64::from_polar(mag, p as f64 * theta)
    } else {
        // (-1)^{n-k} w̄^{n-k}
        let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
        C64::from_polar(sign * mag, -(p as f64) * theta)
    }
}

/// Components of `Π ψ_{n,k}` with `Π = -i∇ - a_b`.
pub fn pi_psi(n: usize, k: usize, b: f64, x: [f64; 2]) -> [C64; 2] {
    let c = (0.5 * b).sqrt();
    let up = psi(n + 1, k, b, x) * ((n + 1) as f64).sqrt();
    let down = if n > 0 { psi(n - 1, k, b, x) * (n as f64).sqrt() } else { C64::new(0.0, 0.0) };
    let i = C64::new(0.0, 1.0);
    [-i * c * (up - down), c * (up + down)]
}

/// Normalised symmetric-gauge Landau function of level `m` and angular index `l ≥ -m`.
pub fn landau_wavefunction(m: usize, l: i64, b: f64, x: [f64; 2]) -> Result<C64> {
    if l < -(m as i64) {
        return Err(Error::Domain(format!("angular index {l} below -{m}")));
    }
    if !(b > 0.0) {
        return Err(Error::Domain(format!("field must be positive, got {b}")));
    }
    let k = (m as i64 + l) as usize;
    Ok(psi(m, k, b, x))
}
