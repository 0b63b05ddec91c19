use crate::{Error, Result, C64};
use std::f64::consts::PI;

/// Magnetic lattice `δ⁻¹(ℤ + τℤ)` carrying `n` flux quanta per cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeGeometry {
    pub delta: f64,
    pub tau: C64,
    pub n: u32,
    pub cell_area: f64,
    pub b: f64,
}

/// Validate inputs and derive the cell area and field strength.
pub fn build_geometry(delta: f64, tau: C64, n: u32) -> Result<LatticeGeometry> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::InvalidGeometry(format!("delta must be positive, got {delta}")));
    }
    if !(tau.im > 0.0) || !tau.re.is_finite() || !tau.im.is_finite() {
        return Err(Error::InvalidGeometry(format!("Im tau must be positive, got {}", tau.im)));
    }
    if n < 1 {
        return Err(Error::InvalidGeometry("flux integer n must be at least 1".into()));
    }
    let cell_area = tau.im / (delta * delta);
    let b = 2.0 * PI * n as f64 / cell_area;
    Ok(LatticeGeometry { delta, tau, n, cell_area, b })
}

impl LatticeGeometry {
    /// Geometry with the given field strength, keeping `τ` and `n`.
    pub fn with_field(b: f64, tau: C64, n: u32) -> Result<Self> {
        if !(b > 0.0) {
            return Err(Error::InvalidGeometry(format!("field must be positive, got {b}")));
        }
        let delta = (b * tau.im / (2.0 * PI * n as f64)).sqrt();
        build_geometry(delta, tau, n)
    }

    /// Lattice basis vectors `δ⁻¹·1` and `δ⁻¹·τ`.
    pub fn lattice_vectors(&self) -> [[f64; 2]; 2] {
        let s = 1.0 / self.delta;
        [[s, 0.0], [s * self.tau.re, s * self.tau.im]]
    }

    /// Dual basis `k_i` with `k_i · e_j = 2π δ_ij`.
    pub fn dual_vectors(&self) -> [[f64; 2]; 2] {
        let [e1, e2] = self.lattice_vectors();
        let det = e1[0] * e2[1] - e1[1] * e2[0];
        let f = 2.0 * PI / det;
        [[f * e2[1], -f * e2[0]], [-f * e1[1], f * e1[0]]]
    }

    /// Magnetic length squared `1/b`.
    pub fn magnetic_length_sq(&self) -> f64 {
        1.0 / self.b
    }
}
