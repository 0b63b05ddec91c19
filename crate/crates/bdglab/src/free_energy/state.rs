use crate::linalg::herm_apply;
use crate::model::{g_sharp_raw, LatticeGeometry};
use crate::{CMatrix, Result, C64};
use rand::Rng;

/// Dual-lattice modes `m₁k₁ + m₂k₂` with `|mᵢ| ≤ cutoff`, one of each `±k` pair.
pub fn half_modes(geometry: &LatticeGeometry, cutoff: usize) -> (Vec<[i32; 2]>, Vec<[f64; 2]>) {
    let c = cutoff as i32;
    let [k1, k2] = geometry.dual_vectors();
    let mut modes = Vec::new();
    let mut vecs = Vec::new();
    for m1 in 0..=c {
        for m2 in -c..=c {
            if m1 == 0 && m2 <= 0 {
                continue;
            }
            modes.push([m1, m2]);
            vecs.push([m1 as f64 * k1[0] + m2 as f64 * k2[0], m1 as f64 * k1[1] + m2 as f64 * k2[1]]);
        }
    }
    (modes, vecs)
}

/// Real periodic vector field `a(x) = Σ 2 Re(c_k e^{ik·x})` over a half set of modes.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierField {
    pub modes: Vec<[i32; 2]>,
    pub wavevectors: Vec<[f64; 2]>,
    pub coeffs: Vec<[C64; 2]>,
}

impl FourierField {
    pub fn zero(geometry: &LatticeGeometry, cutoff: usize) -> Self {
        let (modes, wavevectors) = half_modes(geometry, cutoff);
        let coeffs = vec![[C64::new(0.0, 0.0); 2]; modes.len()];
        Self { modes, wavevectors, coeffs }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c[0] == C64::new(0.0, 0.0) && c[1] == C64::new(0.0, 0.0))
    }

    pub fn eval(&self, x: [f64; 2]) -> [f64; 2] {
        let mut out = [0.0; 2];
        for (k, c) in self.wavevectors.iter().zip(&self.coeffs) {
            let e = C64::from_polar(1.0, k[0] * x[0] + k[1] * x[1]);
            out[0] += 2.0 * (c[0] * e).re;
            out[1] += 2.0 * (c[1] * e).re;
        }
        out
    }

    /// `∂₁a₂ - ∂₂a₁`.
    pub fn curl(&self, x: [f64; 2]) -> f64 {
        let mut out = 0.0;
        for (k, c) in self.wavevectors.iter().zip(&self.coeffs) {
            let e = C64::from_polar(1.0, k[0] * x[0] + k[1] * x[1]);
            out += 2.0 * (C64::new(0.0, 1.0) * (k[0] * c[1] - k[1] * c[0]) * e).re;
        }
        out
    }

    /// Cell average of `|a|²`.
    pub fn mean_square(&self) -> f64 {
        self.coeffs.iter().map(|c| 2.0 * (c[0].norm_sqr() + c[1].norm_sqr())).sum()
    }

    /// Cell average of `|curl a|²`.
    pub fn mean_square_curl(&self) -> f64 {
        self.wavevectors
            .iter()
            .zip(&self.coeffs)
            .map(|(k, c)| 2.0 * (k[0] * c[1] - k[1] * c[0]).norm_sqr())
            .sum()
    }

    /// Remove the component of each coefficient along its wavevector.
    pub fn project_div_free(&mut self) {
        for (k, c) in self.wavevectors.iter().zip(self.coeffs.iter_mut()) {
            let kk = k[0] * k[0] + k[1] * k[1];
            let dot = c[0] * k[0] + c[1] * k[1];
            c[0] -= dot * (k[0] / kk);
            c[1] -= dot * (k[1] / kk);
        }
    }

    /// Largest `|k·c_k|/|k|`.
    pub fn divergence_defect(&self) -> f64 {
        self.wavevectors
            .iter()
            .zip(&self.coeffs)
            .map(|(k, c)| (c[0] * k[0] + c[1] * k[1]).norm() / k[0].hypot(k[1]))
            .fold(0.0, f64::max)
    }

    pub fn coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c[0].norm_sqr() + c[1].norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Real periodic scalar `χ(x) = χ₀ + Σ 2 Re(χ_k e^{ik·x})`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub constant: f64,
    pub wavevectors: Vec<[f64; 2]>,
    pub coeffs: Vec<C64>,
}

impl ScalarField {
    pub fn constant(c: f64) -> Self {
        Self { constant: c, wavevectors: Vec::new(), coeffs: Vec::new() }
    }

    pub fn single_mode(geometry: &LatticeGeometry, m: [i32; 2], coeff: C64) -> Self {
        let [k1, k2] = geometry.dual_vectors();
        let k = [m[0] as f64 * k1[0] + m[1] as f64 * k2[0], m[0] as f64 * k1[1] + m[1] as f64 * k2[1]];
        Self { constant: 0.0, wavevectors: vec![k], coeffs: vec![coeff] }
    }

    pub fn eval(&self, x: [f64; 2]) -> f64 {
        self.constant
            + self
                .wavevectors
                .iter()
                .zip(&self.coeffs)
                .map(|(k, c)| 2.0 * (c * C64::from_polar(1.0, k[0] * x[0] + k[1] * x[1])).re)
                .sum::<f64>()
    }

    pub fn grad(&self, x: [f64; 2]) -> [f64; 2] {
        let mut g = [0.0; 2];
        for (k, c) in self.wavevectors.iter().zip(&self.coeffs) {
            let v = 2.0 * (C64::new(0.0, 1.0) * c * C64::from_polar(1.0, k[0] * x[0] + k[1] * x[1]));
            g[0] += k[0] * v.re;
            g[1] += k[1] * v.re;
        }
        g
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.iter().all(|c| c.norm() == 0.0)
    }
}

/// Truncated BdG state `(γ, α, a')` on the product Landau basis.
#[derive(Debug, Clone, PartialEq)]
pub struct BdGState {
    pub gamma: CMatrix,
    pub alpha: CMatrix,
    pub a_prime: FourierField,
    pub geometry: LatticeGeometry,
}

impl BdGState {
    pub fn dim(&self) -> usize {
        self.gamma.nrows()
    }

    /// `Γ = [[γ, α], [α*, 1 - γ̄]]`.
    pub fn block(&self) -> CMatrix {
        gamma_block(&self.gamma, &self.alpha)
    }

    /// Rebuild `(γ, α)` from the top blocks of a `2D × 2D` matrix, restoring
    /// Hermiticity of `γ` and symmetry of `α`.
    pub fn from_block(block: &CMatrix, a_prime: FourierField, geometry: LatticeGeometry) -> Self {
        let d = block.nrows() / 2;
        let g = block.view((0, 0), (d, d)).into_owned();
        let a = block.view((0, d), (d, d)).into_owned();
        // the lower-right block carries the same information as 1 - γ̄
        let lower = block.view((d, d), (d, d)).into_owned();
        let g = (g + (CMatrix::identity(d, d) - lower).conjugate()) * C64::new(0.5, 0.0);
        let lower_left = block.view((d, 0), (d, d)).into_owned();
        let a = (a + lower_left.adjoint()) * C64::new(0.5, 0.0);
        Self {
            gamma: (&g + g.adjoint()) * C64::new(0.5, 0.0),
            alpha: (&a + a.transpose()) * C64::new(0.5, 0.0),
            a_prime,
            geometry,
        }
    }
}

pub fn gamma_block(gamma: &CMatrix, alpha: &CMatrix) -> CMatrix {
    let d = gamma.nrows();
    let mut b = CMatrix::zeros(2 * d, 2 * d);
    b.view_mut((0, 0), (d, d)).copy_from(gamma);
    b.view_mut((0, d), (d, d)).copy_from(alpha);
    b.view_mut((d, 0), (d, d)).copy_from(&alpha.adjoint());
    b.view_mut((d, d), (d, d)).copy_from(&(CMatrix::identity(d, d) - gamma.conjugate()));
    b
}

/// Random particle-hole symmetric block `H = [[A, B], [B̄, -Ā]]` with `A`
/// Hermitian and `B` symmetric, entries of size `scale`.
pub fn random_ph_hamiltonian<R: Rng>(d: usize, scale: f64, rng: &mut R) -> CMatrix {
    let mut a = CMatrix::from_fn(d, d, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * scale);
    a = (&a + a.adjoint()) * C64::new(0.5, 0.0);
    let mut b = CMatrix::from_fn(d, d, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * scale);
    b = (&b + b.transpose()) * C64::new(0.5, 0.0);
    let mut h = CMatrix::zeros(2 * d, 2 * d);
    h.view_mut((0, 0), (d, d)).copy_from(&a);
    h.view_mut((0, d), (d, d)).copy_from(&b);
    h.view_mut((d, 0), (d, d)).copy_from(&b.adjoint());
    h.view_mut((d, d), (d, d)).copy_from(&(-a.conjugate()));
    h
}

/// Random `(γ, α)` with `Γ = g♯(H)` strictly inside `(0, 1)`.
pub fn random_ph_state<R: Rng>(d: usize, scale: f64, rng: &mut R) -> Result<(CMatrix, CMatrix)> {
    let h = random_ph_hamiltonian(d, scale, rng);
    let g = herm_apply(&h, g_sharp_raw)?;
    let gamma = g.view((0, 0), (d, d)).into_owned();
    let alpha = g.view((0, d), (d, d)).into_owned();
    Ok(((&gamma + gamma.adjoint()) * C64::new(0.5, 0.0), (&alpha + alpha.transpose()) * C64::new(0.5, 0.0)))
}
