use super::pair::{beam_splitter, RelativeInteraction};
use crate::model::PairPotential;
use crate::{RMatrix, Result};

/// Pair potential on the product basis `ψ_p ⊗ ψ_q`, `p = (m, k)` with
/// `m ≤ M` and `k < G`, flattened as `p = m·G + k`.
///
/// Entry `[(p, q), (r, s)]` is `⟨ψ_p ⊗ ψ_q, v(x - y) ψ_r ⊗ ψ_s⟩`, row index
/// `p·D + q`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductInteraction {
    pub cutoff: usize,
    pub guiding: usize,
    pub matrix: RMatrix,
}

impl ProductInteraction {
    pub fn build(b: f64, potential: &PairPotential, cutoff: usize, guiding: usize, quad_tol: f64) -> Result<Self> {
        let g = guiding;
        let d = (cutoff + 1) * g;
        let rel = RelativeInteraction::build(b, potential, 2 * cutoff, 2 * (g - 1), quad_tol)?;
        let mut matrix = RMatrix::zeros(d * d, d * d);
        if potential.is_zero() {
            return Ok(Self { cutoff, guiding, matrix });
        }
        let split = |p: usize| (p / g, p % g);
        for row in 0..d * d {
            let (p, q) = (row / d, row % d);
            let ((n1, k1), (n2, k2)) = (split(p), split(q));
            let (nn, kk) = (n1 + n2, k1 + k2);
            for col in row..d * d {
                let (r, s) = (col / d, col % d);
                let ((n3, k3), (n4, k4)) = (split(r), split(s));
                let (nn2, kk2) = (n3 + n4, k3 + k4);
                // total angular momentum
                if kk as i64 - nn as i64 != kk2 as i64 - nn2 as i64 {
                    continue;
                }
                let mut acc = 0.0;
                for nc in 0..=nn.min(nn2) {
                    let cyc = beam_splitter(n1, n2, nc, nn - nc) * beam_splitter(n3, n4, nc, nn2 - nc);
                    if cyc == 0.0 {
                        continue;
                    }
                    for kc in 0..=kk.min(kk2) {
                        let gd = beam_splitter(k1, k2, kc, kk - kc) * beam_splitter(k3, k4, kc, kk2 - kc);
                        if gd == 0.0 {
                            continue;
                        }
                        acc += cyc * gd * rel.get(nn - nc, kk - kc, nn2 - nc, kk2 - kc);
                    }
                }
                matrix[(row, col)] = acc;
                matrix[(col, row)] = acc;
            }
        }
        Ok(Self { cutoff, guiding, matrix })
    }

    pub fn one_particle_dim(&self) -> usize {
        (self.cutoff + 1) * self.guiding
    }

    /// Cyclotron level of one-particle index `p`.
    pub fn level_of(&self, p: usize) -> usize {
        p / self.guiding
    }

    /// Coefficients of pair state `(m, m', c)` as a `D × D` matrix of amplitudes
    /// `α[(m,k), (m',k')]`; `None` when `c ≥ 2G - 1` cannot be represented.
    pub fn pair_state(&self, m1: usize, m2: usize, c: usize) -> Option<Vec<f64>> {
        let g = self.guiding;
        if c > 2 * (g - 1) {
            return None;
        }
        let d = self.one_particle_dim();
        let mut out = vec![0.0; d * d];
        let mut norm = 0.0;
        for k1 in 0..=c.min(g - 1) {
            let k2 = c - k1;
            if k2 >= g {
                continue;
            }
            let u = beam_splitter(k1, k2, 0, c);
            out[(m1 * g + k1) * d + m2 * g + k2] = u;
            norm += u * u;
        }
        ((norm - 1.0).abs() < 1e-12).then_some(out)
    }
}
