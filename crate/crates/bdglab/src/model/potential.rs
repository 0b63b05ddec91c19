//! Radial pair potentials `v(x - y) = v(|x - y|)`.

use crate::{Error, Result};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PotentialKind {
    Gaussian,
    Tabulated,
}

/// A translation-invariant, even pair potential.
///
/// The Gaussian family is `strength * exp(-r²/(2σ²))`. The tabulated family is
/// piecewise linear in `r` between the given nodes and zero beyond the last node.
#[derive(Debug, Clone, PartialEq)]
pub struct PairPotential {
    pub kind: PotentialKind,
    pub strength: f64,
    pub range: f64,
    table: Vec<(f64, f64)>,
}

impl PairPotential {
    pub fn gaussian(strength: f64, range: f64) -> Result<Self> {
        if !(range > 0.0) || !strength.is_finite() {
            return Err(Error::Domain(format!("gaussian needs range > 0 and finite strength, got ({strength}, {range})")));
        }
        Ok(Self { kind: PotentialKind::Gaussian, strength, range, table: Vec::new() })
    }

    /// The zero potential (a Gaussian of zero strength).
    pub fn zero() -> Self {
        Self { kind: PotentialKind::Gaussian, strength: 0.0, range: 1.0, table: Vec::new() }
    }

    /// Piecewise-linear radial table. `strength` scales the table values and
    /// `range` is the last node.
    pub fn tabulated(nodes: &[(f64, f64)], strength: f64) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::Domain("tabulated potential needs at least two nodes".into()));
        }
        if nodes[0].0 != 0.0 {
            return Err(Error::Domain("tabulated potential must start at r = 0".into()));
        }
        for w in nodes.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::Domain("tabulated radii must be strictly increasing".into()));
            }
        }
        if nodes.iter().any(|&(r, v)| !r.is_finite() || !v.is_finite()) {
            return Err(Error::Domain("tabulated potential has non-finite entries".into()));
        }
        Ok(Self {
            kind: PotentialKind::Tabulated,
            strength,
            range: nodes[nodes.len() - 1].0,
            table: nodes.to_vec(),
        })
    }

    pub fn table(&self) -> &[(f64, f64)] {
        &self.table
    }

    pub fn is_zero(&self) -> bool {
        self.strength == 0.0 || (self.kind == PotentialKind::Tabulated && self.table.iter().all(|&(_, v)| v == 0.0))
    }

    /// `v` at radius `r ≥ 0`.
    pub fn radial(&self, r: f64) -> f64 {
        let r = r.abs();
        match self.kind {
            PotentialKind::Gaussian => self.strength * (-r * r / (2.0 * self.range * self.range)).exp(),
            PotentialKind::Tabulated => {
                let t = &self.table;
                if r >= t[t.len() - 1].0 {
                    return 0.0;
                }
                let i = t.partition_point(|&(ri, _)| ri <= r) - 1;
                let (r0, v0) = t[i];
                let (r1, v1) = t[i + 1];
                self.strength * (v0 + (v1 - v0) * (r - r0) / (r1 - r0))
            }
        }
    }

    pub fn value(&self, x: [f64; 2]) -> f64 {
        self.radial(x[0].hypot(x[1]))
    }

    /// `sup |v|`.
    pub fn sup_norm(&self) -> f64 {
        match self.kind {
            PotentialKind::Gaussian => self.strength.abs(),
            PotentialKind::Tabulated => self.table.iter().map(|&(_, v)| (self.strength * v).abs()).fold(0.0, f64::max),
        }
    }

    /// `∫_{ℝ²} v`.
    pub fn vhat0(&self) -> f64 {
        match self.kind {
            PotentialKind::Gaussian => self.strength * 2.0 * PI * self.range * self.range,
            PotentialKind::Tabulated => {
                // exact integral of r·(linear) on each segment
                let mut acc = 0.0;
                for w in self.table.windows(2) {
                    let (r0, v0) = w[0];
                    let (r1, v1) = w[1];
                    let s = (v1 - v0) / (r1 - r0);
                    let c = v0 - s * r0;
                    acc += c * (r1 * r1 - r0 * r0) / 2.0 + s * (r1.powi(3) - r0.powi(3)) / 3.0;
                }
                2.0 * PI * self.strength * acc
            }
        }
    }

    /// Largest radius beyond which `|v| < tol·sup|v|`.
    pub fn effective_radius(&self, tol: f64) -> f64 {
        match self.kind {
            PotentialKind::Gaussian => self.range * (2.0 * (1.0 / tol).ln()).sqrt(),
            PotentialKind::Tabulated => self.range,
        }
    }
}
