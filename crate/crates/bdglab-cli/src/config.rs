//! Run configuration: a single JSON document, validated on load.

use bdglab::minimizer::DescentConfig;
use bdglab::model::{build_geometry, LatticeGeometry, PairPotential};
use bdglab::C64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::Path;

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub delta: f64,
    pub tau: [f64; 2],
    pub n: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicsConfig {
    #[serde(rename = "T")]
    pub t: f64,
    pub mu: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PotentialKindConfig {
    Gaussian,
    Tabulated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialConfig {
    pub kind: PotentialKindConfig,
    pub strength: f64,
    /// Gaussian width; ignored for tables.
    #[serde(default = "one")]
    pub range: f64,
    /// `(r, v(r)/strength)` nodes of a tabulated radial profile.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<[f64; 2]>>,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct TruncationConfig {
    #[serde(rename = "M")]
    pub m: usize,
    pub channel_cutoff: usize,
    pub fourier_cutoff: usize,
    pub quad_tol: f64,
    /// Guiding-centre states per level in the free-energy basis.
    #[serde(default = "default_guiding")]
    pub guiding_states: usize,
    /// Gauss-Hermite order per axis for free-energy quadrature.
    #[serde(default = "default_quad_order")]
    pub quad_order: usize,
}

fn default_guiding() -> usize {
    3
}

fn default_quad_order() -> usize {
    32
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct StabilityConfig {
    pub e_grid: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct TcConfig {
    #[serde(rename = "Trange")]
    pub t_range: [f64; 2],
    pub tol: f64,
    /// Field strengths; defaults to the configured geometry's `b`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_grid: Option<Vec<f64>>,
    #[serde(default = "default_scan")]
    pub scan_points: usize,
}

fn default_scan() -> usize {
    12
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct ExpansionConfig {
    pub epsilons: Vec<f64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_samples() -> usize {
    5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct DescentSection {
    #[serde(default = "default_step")]
    pub step_init: f64,
    #[serde(default = "default_armijo")]
    pub armijo_factor: f64,
    #[serde(default = "default_iters")]
    pub max_iters: usize,
    #[serde(default = "default_grad_tol")]
    pub grad_tol: f64,
    #[serde(default = "default_clip")]
    pub clip_floor: f64,
    /// Amplitude of the lowest pairing mode added to the normal seed.
    #[serde(default = "default_amp")]
    pub seed_amplitude: f64,
    /// Amplitude of seeded random α noise.
    #[serde(default)]
    pub noise: f64,
}

fn default_step() -> f64 {
    1.0
}
fn default_armijo() -> f64 {
    0.5
}
fn default_iters() -> usize {
    5000
}
fn default_grad_tol() -> f64 {
    1e-8
}
fn default_clip() -> f64 {
    1e-12
}
fn default_amp() -> f64 {
    0.05
}

impl Default for DescentSection {
    fn default() -> Self {
        Self {
            step_init: default_step(),
            armijo_factor: default_armijo(),
            max_iters: default_iters(),
            grad_tol: default_grad_tol(),
            clip_floor: default_clip(),
            seed_amplitude: default_amp(),
            noise: 0.0,
        }
    }
}

impl DescentSection {
    pub fn descent_config(&self) -> DescentConfig {
        DescentConfig {
            step_init: self.step_init,
            armijo_factor: self.armijo_factor,
            max_iters: self.max_iters,
            grad_tol: self.grad_tol,
            clip_floor: self.clip_floor,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepCommand {
    Normal,
    Stability,
    TcCurve,
    Expansion,
    Minimize,
}

impl SweepCommand {
    pub fn name(self) -> &'static str {
        match self {
            Self::Normal => "normal",
            Self::Stability => "stability",
            Self::TcCurve => "tc-curve",
            Self::Expansion => "expansion",
            Self::Minimize => "minimize",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub command: SweepCommand,
    #[serde(rename = "T", default, skip_serializing_if = "Option::is_none")]
    pub t: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strength: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub geometry: GeometryConfig,
    pub physics: PhysicsConfig,
    pub potential: PotentialConfig,
    pub truncation: TruncationConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stability: Option<StabilityConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tc: Option<TcConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expansion: Option<ExpansionConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub descent: Option<DescentSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub seed: u64,
}

fn positive(name: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!("{name} must be positive and finite, got {v}")))
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// SHA-256 of the canonical (key-sorted, compact) JSON form.
    pub fn hash(&self) -> String {
        let value = serde_json::to_value(self).expect("config serializes");
        let text = serde_json::to_string(&value).expect("value serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.geometry()?;
        self.pair_potential()?;
        let p = &self.physics;
        if !(p.t >= 0.0 && p.t.is_finite()) || !p.mu.is_finite() {
            return Err(CliError::Config(format!("need T >= 0 and finite mu, got ({}, {})", p.t, p.mu)));
        }
        let tr = &self.truncation;
        positive("truncation.quadTol", tr.quad_tol)?;
        if tr.guiding_states == 0 || tr.quad_order < 4 {
            return Err(CliError::Config("need guidingStates >= 1 and quadOrder >= 4".into()));
        }
        if let Some(s) = &self.stability {
            for &e in &s.e_grid {
                positive("stability.eGrid entry", e)?;
            }
        }
        if let Some(tc) = &self.tc {
            positive("tc.tol", tc.tol)?;
            positive("tc.Trange[0]", tc.t_range[0])?;
            if tc.t_range[1] <= tc.t_range[0] {
                return Err(CliError::Config("tc.Trange must be increasing".into()));
            }
            if tc.scan_points < 2 {
                return Err(CliError::Config("tc.scanPoints must be at least 2".into()));
            }
            for &b in tc.b_grid.iter().flatten() {
                positive("tc.bGrid entry", b)?;
            }
        }
        if let Some(e) = &self.expansion {
            if e.epsilons.len() < 3 {
                return Err(CliError::Config("expansion.epsilons needs at least three values".into()));
            }
            for &x in &e.epsilons {
                positive("expansion.epsilons entry", x)?;
            }
        }
        if let Some(d) = &self.descent {
            d.descent_config().validate().map_err(|e| CliError::Config(e.to_string()))?;
            if !(d.seed_amplitude >= 0.0) || !(d.noise >= 0.0) {
                return Err(CliError::Config("seed amplitudes must be non-negative".into()));
            }
        }
        if let Some(s) = &self.sweep {
            for &t in s.t.iter().flatten() {
                if !(t >= 0.0) {
                    return Err(CliError::Config(format!("sweep.T entry must be >= 0, got {t}")));
                }
            }
            for &b in s.b.iter().flatten() {
                positive("sweep.b entry", b)?;
            }
        }
        Ok(())
    }

    pub fn geometry(&self) -> Result<LatticeGeometry, CliError> {
        let g = &self.geometry;
        build_geometry(g.delta, C64::new(g.tau[0], g.tau[1]), g.n).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn pair_potential(&self) -> Result<PairPotential, CliError> {
        let p = &self.potential;
        let v = match p.kind {
            PotentialKindConfig::Gaussian => {
                if p.table.is_some() {
                    return Err(CliError::Config("a gaussian potential takes no table".into()));
                }
                if p.strength == 0.0 {
                    Ok(PairPotential::zero())
                } else {
                    PairPotential::gaussian(p.strength, p.range)
                }
            }
            PotentialKindConfig::Tabulated => {
                let nodes: Vec<(f64, f64)> = p
                    .table
                    .as_ref()
                    .ok_or_else(|| CliError::Config("a tabulated potential needs a table".into()))?
                    .iter()
                    .map(|n| (n[0], n[1]))
                    .collect();
                PairPotential::tabulated(&nodes, p.strength)
            }
        };
        v.map_err(|e| CliError::Config(e.to_string()))
    }

    /// Copy with the field strength changed at fixed `τ` and `n`.
    pub fn with_field(&self, b: f64) -> RunConfig {
        let mut c = self.clone();
        let im = c.geometry.tau[1];
        c.geometry.delta = (b * im / (2.0 * std::f64::consts::PI * c.geometry.n as f64)).sqrt();
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"{
        "geometry": {"delta": 1.0, "tau": [0.0, 1.0], "n": 1},
        "physics": {"T": 0.5, "mu": 7.0},
        "potential": {"kind": "gaussian", "strength": -1.0, "range": 1.0},
        "truncation": {"M": 2, "channelCutoff": 4, "fourierCutoff": 1, "quadTol": 1e-10},
        "seed": 3
    }"#;

    #[test]
    fn parses_and_round_trips() {
        let c = RunConfig::from_json(BASE).unwrap();
        assert_eq!(c.truncation.guiding_states, 3);
        let again = RunConfig::from_json(&c.to_json()).unwrap();
        assert_eq!(c, again);
        assert_eq!(c.hash(), again.hash());
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        let extra = BASE.replace("\"seed\": 3", "\"seed\": 3, \"colour\": 1");
        assert!(matches!(RunConfig::from_json(&extra), Err(CliError::Config(_))));
        let bad = BASE.replace("\"quadTol\": 1e-10", "\"quadTol\": -1");
        assert!(matches!(RunConfig::from_json(&bad), Err(CliError::Config(_))));
        let bad = BASE.replace("\"tau\": [0.0, 1.0]", "\"tau\": [0.0, -1.0]");
        assert!(matches!(RunConfig::from_json(&bad), Err(CliError::Config(_))));
    }

    #[test]
    fn hash_depends_on_content() {
        let a = RunConfig::from_json(BASE).unwrap();
        let mut b = a.clone();
        b.physics.t = 0.25;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }

    #[test]
    fn field_override_keeps_flux() {
        let a = RunConfig::from_json(BASE).unwrap();
        let g = a.with_field(3.0).geometry().unwrap();
        assert!((g.b - 3.0).abs() < 1e-12);
    }
}
