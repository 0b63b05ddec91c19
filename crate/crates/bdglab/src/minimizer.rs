//! Constrained descent of the truncated free energy.
//!
//! Iterates are parametrised by `H = T g'(Γ)`, so `Γ = g♯(H/T)` always lies
//! strictly inside `(0, 1)` and keeps the particle-hole structure. A step moves
//! `H` along the residual `R = Λ - H` and each field coefficient along its
//! preconditioned gradient, with Armijo backtracking on `F_T`.

use crate::free_energy::{
    checked_spectrum, BdGState, FourierField, FreeEnergyModel,
};
use crate::linalg::{herm_apply, herm_eigen, HermEigen};
use crate::model::{g_prime_raw, g_sharp_raw, LatticeGeometry};
use crate::{CMatrix, Error, Result, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ARMIJO_C: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 60;
/// Relative size below which energy differences are integrated along the step.
const ROUNDOFF_REGIME: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DescentConfig {
    pub step_init: f64,
    pub armijo_factor: f64,
    pub max_iters: usize,
    pub grad_tol: f64,
    pub clip_floor: f64,
}

impl Default for DescentConfig {
    fn default() -> Self {
        Self { step_init: 1.0, armijo_factor: 0.5, max_iters: 5000, grad_tol: 1e-8, clip_floor: 1e-12 }
    }
}

impl DescentConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.step_init > 0.0
            && self.armijo_factor > 0.0
            && self.armijo_factor < 1.0
            && self.max_iters > 0
            && self.grad_tol > 0.0
            && self.clip_floor > 0.0
            && self.clip_floor < 0.5;
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!("invalid descent configuration {self:?}")))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinimizeReport {
    pub final_state: BdGState,
    /// Energy after each accepted step, starting with the seed.
    pub energy_trace: Vec<f64>,
    /// `bdg_residual` of the final state.
    pub residuals: (f64, f64),
    pub flux: f64,
    /// `F_min - F_normal`.
    pub comparison_to_normal: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Set when the line search could not decrease the energy any further.
    pub stalled: bool,
    /// Smallest spectral distance of `Γ` from `{0, 1}` at the end.
    pub spectral_distance: f64,
    pub boundary_flag: bool,
    /// Largest deviation of the flux from `n` over all iterates.
    pub max_flux_error: f64,
    /// Largest particle-hole / spectral defect over all iterates.
    pub max_constraint_defect: f64,
    pub alpha_norm: f64,
}

/// Clip the spectrum of `Γ` into `[floor, 1 - floor]`, restore the block
/// structure and project `a'` onto divergence-free modes.
pub fn project_constraints(state: &BdGState, clip_floor: f64) -> Result<BdGState> {
    let block = state.block();
    let e = herm_eigen(&block)?;
    let inside = e.values.iter().all(|&v| v >= clip_floor && v <= 1.0 - clip_floor);
    let mut a = state.a_prime.clone();
    a.project_div_free();
    if inside {
        let mut out = BdGState::from_block(&block, a, state.geometry);
        out.gamma = state.gamma.clone();
        out.alpha = state.alpha.clone();
        return Ok(out);
    }
    let clipped = herm_apply(&block, |v| v.clamp(clip_floor, 1.0 - clip_floor))?;
    // average with the particle-hole image so the spectrum stays symmetric
    Ok(BdGState::from_block(&clipped, a, state.geometry))
}

/// Net flux `(1/2π)∫_Ω curl(a_b + a')` in units of the flux quantum, with the
/// periodic part integrated on a trapezoid grid.
pub fn flux(a_prime: &FourierField, geometry: &LatticeGeometry) -> f64 {
    let [e1, e2] = geometry.lattice_vectors();
    let cut = a_prime.modes.iter().map(|m| m[0].unsigned_abs().max(m[1].unsigned_abs())).max().unwrap_or(0) as usize;
    let n = 2 * cut + 4;
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            let (s, t) = (i as f64 / n as f64, j as f64 / n as f64);
            acc += a_prime.curl([s * e1[0] + t * e2[0], s * e1[1] + t * e2[1]]);
        }
    }
    let periodic = acc * geometry.cell_area / (n * n) as f64;
    (geometry.b * geometry.cell_area + periodic) / (2.0 * std::f64::consts::PI)
}

struct Iterate {
    h: CMatrix,
    eig: HermEigen,
    state: BdGState,
    energy: f64,
}

impl Iterate {
    fn new(model: &FreeEnergyModel, h: CMatrix, a: FourierField) -> Result<Self> {
        let t = model.params.t;
        let eig = herm_eigen(&h)?;
        let block = spectral(&eig, |e| g_sharp_raw(e / t));
        let state = BdGState::from_block(&block, a, model.geometry);
        let energy = model.breakdown(&state)?.total;
        Ok(Self { h, eig, state, energy })
    }

    /// `½ Tr((Λ - H) DΓ[dh]) + Re⟨g_a, dc⟩`.
    fn slope(&self, model: &FreeEnergyModel, dh: &CMatrix, dc: &[[C64; 2]]) -> f64 {
        let t = model.params.t;
        let r = model.lambda(&self.state) - &self.h;
        let u = &self.eig.vectors;
        let rt = u.adjoint() * r * u;
        let dt = u.adjoint() * dh * u;
        let e = &self.eig.values;
        let mut acc = 0.0;
        for i in 0..e.len() {
            for j in 0..e.len() {
                acc += (rt[(j, i)] * dt[(i, j)]).re * divided_difference(e[i], e[j], t);
            }
        }
        let mut out = 0.5 * acc;
        for (g, c) in model.field_gradient(&self.state).iter().zip(dc) {
            out += (g[0].conj() * c[0] + g[1].conj() * c[1]).re;
        }
        out
    }

    fn spectral_distance(&self, t: f64) -> f64 {
        let emax = self.eig.values.iter().fold(0.0f64, |a, e| a.max(e.abs()));
        g_sharp_raw(emax / t)
    }
}

fn spectral(eig: &HermEigen, f: impl Fn(f64) -> f64) -> CMatrix {
    let u = &eig.vectors;
    let mut scaled = u.clone();
    for (j, &v) in eig.values.iter().enumerate() {
        let fv = f(v);
        scaled.column_mut(j).scale_mut(fv);
    }
    scaled * u.adjoint()
}

/// `(g♯(x/T) - g♯(y/T))/(x - y)`, with the derivative on the diagonal.
fn divided_difference(x: f64, y: f64, t: f64) -> f64 {
    if (x - y).abs() <= 1e-9 * (1.0 + x.abs().max(y.abs())) {
        let m = 0.5 * (x + y);
        let f = g_sharp_raw(m / t);
        -2.0 * f * (1.0 - f) / t
    } else {
        (g_sharp_raw(x / t) - g_sharp_raw(y / t)) / (x - y)
    }
}

fn constraint_defect(model: &FreeEnergyModel, it: &Iterate) -> Result<f64> {
    let block = it.state.block();
    let eigs = checked_spectrum(&block)?;
    let raw = spectral(&it.eig, |e| g_sharp_raw(e / model.params.t));
    let eig_defect = eigs.iter().map(|&v| (-v).max(v - 1.0).max(0.0)).fold(0.0, f64::max);
    Ok((raw - block).norm().max(eig_defect))
}

/// Descent direction: residual in `H`, preconditioned field gradient.
fn direction(model: &FreeEnergyModel, it: &Iterate) -> (CMatrix, Vec<[C64; 2]>) {
    let r = model.lambda(&it.state) - &it.h;
    let r = (&r + r.adjoint()) * C64::new(0.5, 0.0);
    let n_tot = it.state.gamma.trace().re;
    let area = model.geometry.cell_area;
    let dc = model
        .field_bracket(&it.state)
        .iter()
        .zip(&it.state.a_prime.wavevectors)
        .map(|(b, k)| {
            let s = area * (k[0] * k[0] + k[1] * k[1]) + n_tot;
            [-b[0] / s, -b[1] / s]
        })
        .collect();
    (r, dc)
}

fn shifted(model: &FreeEnergyModel, it: &Iterate, dh: &CMatrix, dc: &[[C64; 2]], s: f64) -> Result<Iterate> {
    let h = &it.h + dh * C64::new(s, 0.0);
    let mut a = it.state.a_prime.clone();
    for (c, d) in a.coeffs.iter_mut().zip(dc) {
        c[0] += d[0] * s;
        c[1] += d[1] * s;
    }
    a.project_div_free();
    Iterate::new(model, h, a)
}

/// Armijo line search along the descent direction. Returns the accepted
/// iterate and its step, or `None` when no decrease could be certified.
fn line_search(model: &FreeEnergyModel, it: &Iterate, config: &DescentConfig) -> Result<Option<(Iterate, f64)>> {
    let (dh, dc) = direction(model, it);
    let slope = it.slope(model, &dh, &dc);
    if !(slope < 0.0) {
        return Ok(None);
    }
    let scale = it.energy.abs().max(1.0);
    let mut s = config.step_init;
    for _ in 0..MAX_BACKTRACKS {
        let mut next = shifted(model, it, &dh, &dc, s)?;
        let predicted = s * slope;
        let decrease = if predicted.abs() < ROUNDOFF_REGIME * scale {
            // trapezoid rule for the increment; direct differences are below rounding
            let inc = 0.5 * s * (slope + next.slope(model, &dh, &dc));
            next.energy = it.energy + inc;
            inc
        } else {
            next.energy - it.energy
        };
        if decrease <= ARMIJO_C * predicted && next.energy <= it.energy {
            return Ok(Some((next, s)));
        }
        s *= config.armijo_factor;
    }
    Ok(None)
}

fn seed_iterate(model: &FreeEnergyModel, seed: &BdGState, clip: f64) -> Result<Iterate> {
    let t = model.params.t;
    let p = project_constraints(seed, clip)?;
    let h = herm_apply(&p.block(), |v| t * g_prime_raw(v.clamp(clip, 1.0 - clip)))?;
    Iterate::new(model, h, p.a_prime)
}

/// One descent step from a feasible state. The returned energy is `F_T` of the
/// returned state; the state is unchanged when no decrease can be certified.
pub fn descent_step(model: &FreeEnergyModel, state: &BdGState, config: &DescentConfig) -> Result<(BdGState, f64)> {
    config.validate()?;
    let it = seed_iterate(model, state, config.clip_floor)?;
    match line_search(model, &it, config)? {
        Some((next, _)) => {
            let e = model.breakdown(&next.state)?.total;
            Ok((next.state, e))
        }
        None => Ok((it.state, it.energy)),
    }
}

/// Crude lower bound for `F_T` used to detect divergence.
fn energy_floor(model: &FreeEnergyModel, state: &BdGState) -> Result<f64> {
    let d = model.dim();
    let mut hk = model.kinetic_matrix(&state.a_prime);
    for i in 0..d {
        hk[(i, i)] -= C64::new(model.params.mu, 0.0);
    }
    let kin: f64 = herm_eigen(&hk)?.values.iter().map(|&v| v.min(0.0)).sum();
    let g = &model.geometry;
    let vnorm = model.interaction.matrix.norm();
    Ok(g.b * g.b * g.cell_area + kin - vnorm * d as f64 / 4.0 - model.params.t * d as f64 * std::f64::consts::LN_2 / 2.0)
}

/// Descend from `seed` until the combined residual drops below `grad_tol`.
pub fn minimize(model: &FreeEnergyModel, seed: &BdGState, config: &DescentConfig) -> Result<MinimizeReport> {
    config.validate()?;
    let n = model.geometry.n as f64;
    let mut it = seed_iterate(model, seed, config.clip_floor)?;
    let mut trace = vec![it.energy];
    let mut max_flux_error = (flux(&it.state.a_prime, &model.geometry) - n).abs();
    let mut max_defect = constraint_defect(model, &it)?;
    let mut converged = false;
    let mut stalled = false;
    let mut iterations = 0;
    for _ in 0..config.max_iters {
        let (r1, r2) = residual_norms(model, &it);
        if (r1 * r1 + r2 * r2).sqrt() < config.grad_tol {
            converged = true;
            break;
        }
        match line_search(model, &it, config)? {
            Some((next, _)) => {
                it = next;
                iterations += 1;
                trace.push(it.energy);
                max_flux_error = max_flux_error.max((flux(&it.state.a_prime, &model.geometry) - n).abs());
                max_defect = max_defect.max(constraint_defect(model, &it)?);
                if it.energy < energy_floor(model, &it.state)? - 1e-9 {
                    return Err(Error::Inconsistency(format!(
                        "energy {} fell below the coercivity floor",
                        it.energy
                    )));
                }
            }
            None => {
                stalled = true;
                break;
            }
        }
    }
    let normal = model.breakdown(&model.normal_state())?.total;
    let final_energy = model.breakdown(&it.state)?.total;
    let residuals = residual_norms(model, &it);
    let spectral_distance = it.spectral_distance(model.params.t);
    Ok(MinimizeReport {
        alpha_norm: it.state.alpha.norm(),
        flux: flux(&it.state.a_prime, &model.geometry),
        comparison_to_normal: final_energy - normal,
        boundary_flag: spectral_distance <= config.clip_floor,
        spectral_distance,
        final_state: it.state,
        energy_trace: trace,
        residuals,
        iterations,
        converged,
        stalled,
        max_flux_error,
        max_constraint_defect: max_defect,
    })
}

/// Same quantities as [`bdg_residual`], with `T g'(Γ)` replaced by `H`.
fn residual_norms(model: &FreeEnergyModel, it: &Iterate) -> (f64, f64) {
    let r = (model.lambda(&it.state) - &it.h).norm();
    let a: f64 = model.field_bracket(&it.state).iter().map(|c| c[0].norm_sqr() + c[1].norm_sqr()).sum::<f64>().sqrt();
    (r, a / model.geometry.cell_area)
}

/// Normal state plus `amplitude` times the lowest symmetric mode of `L`,
/// projected back into the admissible set. Also returns the mode's eigenvalue.
pub fn seed_state(model: &FreeEnergyModel, amplitude: f64) -> Result<(BdGState, f64)> {
    let (lam, mode) = model.lowest_symmetric_mode()?;
    let mut s = model.normal_state();
    s.alpha = mode * C64::new(amplitude, 0.0);
    Ok((project_constraints(&s, 1e-12)?, lam))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoercivityReport {
    pub c1: f64,
    pub c2: f64,
    /// `(norm, energy)` per sample.
    pub samples: Vec<(f64, f64)>,
    pub violated: bool,
}

/// Size `Tr γ + ‖α‖_F + (Σ (1+|k|²)|c_k|²)^{1/2}` used by [`coercivity_sample`].
pub fn state_norm(state: &BdGState) -> f64 {
    let a: f64 = state
        .a_prime
        .wavevectors
        .iter()
        .zip(&state.a_prime.coeffs)
        .map(|(k, c)| 2.0 * (1.0 + k[0] * k[0] + k[1] * k[1]) * (c[0].norm_sqr() + c[1].norm_sqr()))
        .sum::<f64>()
        .sqrt();
    state.gamma.trace().re + state.alpha.norm() + a
}

/// Sample random feasible states of growing size and fit `F ≥ C₁‖·‖ - C₂`.
pub fn coercivity_sample(model: &FreeEnergyModel, trials: usize, seed: u64) -> Result<CoercivityReport> {
    if trials < 2 {
        return Err(Error::Domain("need at least two trials".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(trials);
    for i in 0..trials {
        let size = 10f64.powf(-2.0 + 3.0 * i as f64 / (trials - 1) as f64);
        let (gamma, alpha) = crate::free_energy::random_ph_state(model.dim(), 1.0 + 4.0 * rng.gen::<f64>(), &mut rng)?;
        let mut a = model.zero_field();
        for c in a.coeffs.iter_mut() {
            *c = [
                C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * size,
                C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * size,
            ];
        }
        a.project_div_free();
        let s = BdGState { gamma, alpha, a_prime: a, geometry: model.geometry };
        let e = model.breakdown(&s)?.total;
        samples.push((state_norm(&s), e));
    }
    let n = samples.len() as f64;
    let mx = samples.iter().map(|p| p.0).sum::<f64>() / n;
    let my = samples.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = samples.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = samples.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let c1 = sxy / sxx;
    let c2 = samples.iter().map(|&(x, y)| c1 * x - y).fold(f64::NEG_INFINITY, f64::max);
    Ok(CoercivityReport { c1, c2, samples, violated: !(c1 > 0.0) })
}
