//! Magnetically translation invariant normal states.
//!
//! Such a state is diagonal in the Landau basis with occupations
//! `f_m = g♯((λ_m - μ + ξ)/T)`, where the scalar shift `ξ` solves `ξ = f_T(ξ)`.

use crate::linalg::quadrature::integrate;
use crate::model::{g_sharp_raw, pi_psi, psi, LandauBasis, PairPotential};
use crate::{Error, Result, C64};

/// Tail threshold for the level sum.
pub const TAIL_TOL: f64 = 1e-14;
const REL_CHANGE_TOL: f64 = 1e-13;
const MAX_CUTOFF: usize = 1 << 22;

/// A solved normal state.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalState {
    pub xi: f64,
    pub t: f64,
    pub mu: f64,
    pub basis: LandauBasis,
    pub occupations: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
    /// Largest sampled difference quotient of `f_T`.
    pub lipschitz: f64,
    /// Geometric mean of successive Picard step ratios.
    pub observed_ratio: f64,
    pub warnings: Vec<String>,
}

impl NormalState {
    /// Spectrum of `h_Tb` on level `m`: `λ_m - μ + ξ`.
    pub fn shifted_level(&self, m: usize) -> f64 {
        self.basis.geometry.b * (2 * m + 1) as f64 - self.mu + self.xi
    }

    /// `f_m`, evaluated directly for levels beyond the stored cutoff.
    pub fn occupation(&self, m: usize) -> f64 {
        match self.occupations.get(m) {
            Some(&f) => f,
            None => occupation_at(self.shifted_level(m), self.t),
        }
    }

    /// The state with `ξ` and occupations rebuilt for a different potential-free
    /// shift; used to build reference states.
    pub fn with_shift(&self, xi: f64) -> NormalState {
        let mut s = self.clone();
        s.xi = xi;
        s.occupations = (0..s.occupations.len()).map(|m| occupation_at(s.shifted_level(m), s.t)).collect();
        s
    }
}

/// `g♯(h/T)` with the step limit at `T = 0`.
pub fn occupation_at(h: f64, t: f64) -> f64 {
    if t > 0.0 {
        g_sharp_raw(h / t)
    } else if h < 0.0 {
        1.0
    } else if h > 0.0 {
        0.0
    } else {
        0.5
    }
}

/// The coefficients of the small-temperature expansion of `ξ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XiAsymptotics {
    pub b_coef: f64,
    pub leading: f64,
    pub exponential: f64,
}

impl XiAsymptotics {
    pub fn total(&self) -> f64 {
        self.leading + self.exponential
    }
}

/// `B = v̂(0)(Im τ)²/(4π)`.
pub fn interaction_constant(basis: &LandauBasis, potential: &PairPotential) -> f64 {
    let im = basis.geometry.tau.im;
    potential.vhat0() * im * im / (4.0 * std::f64::consts::PI)
}

fn prefactor(basis: &LandauBasis, potential: &PairPotential) -> f64 {
    let g = &basis.geometry;
    g.n as f64 * g.delta * g.delta * potential.vhat0() * g.tau.im
}

/// `n δ² v̂(0) Im τ Σ_{m ≤ M} g♯((b(2m+1) - μ + ξ)/T)` on the retained levels.
pub fn landau_sum_ft(xi: f64, t: f64, mu: f64, basis: &LandauBasis, potential: &PairPotential) -> Result<f64> {
    if t < 0.0 || t.is_nan() {
        return Err(Error::Domain(format!("temperature must be non-negative, got {t}")));
    }
    let pre = prefactor(basis, potential);
    if pre == 0.0 {
        return Ok(0.0);
    }
    let b = basis.geometry.b;
    let tail = occupation_at(b * (2 * basis.cutoff + 1) as f64 - mu + xi, t);
    if tail >= TAIL_TOL {
        return Err(Error::TailNotConverged { cutoff: basis.cutoff, tail });
    }
    Ok(pre * level_sum(xi, t, mu, b, basis.cutoff))
}

fn level_sum(xi: f64, t: f64, mu: f64, b: f64, cutoff: usize) -> f64 {
    (0..=cutoff).map(|m| occupation_at(b * (2 * m + 1) as f64 - mu + xi, t)).sum()
}

/// Smallest cutoff `M ≥ start` (grown geometrically) meeting the tail and
/// relative-change criteria at `ξ`.
pub fn adaptive_cutoff(xi: f64, t: f64, mu: f64, b: f64, start: usize) -> Result<usize> {
    let mut m = start.max(1);
    let mut prev = level_sum(xi, t, mu, b, m);
    loop {
        let tail = occupation_at(b * (2 * m + 1) as f64 - mu + xi, t);
        let next_m = m * 2;
        if next_m > MAX_CUTOFF {
            return Err(Error::TailNotConverged { cutoff: m, tail });
        }
        let next = level_sum(xi, t, mu, b, next_m);
        let rel = if next == 0.0 { 0.0 } else { ((next - prev) / next).abs() };
        if tail < TAIL_TOL && rel < REL_CHANGE_TOL {
            return Ok(m);
        }
        m = next_m;
        prev = next;
    }
}

/// Closed form of `TB ∫_{(ξ-μ)/T}^∞ g♯(y) dy`.
pub fn continuum_ft(xi: f64, t: f64, mu: f64, b_coef: f64) -> f64 {
    if t <= 0.0 {
        return b_coef * (mu - xi).max(0.0);
    }
    let u = 2.0 * (xi - mu) / t;
    // ln(e^u + 1) - u = ln(1 + e^{-u})
    let soft = if u > 0.0 { (-u).exp().ln_1p() } else { -u + u.exp().ln_1p() };
    t * b_coef * 0.5 * soft
}

/// Leading terms of `ξ` as `T → 0`.
pub fn xi_asymptotic(t: f64, mu: f64, b_coef: f64) -> Result<XiAsymptotics> {
    if !(b_coef.abs() < 1.0) {
        return Err(Error::OutOfRegime(format!("|B| = {} is not below 1", b_coef.abs())));
    }
    if t < 0.0 || !(mu > 0.0) {
        return Err(Error::Domain(format!("need T >= 0 and mu > 0, got T = {t}, mu = {mu}")));
    }
    let leading = b_coef * mu / (1.0 + b_coef);
    let exponential = if t == 0.0 || b_coef == 0.0 {
        0.0
    } else {
        0.5 * t * b_coef * (-2.0 * mu / ((1.0 + b_coef) * t)).exp()
    };
    Ok(XiAsymptotics { b_coef, leading, exponential })
}

/// Options for [`solve_xi_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub start: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { tol: 1e-13, max_iter: 500, start: 0.0 }
    }
}

/// Solve `ξ = f_T(ξ)` from `ξ₀ = 0`.
pub fn solve_xi(
    t: f64,
    mu: f64,
    basis: &LandauBasis,
    potential: &PairPotential,
    tol: f64,
    max_iter: usize,
) -> Result<NormalState> {
    solve_xi_with(t, mu, basis, potential, SolveOptions { tol, max_iter, start: 0.0 })
}

pub fn solve_xi_with(
    t: f64,
    mu: f64,
    basis: &LandauBasis,
    potential: &PairPotential,
    opts: SolveOptions,
) -> Result<NormalState> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::Domain(format!("temperature must be non-negative, got {t}")));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::Domain("tolerance must be positive".into()));
    }
    let geom = basis.geometry;
    let b = geom.b;
    let pre = prefactor(basis, potential);
    let b_coef = interaction_constant(basis, potential);
    let mut warnings = Vec::new();

    if t == 0.0 {
        let xi = if pre == 0.0 { 0.0 } else { xi_asymptotic(0.0, mu, b_coef)?.leading };
        let cutoff = basis.cutoff.max(((mu - xi) / (2.0 * b)).ceil().max(0.0) as usize + 1);
        let out = basis.with_cutoff(cutoff);
        let occupations = (0..=cutoff).map(|m| occupation_at(b * (2 * m + 1) as f64 - mu + xi, 0.0)).collect();
        return Ok(NormalState {
            xi,
            t,
            mu,
            basis: out,
            occupations,
            residual: 0.0,
            iterations: 0,
            lipschitz: 0.0,
            observed_ratio: 0.0,
            warnings: vec!["T = 0: step-function occupations with the leading asymptotic shift".into()],
        });
    }
    if geom.delta * geom.delta / t >= 1.0 {
        warnings.push(format!("delta^2/T = {:.3e} is not small", geom.delta * geom.delta / t));
    }

    let f = |xi: f64| -> Result<(f64, usize)> {
        let m = adaptive_cutoff(xi, t, mu, b, basis.cutoff)?;
        Ok((pre * level_sum(xi, t, mu, b, m), m))
    };

    let (xi, iterations, residual, observed_ratio, lo, hi) = if pre == 0.0 {
        (0.0, 0, 0.0, 0.0, 0.0, 0.0)
    } else {
        let mut xi = opts.start;
        let mut lo = xi;
        let mut hi = xi;
        let mut steps: Vec<f64> = Vec::new();
        let mut history = vec![xi];
        let mut converged = None;
        for it in 1..=opts.max_iter {
            let (fx, _) = f(xi)?;
            let step = (fx - xi).abs();
            steps.push(step);
            let mut next = fx;
            history.push(fx);
            // Aitken on three consecutive Picard iterates once the steps slow down.
            if history.len() >= 3 && steps.len() >= 2 && steps[steps.len() - 1] > 0.5 * steps[steps.len() - 2] {
                let n = history.len();
                let (x0, x1, x2) = (history[n - 3], history[n - 2], history[n - 1]);
                let den = x2 - 2.0 * x1 + x0;
                if den != 0.0 {
                    let acc = x2 - (x2 - x1) * (x2 - x1) / den;
                    if acc.is_finite() && (f(acc)?.0 - acc).abs() < (f(x2)?.0 - x2).abs() {
                        next = acc;
                        history.clear();
                        history.push(acc);
                    }
                }
            }
            lo = lo.min(next);
            hi = hi.max(next);
            xi = next;
            if step <= opts.tol * 0.5 {
                converged = Some(it);
                break;
            }
            // no decrease over a window of STALL_WINDOW steps: not contracting
            if steps.len() > STALL_WINDOW && step >= steps[steps.len() - 1 - STALL_WINDOW] {
                break;
            }
        }
        let (fx, _) = f(xi)?;
        let residual = (fx - xi).abs();
        let ratios: Vec<f64> = steps
            .windows(2)
            .filter(|w| w[0] > 1e3 * f64::EPSILON && w[1] > 1e3 * f64::EPSILON)
            .map(|w| w[1] / w[0])
            .collect();
        let observed = if ratios.is_empty() {
            0.0
        } else {
            (ratios.iter().map(|r| r.ln()).sum::<f64>() / ratios.len() as f64).exp()
        };
        match converged {
            Some(it) if residual <= opts.tol => (xi, it, residual, observed, lo, hi),
            _ => {
                let ratio = sampled_lipschitz(&f, interval(mu, b_coef, lo, hi))?;
                return Err(Error::ContractionFailure { ratio, iterations: opts.max_iter });
            }
        }
    };

    let lipschitz = if pre == 0.0 { 0.0 } else { sampled_lipschitz(&f, interval(mu, b_coef, lo, hi))? };
    if lipschitz >= 1.0 {
        return Err(Error::ContractionFailure { ratio: lipschitz, iterations });
    }
    let cutoff = adaptive_cutoff(xi, t, mu, b, basis.cutoff)?;
    let out = basis.with_cutoff(cutoff);
    let occupations = (0..=cutoff).map(|m| occupation_at(b * (2 * m + 1) as f64 - mu + xi, t)).collect();
    Ok(NormalState {
        xi,
        t,
        mu,
        basis: out,
        occupations,
        residual,
        iterations,
        lipschitz,
        observed_ratio,
        warnings,
    })
}

const STALL_WINDOW: usize = 25;

fn interval(mu: f64, b_coef: f64, lo: f64, hi: f64) -> (f64, f64) {
    let bb = b_coef.abs().min(0.999);
    let a = -mu.abs() * bb / (1.0 - bb) - 1.0;
    (a.min(lo), 1.0f64.max(hi))
}

fn sampled_lipschitz(f: &impl Fn(f64) -> Result<(f64, usize)>, (a, b): (f64, f64)) -> Result<f64> {
    let n = 64;
    let mut prev = f(a)?.0;
    let mut best: f64 = 0.0;
    for i in 1..=n {
        let x = a + (b - a) * i as f64 / n as f64;
        let y = f(x)?.0;
        best = best.max(((y - prev) / ((b - a) / n as f64)).abs());
        prev = y;
    }
    Ok(best)
}

/// Chemical potential placing level `level` at the Fermi surface,
/// `λ_level - μ + ξ(μ) = 0`, found by bisection.
pub fn chemical_potential_at_level(
    t: f64,
    level: usize,
    basis: &LandauBasis,
    potential: &PairPotential,
) -> Result<f64> {
    let lam = basis.geometry.b * (2 * level + 1) as f64;
    let g = |mu: f64| -> Result<f64> {
        let s = solve_xi(t, mu, basis, potential, 1e-14, 2000)?;
        Ok(lam - mu + s.xi)
    };
    // ξ(μ) is Lipschitz in μ with constant below one, so g is decreasing.
    let mut lo = lam;
    let mut glo = g(lo)?;
    let mut width = lam.max(1.0);
    while glo < 0.0 {
        lo -= width;
        width *= 2.0;
        glo = g(lo)?;
    }
    let mut hi = lam;
    let mut ghi = g(hi)?;
    width = lam.max(1.0);
    while ghi > 0.0 {
        hi += width;
        width *= 2.0;
        ghi = g(hi)?;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if g(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Result of [`current_residual`].
#[derive(Debug, Clone, PartialEq)]
pub struct CurrentResidual {
    /// Largest `|j(x)|` over the grid.
    pub max_norm: f64,
    /// Change of that maximum when the guiding-index cutoff is reduced by ten.
    pub drift: f64,
    pub warning: Option<String>,
}

/// Supercurrent `j(x) = Re Σ_m f_m Σ_k conj(ψ_{m,k}) Π ψ_{m,k}` on a
/// `res × res` grid in the fundamental cell.
pub fn current_residual(state: &NormalState, resolution: usize) -> Result<CurrentResidual> {
    if resolution < 8 {
        return Err(Error::Domain(format!("grid resolution must be at least 8, got {resolution}")));
    }
    let b = state.basis.geometry.b;
    let levels: Vec<(usize, f64)> = state
        .occupations
        .iter()
        .enumerate()
        .filter(|&(_, &f)| f > 0.0)
        .map(|(m, &f)| (m, f))
        .collect();
    if levels.is_empty() {
        return Ok(CurrentResidual { max_norm: 0.0, drift: 0.0, warning: None });
    }
    let [e1, e2] = state.basis.geometry.lattice_vectors();
    let mut max_full: f64 = 0.0;
    let mut max_short: f64 = 0.0;
    for i in 0..resolution {
        for j in 0..resolution {
            let (s1, s2) = (i as f64 / resolution as f64, j as f64 / resolution as f64);
            let x = [s1 * e1[0] + s2 * e2[0], s1 * e1[1] + s2 * e2[1]];
            let r2 = x[0] * x[0] + x[1] * x[1];
            let mut full = [0.0; 2];
            let mut short = [0.0; 2];
            for &(m, f) in &levels {
                let kmax = (0.5 * b * r2).ceil() as usize + m + 40;
                for k in 0..=kmax {
                    let p = psi(m, k, b, x).conj();
                    let pp = pi_psi(m, k, b, x);
                    let c: [C64; 2] = [p * pp[0], p * pp[1]];
                    full[0] += f * c[0].re;
                    full[1] += f * c[1].re;
                    if k + 10 <= kmax {
                        short[0] += f * c[0].re;
                        short[1] += f * c[1].re;
                    }
                }
            }
            max_full = max_full.max(full[0].hypot(full[1]));
            max_short = max_short.max(short[0].hypot(short[1]));
        }
    }
    let drift = (max_full - max_short).abs();
    let warning = (drift > 1e-8).then(|| format!("guiding-index sum not saturated: drift {drift:e}"));
    Ok(CurrentResidual { max_norm: max_full, drift, warning })
}

/// Sum `Σ_{m=0}^{count-1} g♯((b(2m+1) - μ + ξ)/T)` by adaptive quadrature of the
/// continuum integral; used only as a diagnostic.
pub fn continuum_by_quadrature(xi: f64, t: f64, mu: f64, b_coef: f64) -> f64 {
    let a = (xi - mu) / t;
    let q = integrate(g_sharp_raw, a, a.max(0.0) + 40.0, 1e-15, 0.0);
    t * b_coef * q.value
}
