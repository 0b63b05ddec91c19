use super::model::{admissibility_check, FreeEnergyModel};
use super::state::{BdGState, ScalarField};
use crate::{CMatrix, Error, RMatrix, Result};

/// Result of [`expansion_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionReport {
    pub epsilons: Vec<f64>,
    pub delta_f: Vec<f64>,
    /// Fitted coefficients of `ε²`, `ε³`, `ε⁴`.
    pub coefficients: [f64; 3],
    /// `⟨α, L α⟩`.
    pub target: f64,
    pub relative_error: f64,
    /// Least-squares log-log slope of `|ΔF - target·ε²|`.
    pub remainder_slope: f64,
    pub rejected: Vec<f64>,
}

/// Compare `F_T(Γ + εφ(α)) - F_T(Γ)` at the normal state with `ε²⟨α, Lα⟩`.
pub fn expansion_check(model: &FreeEnergyModel, alpha: &CMatrix, epsilons: &[f64]) -> Result<ExpansionReport> {
    if !admissibility_check(model, alpha, 1.0)? {
        return Err(Error::Inadmissible("αα* exceeds [γ(1-γ)]²".into()));
    }
    let base = model.normal_state();
    let f0 = model.breakdown(&base)?;
    let target = model.pair_form(alpha);
    let mut eps = Vec::new();
    let mut df = Vec::new();
    let mut rejected = Vec::new();
    for &e in epsilons {
        let mut s = base.clone();
        s.alpha = alpha * crate::C64::new(e, 0.0);
        match model.breakdown(&s) {
            Ok(f) => {
                eps.push(e);
                df.push(f.matter() - f0.matter());
            }
            Err(Error::ConstraintViolation(_)) => rejected.push(e),
            Err(other) => return Err(other),
        }
    }
    if eps.len() < 3 {
        return Err(Error::Domain(format!("need three admissible epsilons, have {}", eps.len())));
    }
    // least squares for ΔF = c2 ε² + c3 ε³ + c4 ε⁴ (exact solve for three points)
    let n = eps.len();
    let a = RMatrix::from_fn(n, 3, |i, j| eps[i].powi(j as i32 + 2));
    let y = nalgebra::DVector::from_vec(df.clone());
    let ata = a.transpose() * &a;
    let aty = a.transpose() * y;
    let c = ata.lu().solve(&aty).ok_or_else(|| Error::Inconsistency("singular expansion fit".into()))?;
    let coefficients = [c[0], c[1], c[2]];
    let relative_error = if target == 0.0 { coefficients[0].abs() } else { ((coefficients[0] - target) / target).abs() };
    let pts: Vec<(f64, f64)> = eps
        .iter()
        .zip(&df)
        .map(|(&e, &d)| (e.ln(), (d - target * e * e).abs().max(f64::MIN_POSITIVE).ln()))
        .collect();
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n as f64;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n as f64;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(ExpansionReport {
        epsilons: eps,
        delta_f: df,
        coefficients,
        target,
        relative_error,
        remainder_slope: sxy / sxx,
        rejected,
    })
}

/// `|F_T` in the frame `(e^{iχ}Γe^{-iχ}, a' + ∇χ)` minus `F_T(Γ, a')|`.
///
/// A constant `χ` is a global phase, under which every term is unchanged.
pub fn gauge_invariance_check(model: &FreeEnergyModel, state: &BdGState, chi: &ScalarField) -> Result<f64> {
    if chi.is_constant() {
        return Ok(0.0);
    }
    let f = model.breakdown(state)?;
    let g = model.breakdown_in_gauge(state, chi)?;
    Ok((g.total - f.total).abs())
}
