use super::kernel::k_kernel;
use super::pair::{pair_interaction, PairBasis};
use crate::linalg::{sym_eigen, DEFAULT_DIMENSION_CAP};
use crate::model::{landau_levels, LatticeGeometry, PairPotential};
use crate::normal::{solve_xi, NormalState};
use crate::{Error, RMatrix, Result};
use nalgebra::DVector;

/// Truncated `L = K + W` on a [`PairBasis`].
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityOperator {
    pub kdiag: Vec<f64>,
    pub w: RMatrix,
    pub t: f64,
    pub xi: f64,
    pub mu: f64,
    pub pair_basis: PairBasis,
}

impl StabilityOperator {
    /// Combine a solved state with a precomputed `W`.
    pub fn from_parts(state: &NormalState, pair_basis: &PairBasis, w: RMatrix) -> Self {
        let kdiag = pair_basis
            .states
            .iter()
            .map(|&(a, b, _)| k_kernel(state.shifted_level(a), state.shifted_level(b), state.t))
            .collect();
        Self { kdiag, w, t: state.t, xi: state.xi, mu: state.mu, pair_basis: pair_basis.clone() }
    }

    pub fn dim(&self) -> usize {
        self.kdiag.len()
    }

    pub fn matrix(&self) -> RMatrix {
        let mut l = self.w.clone();
        for (i, k) in self.kdiag.iter().enumerate() {
            l[(i, i)] += k;
        }
        l
    }

    /// `⟨φ, L φ⟩`.
    pub fn quadratic_form(&self, phi: &DVector<f64>) -> f64 {
        let k: f64 = phi.iter().zip(&self.kdiag).map(|(p, k)| p * p * k).sum();
        k + phi.dot(&(&self.w * phi))
    }
}

pub fn build_stability_operator(
    state: &NormalState,
    potential: &PairPotential,
    pair_basis: &PairBasis,
    quad_tol: f64,
) -> Result<StabilityOperator> {
    if !(quad_tol > 0.0) {
        return Err(Error::Domain("quadrature tolerance must be positive".into()));
    }
    if !(state.t > 0.0) {
        return Err(Error::Domain("the pairing operator needs T > 0".into()));
    }
    let w = pair_interaction(pair_basis, potential, quad_tol)?;
    Ok(StabilityOperator::from_parts(state, pair_basis, w))
}

pub fn lowest_eigenpair(op: &StabilityOperator) -> Result<(f64, DVector<f64>)> {
    lowest_eigenpair_capped(op, DEFAULT_DIMENSION_CAP)
}

pub fn lowest_eigenpair_capped(op: &StabilityOperator, cap: usize) -> Result<(f64, DVector<f64>)> {
    if op.dim() > cap {
        return Err(Error::DimensionCap { dim: op.dim(), cap });
    }
    let l = op.matrix();
    let eig = sym_eigen(&l)?;
    let value = eig.values[0];
    let v = eig.vectors.column(0).into_owned();
    let res = (&l * &v - &v * value).norm();
    let scale = l.norm().max(f64::MIN_POSITIVE);
    if res > 1e-10 * scale {
        return Err(Error::Inconsistency(format!("eigenpair residual {res:e} exceeds 1e-10·‖L‖")));
    }
    Ok((value, v))
}

/// Largest eigenvalue of `w^{1/2}(K + E)⁻¹w^{1/2}` with `w = -W`.
pub fn birman_schwinger_value(e: f64, op: &StabilityOperator) -> Result<f64> {
    if !(e > 0.0) {
        return Err(Error::Domain(format!("E must be positive, got {e}")));
    }
    let neg = -&op.w;
    let eig = sym_eigen(&neg)?;
    let scale = eig.values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let min = eig.values.iter().cloned().fold(f64::INFINITY, f64::min);
    if min < -1e-10 * scale.max(1.0) {
        return Err(Error::Indefinite(min));
    }
    let d = op.dim();
    let mut root = RMatrix::zeros(d, d);
    for (j, &lam) in eig.values.iter().enumerate() {
        let s = lam.max(0.0).sqrt();
        if s == 0.0 {
            continue;
        }
        let q = eig.vectors.column(j);
        root += &q * q.transpose() * s;
    }
    let mut m = root.clone();
    for (i, k) in op.kdiag.iter().enumerate() {
        m.row_mut(i).scale_mut(1.0 / (k + e));
    }
    let bs = &root * m;
    let bs = (&bs + bs.transpose()) * 0.5;
    let eig = sym_eigen(&bs)?;
    Ok(*eig.values.last().unwrap_or(&0.0))
}

/// Inputs for [`find_tc`] at one field strength.
#[derive(Debug, Clone, PartialEq)]
pub struct TcSetup {
    pub geometry: LatticeGeometry,
    pub mu: f64,
    pub cutoff: usize,
    pub channels: usize,
    pub quad_tol: f64,
    pub scan_points: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TcResult {
    /// Largest crossing, if any.
    pub tc: Option<f64>,
    /// All crossings, ascending.
    pub crossings: Vec<f64>,
    /// Set when more than one crossing was found.
    pub multiple: bool,
    /// Scanned `(T, λ_min)` pairs.
    pub scan: Vec<(f64, f64)>,
}

/// Scan `λ_min(L_T)` on a geometric temperature grid and bisect each sign
/// change to relative tolerance `tol`.
pub fn find_tc(setup: &TcSetup, potential: &PairPotential, t_range: (f64, f64), tol: f64) -> Result<TcResult> {
    let (lo, hi) = t_range;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::Domain(format!("temperature range must satisfy 0 < lo < hi, got ({lo}, {hi})")));
    }
    if !(tol > 0.0) || setup.scan_points < 2 {
        return Err(Error::Domain("need tol > 0 and at least two scan points".into()));
    }
    let basis = landau_levels(&setup.geometry, setup.cutoff);
    let pb = PairBasis::new(&basis, setup.channels);
    let w = pair_interaction(&pb, potential, setup.quad_tol)?;
    let lambda = |t: f64| -> Result<f64> {
        let state = solve_xi(t, setup.mu, &basis, potential, 1e-13, 2000)?;
        let op = StabilityOperator::from_parts(&state, &pb, w.clone());
        Ok(lowest_eigenpair(&op)?.0)
    };
    let n = setup.scan_points;
    let ratio = (hi / lo).powf(1.0 / (n - 1) as f64);
    let mut scan = Vec::with_capacity(n);
    for i in 0..n {
        let t = if i == n - 1 { hi } else { lo * ratio.powi(i as i32) };
        scan.push((t, lambda(t)?));
    }
    let mut crossings = Vec::new();
    for win in scan.windows(2) {
        let ((mut a, mut fa), (mut b, _)) = (win[0], win[1]);
        if (win[0].1 < 0.0) == (win[1].1 < 0.0) {
            continue;
        }
        while b - a > tol * b {
            let mid = (a * b).sqrt();
            let fm = lambda(mid)?;
            if (fm < 0.0) == (fa < 0.0) {
                a = mid;
                fa = fm;
            } else {
                b = mid;
            }
        }
        crossings.push(0.5 * (a + b));
    }
    Ok(TcResult { tc: crossings.last().copied(), multiple: crossings.len() > 1, crossings, scan })
}
