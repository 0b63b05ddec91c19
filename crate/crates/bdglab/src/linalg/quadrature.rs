//! Quadrature rules: Gauss-Hermite (Golub-Welsch nodes, weights from Hermite
//! functions) and adaptive Gauss-Kronrod 7/15.

use super::eigen::sym_eigen;
use crate::{RMatrix, Result};

/// Gauss-Hermite rule for `∫ f(x) e^{-x²} dx`.
#[derive(Debug, Clone)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// `weights[i] * exp(nodes[i]^2)`, for integrands that carry their own Gaussian.
    pub scaled_weights: Vec<f64>,
}

/// Orthonormal Hermite functions `φ_0..φ_n` at `x`.
fn hermite_functions(n: usize, x: f64) -> Vec<f64> {
    let mut phi = vec![0.0; n + 1];
    phi[0] = std::f64::consts::PI.powf(-0.25) * (-0.5 * x * x).exp();
    if n >= 1 {
        phi[1] = std::f64::consts::SQRT_2 * x * phi[0];
    }
    for k in 1..n {
        let kf = k as f64;
        phi[k + 1] = (2.0 / (kf + 1.0)).sqrt() * x * phi[k] - (kf / (kf + 1.0)).sqrt() * phi[k - 1];
    }
    phi
}

pub fn gauss_hermite(n: usize) -> Result<GaussHermite> {
    assert!(n >= 1);
    let mut j = RMatrix::zeros(n, n);
    for i in 1..n {
        let b = (i as f64 / 2.0).sqrt();
        j[(i, i - 1)] = b;
        j[(i - 1, i)] = b;
    }
    let eig = sym_eigen(&j)?;
    let mut nodes = eig.values;
    let mut scaled_weights = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for x in nodes.iter_mut() {
        // Newton polish on φ_n, with φ_n' = sqrt(2n) φ_{n-1} - x φ_n.
        for _ in 0..3 {
            let phi = hermite_functions(n, *x);
            let d = (2.0 * n as f64).sqrt() * phi[n - 1] - *x * phi[n];
            if d != 0.0 {
                *x -= phi[n] / d;
            }
        }
        let phi = hermite_functions(n, *x);
        let s: f64 = phi[..n].iter().map(|p| p * p).sum();
        let sw = 1.0 / s;
        scaled_weights.push(sw);
        weights.push(sw * (-*x * *x).exp());
    }
    Ok(GaussHermite { nodes, weights, scaled_weights })
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub converged: bool,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_94,
    0.417_959_183_673_469_4,
];

fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut rk = WGK[7] * fc;
    let mut rg = WG[3] * fc;
    for i in 0..7 {
        let x = h * XGK[i];
        let s = f(c - x) + f(c + x);
        rk += WGK[i] * s;
        if i % 2 == 1 {
            rg += WG[i / 2] * s;
        }
    }
    (rk * h, ((rk - rg) * h).abs())
}

/// Globally adaptive Gauss-Kronrod integration on a finite interval.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Integral {
    let mut segs: Vec<(f64, f64, f64, f64)> = Vec::new();
    let (v, e) = gk15(&f, a, b);
    segs.push((a, b, v, e));
    let max_segments = 4000;
    loop {
        let total: f64 = segs.iter().map(|s| s.2).sum();
        let err: f64 = segs.iter().map(|s| s.3).sum();
        if err <= abs_tol.max(rel_tol * total.abs()) {
            return Integral { value: total, error: err, converged: true };
        }
        if segs.len() >= max_segments {
            return Integral { value: total, error: err, converged: false };
        }
        let (imax, _) = segs
            .iter()
            .enumerate()
            .fold((0, -1.0), |acc, (i, s)| if s.3 > acc.1 { (i, s.3) } else { acc });
        let (sa, sb, _, _) = segs.swap_remove(imax);
        let mid = 0.5 * (sa + sb);
        let (v1, e1) = gk15(&f, sa, mid);
        let (v2, e2) = gk15(&f, mid, sb);
        segs.push((sa, mid, v1, e1));
        segs.push((mid, sb, v2, e2));
    }
}

/// Adaptive integration over `[a, ∞)` through `x = a + t/(1-t)`.
pub fn integrate_semi_infinite(f: impl Fn(f64) -> f64, a: f64, abs_tol: f64, rel_tol: f64) -> Integral {
    integrate(
        |t| {
            let s = 1.0 - t;
            f(a + t / s) / (s * s)
        },
        0.0,
        1.0,
        abs_tol,
        rel_tol,
    )
}
