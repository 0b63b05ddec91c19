use crate::linalg::quadrature::integrate_semi_infinite;
use crate::model::{laguerre, ln_factorial, LandauBasis, PairPotential};
use crate::{Error, RMatrix, Result};

/// Beam-splitter coefficient `⟨N_c, n_r | n₁, n₂⟩` for the map
/// `a₁† = (A† + a†)/√2`, `a₂† = (A† - a†)/√2`; zero unless `N_c + n_r = n₁ + n₂`.
pub fn beam_splitter(n1: usize, n2: usize, nc: usize, nr: usize) -> f64 {
    let n = n1 + n2;
    if nc + nr != n {
        return 0.0;
    }
    let norm = 0.5 * (ln_factorial(nc) + ln_factorial(nr) - ln_factorial(n1) - ln_factorial(n2))
        - 0.5 * n as f64 * std::f64::consts::LN_2;
    let lo = nc.saturating_sub(n2);
    let hi = n1.min(nc);
    let mut acc = 0.0;
    for p in lo..=hi {
        let q = nc - p;
        let ln_binom = ln_binomial(n1, p) + ln_binomial(n2, q);
        let sign = if (n2 - q) % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * (ln_binom + norm).exp();
    }
    acc
}

fn ln_binomial(n: usize, k: usize) -> f64 {
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// `⟨ψ_{n,k}, v(√2 ·) ψ_{n',k'}⟩` for the relative coordinate `(x - y)/√2` in field `b`.
pub fn relative_matrix_element(
    n: usize,
    k: usize,
    n2: usize,
    k2: usize,
    b: f64,
    potential: &PairPotential,
    quad_tol: f64,
) -> Result<f64> {
    let l = k as i64 - n as i64;
    if l != k2 as i64 - n2 as i64 || potential.is_zero() {
        return Ok(0.0);
    }
    let al = l.unsigned_abs() as usize;
    let a = n.min(k);
    let a2 = n2.min(k2);
    let norm = 0.5 * (ln_factorial(a) - ln_factorial(a + al) + ln_factorial(a2) - ln_factorial(a2 + al));
    let alpha = al as f64;
    let f = |s: f64| {
        if s <= 0.0 {
            return if al == 0 { potential.radial(0.0) } else { 0.0 };
        }
        let w = (alpha * s.ln() - s + norm).exp();
        w * laguerre(a, alpha, s) * laguerre(a2, alpha, s) * potential.radial(2.0 * (s / b).sqrt())
    };
    let q = integrate_semi_infinite(f, 0.0, quad_tol, 0.0);
    if !q.converged || !q.value.is_finite() {
        return Err(Error::Quadrature { index: format!("v_rel({n},{k};{n2},{k2})"), achieved: q.error });
    }
    Ok(q.value)
}

/// Cache of relative matrix elements for `n ≤ n_max`, `k ≤ k_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct RelativeInteraction {
    pub b: f64,
    pub n_max: usize,
    pub k_max: usize,
    values: Vec<f64>,
}

impl RelativeInteraction {
    pub fn build(b: f64, potential: &PairPotential, n_max: usize, k_max: usize, quad_tol: f64) -> Result<Self> {
        let side = (n_max + 1) * (k_max + 1);
        let mut values = vec![0.0; side * side];
        for n in 0..=n_max {
            for k in 0..=k_max {
                let i = n * (k_max + 1) + k;
                for n2 in 0..=n_max {
                    let k2 = k as i64 - n as i64 + n2 as i64;
                    if k2 < 0 || k2 as usize > k_max {
                        continue;
                    }
                    let k2 = k2 as usize;
                    let j = n2 * (k_max + 1) + k2;
                    if j < i {
                        continue;
                    }
                    let v = relative_matrix_element(n, k, n2, k2, b, potential, quad_tol)?;
                    values[i * side + j] = v;
                    values[j * side + i] = v;
                }
            }
        }
        Ok(Self { b, n_max, k_max, values })
    }

    pub fn get(&self, n: usize, k: usize, n2: usize, k2: usize) -> f64 {
        if n > self.n_max || n2 > self.n_max || k > self.k_max || k2 > self.k_max {
            return 0.0;
        }
        let side = (self.n_max + 1) * (self.k_max + 1);
        self.values[(n * (self.k_max + 1) + k) * side + n2 * (self.k_max + 1) + k2]
    }
}

/// Pair states `(m, m', c)`: cyclotron levels of the two particles, and the
/// relative guiding index `c ≤ L` with the centre-of-mass guiding index at zero.
#[derive(Debug, Clone, PartialEq)]
pub struct PairBasis {
    pub basis: LandauBasis,
    pub channels: usize,
    pub pairs: Vec<(usize, usize)>,
    pub states: Vec<(usize, usize, usize)>,
}

impl PairBasis {
    pub fn new(basis: &LandauBasis, channels: usize) -> Self {
        let m = basis.cutoff;
        let pairs: Vec<_> = (0..=m).flat_map(|a| (0..=m).map(move |c| (a, c))).collect();
        let states = pairs.iter().flat_map(|&(a, c)| (0..=channels).map(move |r| (a, c, r))).collect();
        Self { basis: basis.clone(), channels, pairs, states }
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn index(&self, m1: usize, m2: usize, c: usize) -> usize {
        (m1 * (self.basis.cutoff + 1) + m2) * (self.channels + 1) + c
    }
}

/// `W` on the pair basis: `Σ_{N_c} U U' v_rel(N - N_c, c; N' - N_c, c')`.
pub fn pair_interaction(pb: &PairBasis, potential: &PairPotential, quad_tol: f64) -> Result<RMatrix> {
    let m = pb.basis.cutoff;
    let rel = RelativeInteraction::build(pb.basis.geometry.b, potential, 2 * m, pb.channels, quad_tol)?;
    Ok(pair_interaction_from(pb, &rel))
}

pub(crate) fn pair_interaction_from(pb: &PairBasis, rel: &RelativeInteraction) -> RMatrix {
    let d = pb.dim();
    let mut w = RMatrix::zeros(d, d);
    for (i, &(a, b, c)) in pb.states.iter().enumerate() {
        let n = a + b;
        for (j, &(a2, b2, c2)) in pb.states.iter().enumerate().skip(i) {
            let n2 = a2 + b2;
            if n as i64 - c as i64 != n2 as i64 - c2 as i64 {
                continue;
            }
            let mut acc = 0.0;
            for nc in 0..=n.min(n2) {
                let u = beam_splitter(a, b, nc, n - nc);
                let u2 = beam_splitter(a2, b2, nc, n2 - nc);
                if u == 0.0 || u2 == 0.0 {
                    continue;
                }
                acc += u * u2 * rel.get(n - nc, c, n2 - nc, c2);
            }
            w[(i, j)] = acc;
            w[(j, i)] = acc;
        }
    }
    w
}
