use super::entropy::{checked_spectrum, entropy_of_block};
use super::state::{gamma_block, BdGState, FourierField, ScalarField};
use crate::linalg::quadrature::gauss_hermite;
use crate::linalg::{herm_apply, sym_eigen};
use crate::model::{g_prime_raw, g_sharp_raw, pi_psi, psi, LatticeGeometry, PairPotential};
use crate::stability::{gamma_kernel, k_kernel, ProductInteraction};
use crate::{CMatrix, Error, RMatrix, Result, C64};
use nalgebra::DVector;

/// Truncation and physical parameters of the free energy.
///
/// `mu` is the effective chemical potential; a normal state with direct shift
/// `ξ` enters as `mu = μ - ξ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeEnergyParams {
    pub t: f64,
    pub mu: f64,
    pub cutoff: usize,
    pub guiding: usize,
    pub fourier_cutoff: usize,
    pub quad_order: usize,
    pub quad_tol: f64,
}

/// The parts of `F_T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeEnergyBreakdown {
    pub kinetic: f64,
    pub pairing: f64,
    pub field: f64,
    pub chemical: f64,
    pub entropy_term: f64,
    pub total: f64,
}

impl FreeEnergyBreakdown {
    fn new(kinetic: f64, pairing: f64, field: f64, chemical: f64, entropy_term: f64) -> Self {
        let total = kinetic + pairing + field + chemical + entropy_term;
        Self { kinetic, pairing, field, chemical, entropy_term, total }
    }

    /// Total without the field term.
    pub fn matter(&self) -> f64 {
        self.kinetic + self.pairing + self.chemical + self.entropy_term
    }
}

/// Diagonal reference state `Γ₀ = g♯(H₀/T)`, `H₀ = diag(√λ, -√λ)`, by level.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceState {
    pub occupations: Vec<f64>,
}

/// Everything needed to evaluate `F_T` on states over the product basis
/// `ψ_{m,k}`, `m ≤ M`, `k < G`.
#[derive(Debug, Clone)]
pub struct FreeEnergyModel {
    pub geometry: LatticeGeometry,
    pub params: FreeEnergyParams,
    pub potential: PairPotential,
    pub interaction: ProductInteraction,
    pub levels: Vec<f64>,
    points: Vec<[f64; 2]>,
    weights: Vec<f64>,
    phi: Vec<Vec<C64>>,
    pi_phi: Vec<Vec<[C64; 2]>>,
}

impl FreeEnergyModel {
    pub fn new(geometry: LatticeGeometry, potential: PairPotential, params: FreeEnergyParams) -> Result<Self> {
        if !(params.t > 0.0) {
            return Err(Error::Domain("free energy needs T > 0".into()));
        }
        if params.guiding == 0 || params.quad_order < 4 || !(params.quad_tol > 0.0) {
            return Err(Error::Domain("need guiding >= 1, quad_order >= 4, quad_tol > 0".into()));
        }
        let b = geometry.b;
        let interaction = ProductInteraction::build(b, &potential, params.cutoff, params.guiding, params.quad_tol)?;
        let levels = (0..=params.cutoff).map(|m| b * (2 * m + 1) as f64).collect();
        let gh = gauss_hermite(params.quad_order)?;
        let sc = (2.0 / b).sqrt();
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for (x, wx) in gh.nodes.iter().zip(&gh.scaled_weights) {
            for (y, wy) in gh.nodes.iter().zip(&gh.scaled_weights) {
                points.push([sc * x, sc * y]);
                weights.push(wx * wy * sc * sc);
            }
        }
        let g = params.guiding;
        let d = (params.cutoff + 1) * g;
        let phi = (0..d).map(|p| points.iter().map(|&x| psi(p / g, p % g, b, x)).collect()).collect();
        let pi_phi = (0..d).map(|p| points.iter().map(|&x| pi_psi(p / g, p % g, b, x)).collect()).collect();
        Ok(Self { geometry, params, potential, interaction, levels, points, weights, phi, pi_phi })
    }

    pub fn dim(&self) -> usize {
        (self.params.cutoff + 1) * self.params.guiding
    }

    pub fn level_of(&self, p: usize) -> usize {
        p / self.params.guiding
    }

    /// One-particle energies `h_p = λ_{m(p)} - μ`.
    pub fn energies(&self) -> Vec<f64> {
        (0..self.dim()).map(|p| self.levels[self.level_of(p)] - self.params.mu).collect()
    }

    pub fn zero_field(&self) -> FourierField {
        FourierField::zero(&self.geometry, self.params.fourier_cutoff)
    }

    /// The truncated normal state `γ = g♯(h/T)`, `α = 0`, `a' = 0`.
    pub fn normal_state(&self) -> BdGState {
        let d = self.dim();
        let occ: Vec<C64> = self.energies().iter().map(|&h| C64::new(g_sharp_raw(h / self.params.t), 0.0)).collect();
        BdGState {
            gamma: CMatrix::from_diagonal(&DVector::from_vec(occ)),
            alpha: CMatrix::zeros(d, d),
            a_prime: self.zero_field(),
            geometry: self.geometry,
        }
    }

    pub fn reference_state(&self) -> ReferenceState {
        ReferenceState { occupations: self.levels.iter().map(|&l| g_sharp_raw(l.sqrt() / self.params.t)).collect() }
    }

    /// `Γ₀` as a `2D × 2D` block.
    pub fn reference_block(&self) -> CMatrix {
        let r = self.reference_state();
        let d = self.dim();
        let g = CMatrix::from_diagonal(&DVector::from_iterator(
            d,
            (0..d).map(|p| C64::new(r.occupations[self.level_of(p)], 0.0)),
        ));
        gamma_block(&g, &CMatrix::zeros(d, d))
    }

    /// `∫ conj((Π - a')φ_p) · (Π - a')φ_q` over the plane, with an optional
    /// gauge frame `φ → e^{iχ}φ`.
    fn gram(&self, a: &FourierField, frame: Option<&ScalarField>) -> CMatrix {
        let d = self.dim();
        let mut gram = CMatrix::zeros(d, d);
        let mut col = vec![[C64::new(0.0, 0.0); 2]; d];
        for (i, &x) in self.points.iter().enumerate() {
            let av = a.eval(x);
            let (phase, grad) = match frame {
                Some(chi) => (C64::from_polar(1.0, chi.eval(x)), chi.grad(x)),
                None => (C64::new(1.0, 0.0), [0.0, 0.0]),
            };
            for p in 0..d {
                let f = self.phi[p][i];
                let pp = self.pi_phi[p][i];
                col[p] = [
                    phase * (pp[0] + f * (grad[0] - av[0])),
                    phase * (pp[1] + f * (grad[1] - av[1])),
                ];
            }
            let w = self.weights[i];
            for p in 0..d {
                let cp = [col[p][0].conj() * w, col[p][1].conj() * w];
                for q in p..d {
                    let v = cp[0] * col[q][0] + cp[1] * col[q][1];
                    gram[(p, q)] += v;
                }
            }
        }
        for p in 0..d {
            gram[(p, p)] = C64::new(gram[(p, p)].re, 0.0);
            for q in p + 1..d {
                gram[(q, p)] = gram[(p, q)].conj();
            }
        }
        gram
    }

    fn hybrid(&self, gram: CMatrix, mean_square: f64) -> CMatrix {
        let g = self.params.guiding;
        let mut h = gram;
        for m in 0..=self.params.cutoff {
            let tr: f64 = (0..g).map(|k| h[(m * g + k, m * g + k)].re).sum::<f64>() / g as f64;
            for k in 0..g {
                let i = m * g + k;
                h[(i, i)] += C64::new(self.levels[m] + mean_square - tr, 0.0);
            }
        }
        h
    }

    /// Kinetic matrix `H_a` (chemical potential not included).
    ///
    /// The level-uniform part of `γ` is treated as a union of full Landau level
    /// projections, which carry energy `λ_m + ⟨|a'|²⟩` per state and no current;
    /// the remainder uses the plane integral of `|(Π - a')φ|²`.
    pub fn kinetic_matrix(&self, a: &FourierField) -> CMatrix {
        self.hybrid(self.gram(a, None), a.mean_square())
    }

    /// `(v♯α)_{pq} = Σ_{rs} V_{pq,rs} α_{rs}`.
    pub fn v_sharp(&self, alpha: &CMatrix) -> CMatrix {
        let d = self.dim();
        let re = DVector::from_iterator(d * d, (0..d * d).map(|i| alpha[(i / d, i % d)].re));
        let im = DVector::from_iterator(d * d, (0..d * d).map(|i| alpha[(i / d, i % d)].im));
        let vr = &self.interaction.matrix * re;
        let vi = &self.interaction.matrix * im;
        CMatrix::from_fn(d, d, |p, q| C64::new(vr[p * d + q], vi[p * d + q]))
    }

    /// `Tr(α* v♯ α)`.
    pub fn pairing(&self, alpha: &CMatrix) -> f64 {
        let va = self.v_sharp(alpha);
        alpha.iter().zip(va.iter()).map(|(a, v)| (a.conj() * v).re).sum()
    }

    /// `⟨α, K α⟩`, `K` the multiplication by `k(h_p, h_q; T)`.
    pub fn kinetic_pair_form(&self, alpha: &CMatrix) -> f64 {
        let h = self.energies();
        let d = self.dim();
        let mut acc = 0.0;
        for p in 0..d {
            for q in 0..d {
                acc += alpha[(p, q)].norm_sqr() * k_kernel(h[p], h[q], self.params.t);
            }
        }
        acc
    }

    /// `⟨α, L α⟩ = ⟨α, (K + v♯) α⟩`.
    pub fn pair_form(&self, alpha: &CMatrix) -> f64 {
        self.kinetic_pair_form(alpha) + self.pairing(alpha)
    }

    /// Lowest eigenpair of `L` on symmetric pair amplitudes `α = αᵀ`; the
    /// eigenvector is returned as a real symmetric matrix of unit Frobenius norm.
    pub fn lowest_symmetric_mode(&self) -> Result<(f64, CMatrix)> {
        let d = self.dim();
        let h = self.energies();
        let pairs: Vec<(usize, usize)> = (0..d).flat_map(|p| (p..d).map(move |q| (p, q))).collect();
        let n = pairs.len();
        let unit = |(p, q): (usize, usize)| -> Vec<(usize, f64)> {
            if p == q {
                vec![(p * d + p, 1.0)]
            } else {
                let s = std::f64::consts::FRAC_1_SQRT_2;
                vec![(p * d + q, s), (q * d + p, s)]
            }
        };
        let units: Vec<_> = pairs.iter().map(|&pq| unit(pq)).collect();
        let v = &self.interaction.matrix;
        let mut l = RMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let mut acc = 0.0;
                for &(a, ca) in &units[i] {
                    for &(b, cb) in &units[j] {
                        acc += ca * cb * v[(a, b)];
                    }
                }
                if i == j {
                    let (p, q) = pairs[i];
                    acc += k_kernel(h[p], h[q], self.params.t);
                }
                l[(i, j)] = acc;
                l[(j, i)] = acc;
            }
        }
        let eig = sym_eigen(&l)?;
        let mut alpha = CMatrix::zeros(d, d);
        for (i, u) in units.iter().enumerate() {
            for &(a, c) in u {
                alpha[(a / d, a % d)] = C64::new(c * eig.vectors[(i, 0)], 0.0);
            }
        }
        Ok((eig.values[0], alpha))
    }

    fn field_energy(&self, a: &FourierField) -> f64 {
        let g = &self.geometry;
        g.cell_area * (g.b * g.b + a.mean_square_curl())
    }

    pub fn breakdown(&self, state: &BdGState) -> Result<FreeEnergyBreakdown> {
        self.check_dims(state)?;
        let h = self.kinetic_matrix(&state.a_prime);
        let kinetic = (&h * &state.gamma).trace().re;
        let pairing = self.pairing(&state.alpha);
        let field = self.field_energy(&state.a_prime);
        let chemical = -self.params.mu * state.gamma.trace().re;
        let entropy_term = -self.params.t * 0.5 * entropy_of_block(&state.block())?;
        Ok(FreeEnergyBreakdown::new(kinetic, pairing, field, chemical, entropy_term))
    }

    /// `F_T` evaluated in the gauge frame `(e^{iχ}Γe^{-iχ}, a' + ∇χ)`.
    pub fn breakdown_in_gauge(&self, state: &BdGState, chi: &ScalarField) -> Result<FreeEnergyBreakdown> {
        self.check_dims(state)?;
        let mut big = state.a_prime.clone();
        for (k, c) in chi.wavevectors.iter().zip(&chi.coeffs) {
            let add = [C64::new(0.0, k[0]) * c, C64::new(0.0, k[1]) * c];
            let hit = big.wavevectors.iter().position(|w| (w[0] - k[0]).abs() < 1e-12 && (w[1] - k[1]).abs() < 1e-12);
            match hit {
                Some(i) => {
                    big.coeffs[i][0] += add[0];
                    big.coeffs[i][1] += add[1];
                }
                None => {
                    big.modes.push([0, 0]);
                    big.wavevectors.push(*k);
                    big.coeffs.push(add);
                }
            }
        }
        // level part: cell average of |A' - ∇χ|² on a periodic trapezoid grid
        let [e1, e2] = self.geometry.lattice_vectors();
        let n = 8 * (self.params.fourier_cutoff + 2);
        let mut ms = 0.0;
        for i in 0..n {
            for j in 0..n {
                let (s, t) = (i as f64 / n as f64, j as f64 / n as f64);
                let x = [s * e1[0] + t * e2[0], s * e1[1] + t * e2[1]];
                let a = big.eval(x);
                let g = chi.grad(x);
                ms += (a[0] - g[0]).powi(2) + (a[1] - g[1]).powi(2);
            }
        }
        ms /= (n * n) as f64;
        let h = self.hybrid(self.gram(&big, Some(chi)), ms);
        let kinetic = (&h * &state.gamma).trace().re;
        let pairing = self.pairing(&state.alpha);
        let field = self.field_energy(&big);
        let chemical = -self.params.mu * state.gamma.trace().re;
        let entropy_term = -self.params.t * 0.5 * entropy_of_block(&state.block())?;
        Ok(FreeEnergyBreakdown::new(kinetic, pairing, field, chemical, entropy_term))
    }

    fn check_dims(&self, state: &BdGState) -> Result<()> {
        let d = self.dim();
        if state.gamma.nrows() != d || state.alpha.nrows() != d || state.alpha.ncols() != d {
            return Err(Error::Domain(format!("state dimension {} does not match model dimension {d}", state.dim())));
        }
        Ok(())
    }

    /// `Λ = [[H_a - μ, 2v♯α], [(2v♯α)*, -(H_a - μ)‾]]`.
    pub fn lambda(&self, state: &BdGState) -> CMatrix {
        let d = self.dim();
        let mut h = self.kinetic_matrix(&state.a_prime);
        for i in 0..d {
            h[(i, i)] -= C64::new(self.params.mu, 0.0);
        }
        let off = self.v_sharp(&state.alpha) * C64::new(2.0, 0.0);
        let mut l = CMatrix::zeros(2 * d, 2 * d);
        l.view_mut((0, 0), (d, d)).copy_from(&h);
        l.view_mut((0, d), (d, d)).copy_from(&off);
        l.view_mut((d, 0), (d, d)).copy_from(&off.adjoint());
        l.view_mut((d, d), (d, d)).copy_from(&(-h.conjugate()));
        l
    }

    /// Current of the level-deviation part of `γ`, Fourier transformed:
    /// `Ĵ(k) = ∫ J e^{-ik·x}`, `J = Re Σ δγ_{qp} conj(φ_p)(Π - a')φ_q`.
    pub fn current_hat(&self, state: &BdGState) -> Vec<[C64; 2]> {
        let d = self.dim();
        let g = self.params.guiding;
        let mut dg = state.gamma.clone();
        for m in 0..=self.params.cutoff {
            let tr: C64 = (0..g).map(|k| dg[(m * g + k, m * g + k)]).sum::<C64>() / g as f64;
            for k in 0..g {
                dg[(m * g + k, m * g + k)] -= tr;
            }
        }
        let a = &state.a_prime;
        let mut out = vec![[C64::new(0.0, 0.0); 2]; a.len()];
        if dg.iter().all(|z| z.norm() == 0.0) {
            return out;
        }
        let mut col = vec![[C64::new(0.0, 0.0); 2]; d];
        for (i, &x) in self.points.iter().enumerate() {
            let av = a.eval(x);
            for q in 0..d {
                let f = self.phi[q][i];
                let pp = self.pi_phi[q][i];
                col[q] = [pp[0] - f * av[0], pp[1] - f * av[1]];
            }
            let mut j = [0.0; 2];
            for p in 0..d {
                let cp = self.phi[p][i].conj();
                let mut s = [C64::new(0.0, 0.0); 2];
                for q in 0..d {
                    let w = dg[(q, p)];
                    if w.norm_sqr() == 0.0 {
                        continue;
                    }
                    s[0] += w * col[q][0];
                    s[1] += w * col[q][1];
                }
                j[0] += (cp * s[0]).re;
                j[1] += (cp * s[1]).re;
            }
            let w = self.weights[i];
            for (o, k) in out.iter_mut().zip(&a.wavevectors) {
                let e = C64::from_polar(w, -(k[0] * x[0] + k[1] * x[1]));
                o[0] += e * j[0];
                o[1] += e * j[1];
            }
        }
        out
    }

    /// Bracket `(|Ω||k|² + Tr γ) c_k - P⊥Ĵ(k)` whose vanishing is the field equation.
    pub fn field_bracket(&self, state: &BdGState) -> Vec<[C64; 2]> {
        let jh = self.current_hat(state);
        let n_tot = state.gamma.trace().re;
        let area = self.geometry.cell_area;
        let a = &state.a_prime;
        a.wavevectors
            .iter()
            .zip(&a.coeffs)
            .zip(&jh)
            .map(|((k, c), j)| {
                let k2 = k[0] * k[0] + k[1] * k[1];
                let s = area * k2 + n_tot;
                let mut r = [c[0] * s - j[0], c[1] * s - j[1]];
                let dot = r[0] * k[0] + r[1] * k[1];
                r[0] -= dot * (k[0] / k2);
                r[1] -= dot * (k[1] / k2);
                r
            })
            .collect()
    }

    /// Gradient of `F_T` in `a'` for div-free `a'`, as `∂_{Re c} + i∂_{Im c}`.
    pub fn field_gradient(&self, state: &BdGState) -> Vec<[C64; 2]> {
        self.field_bracket(state).into_iter().map(|r| [r[0] * 4.0, r[1] * 4.0]).collect()
    }

    /// `Λ - T g'(Γ)` on the block.
    pub fn gamma_residual(&self, state: &BdGState) -> Result<CMatrix> {
        let block = state.block();
        let eigs = checked_spectrum(&block)?;
        if eigs.iter().any(|&v| !(v > 0.0 && v < 1.0)) {
            return Err(Error::ConstraintViolation("Γ touches the spectral boundary; g' undefined".into()));
        }
        let gp = herm_apply(&block, g_prime_raw)?;
        Ok(self.lambda(state) - gp * C64::new(self.params.t, 0.0))
    }

    /// Directional derivative `½ Tr(R Γ') + Re⟨g_a, δc⟩` along
    /// `Γ' = [[γ', α'], [α'*, -γ̄']]` and `δc`.
    pub fn directional_derivative(
        &self,
        state: &BdGState,
        dgamma: &CMatrix,
        dalpha: &CMatrix,
        dc: &[[C64; 2]],
    ) -> Result<f64> {
        let r = self.gamma_residual(state)?;
        let d = self.dim();
        let mut gp = gamma_block(dgamma, dalpha);
        let lower = -dgamma.conjugate();
        gp.view_mut((d, d), (d, d)).copy_from(&lower);
        let mut out = 0.5 * (r * gp).trace().re;
        for (g, c) in self.field_gradient(state).iter().zip(dc) {
            out += (g[0].conj() * c[0] + g[1].conj() * c[1]).re;
        }
        Ok(out)
    }
}

/// `F_T` of a state.
pub fn free_energy(state: &BdGState, model: &FreeEnergyModel) -> Result<FreeEnergyBreakdown> {
    model.breakdown(state)
}

/// `(‖Λ - T g'(Γ)‖_F, ‖field bracket‖/|Ω|)`.
pub fn bdg_residual(state: &BdGState, model: &FreeEnergyModel) -> Result<(f64, f64)> {
    let r = model.gamma_residual(state)?.norm();
    let a: f64 = model.field_bracket(state).iter().map(|c| c[0].norm_sqr() + c[1].norm_sqr()).sum::<f64>().sqrt();
    Ok((r, a / model.geometry.cell_area))
}

/// `-(1/T) Σ |α_{pq}|² k(h_p, h_q; T)`: the `ε²` coefficient of `½ Tr g` along
/// `Γ + εφ(α)` at the normal state.
pub fn quadratic_entropy_form_alpha(model: &FreeEnergyModel, alpha: &CMatrix) -> Result<f64> {
    if !admissibility_check(model, alpha, 1.0)? {
        return Err(Error::Inadmissible("αα* exceeds [γ(1-γ)]²".into()));
    }
    Ok(-model.kinetic_pair_form(alpha) / model.params.t)
}

/// `(1/T) Σ |γ'_{pq}|² (h_p - h_q)/(tanh(h_p/T) - tanh(h_q/T))`: the `ε²`
/// coefficient of `-½ Tr g` along the diagonal perturbation `γ → γ + εγ'`.
pub fn entropy_hessian_gamma(model: &FreeEnergyModel, gamma_pert: &CMatrix) -> f64 {
    let h = model.energies();
    let t = model.params.t;
    let d = model.dim();
    let mut acc = 0.0;
    for p in 0..d {
        for q in 0..d {
            acc += gamma_pert[(p, q)].norm_sqr() * gamma_kernel(h[p], h[q], t);
        }
    }
    acc / t
}

/// `αα* ≤ c [γ(1-γ)]²` for the normal-state `γ`, tested spectrally.
pub fn admissibility_check(model: &FreeEnergyModel, alpha: &CMatrix, c: f64) -> Result<bool> {
    let d = model.dim();
    let occ: Vec<f64> = model.energies().iter().map(|&h| g_sharp_raw(h / model.params.t)).collect();
    let mut m = alpha * alpha.adjoint() * C64::new(-1.0, 0.0);
    let mut scale: f64 = 0.0;
    for p in 0..d {
        let w = (occ[p] * (1.0 - occ[p])).powi(2) * c;
        scale = scale.max(w);
        m[(p, p)] += C64::new(w, 0.0);
    }
    let e = crate::linalg::herm_eigen(&m)?;
    Ok(e.values[0] >= -1e-14 * scale)
}


/// Random symmetric `α = G X G / max G` with `G = γ(1-γ)` at the normal state
/// and `‖X‖_F ≤ 1`, shrunk until it passes [`admissibility_check`].
pub fn random_admissible_alpha<R: rand::Rng>(model: &FreeEnergyModel, rng: &mut R) -> Result<CMatrix> {
    let d = model.dim();
    let g: Vec<f64> = model
        .energies()
        .iter()
        .map(|&h| {
            let f = g_sharp_raw(h / model.params.t);
            f * (1.0 - f)
        })
        .collect();
    let gmax = g.iter().cloned().fold(0.0, f64::max);
    if !(gmax > 0.0) {
        return Err(Error::Inadmissible("normal state has no fractional occupations".into()));
    }
    let x = CMatrix::from_fn(d, d, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let x = (&x + x.transpose()) * C64::new(0.5, 0.0);
    let xn = x.norm();
    let mut a = CMatrix::from_fn(d, d, |p, q| x[(p, q)] * (g[p] * g[q] / (gmax * xn)));
    for _ in 0..200 {
        if admissibility_check(model, &a, 1.0)? {
            return Ok(a);
        }
        a *= C64::new(0.7, 0.0);
    }
    Err(Error::Inadmissible("could not shrink α into the admissible set".into()))
}
