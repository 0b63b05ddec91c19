//! Structural invariants of the domain types, checked on random inputs.

use bdglab::free_energy::{checked_spectrum, random_ph_state, BdGState, FreeEnergyModel, FreeEnergyParams};
use bdglab::minimizer::project_constraints;
use bdglab::model::{build_geometry, landau_levels, PairPotential};
use bdglab::normal::solve_xi;
use bdglab::stability::{build_stability_operator, PairBasis};
use bdglab::C64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn model(strength: f64) -> FreeEnergyModel {
    let g = build_geometry(0.5, C64::new(0.0, 1.0), 1).unwrap();
    let v = PairPotential::gaussian(strength, 1.0).unwrap();
    let p = FreeEnergyParams { t: 1.0, mu: 2.0, cutoff: 1, guiding: 2, fourier_cutoff: 1, quad_order: 16, quad_tol: 1e-10 };
    FreeEnergyModel::new(g, v, p).unwrap()
}

fn random_state(m: &FreeEnergyModel, seed: u64) -> BdGState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (gamma, alpha) = random_ph_state(m.dim(), 0.8, &mut rng).unwrap();
    let mut a_prime = m.zero_field();
    for (i, c) in a_prime.coeffs.iter_mut().enumerate() {
        let s = 0.03 * (1.0 + i as f64).recip();
        *c = [C64::new(s, -s), C64::new(-0.5 * s, s)];
    }
    a_prime.project_div_free();
    BdGState { gamma, alpha, a_prime, geometry: m.geometry }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn flux_is_quantised(delta in 0.05f64..2.0, re in -0.5f64..0.5, im in 0.3f64..3.0, n in 1u32..5) {
        let g = build_geometry(delta, C64::new(re, im), n).unwrap();
        let want = 2.0 * std::f64::consts::PI * n as f64;
        prop_assert!((g.b * g.cell_area - want).abs() <= 1e-12 * want);
    }

    #[test]
    fn gaussian_potential_is_even(strength in -3.0f64..3.0, range in 0.2f64..3.0, x in -4.0f64..4.0, y in -4.0f64..4.0) {
        let v = PairPotential::gaussian(strength, range).unwrap();
        prop_assert_eq!(v.value([x, y]), v.value([-x, -y]));
        let want = strength * 2.0 * std::f64::consts::PI * range * range;
        prop_assert!((v.vhat0() - want).abs() <= 1e-12 * want.abs().max(1e-300));
    }

    #[test]
    fn landau_ladder_has_uniform_gap(delta in 0.1f64..1.5, m in 0usize..12) {
        let g = build_geometry(delta, C64::new(0.0, 1.0), 1).unwrap();
        let basis = landau_levels(&g, m);
        prop_assert_eq!(basis.levels.len(), m + 1);
        for w in basis.levels.windows(2) {
            prop_assert!((w[1] - w[0] - 2.0 * g.b).abs() <= 1e-12 * g.b);
        }
    }

    #[test]
    fn normal_occupations_decrease(t in 0.5f64..2.0, mu in 0.0f64..3.0, strength in -0.3f64..-0.01) {
        let g = build_geometry(0.5, C64::new(0.0, 1.0), 1).unwrap();
        let v = PairPotential::gaussian(strength, 1.0).unwrap();
        let s = solve_xi(t, mu, &landau_levels(&g, 6), &v, 1e-12, 2000).unwrap();
        prop_assert!(s.xi < 0.0);
        prop_assert!(s.residual <= 1e-12);
        prop_assert!(s.occupations.iter().all(|&f| f > 0.0 && f < 1.0));
        prop_assert!(s.occupations.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn block_is_a_particle_hole_density(seed in any::<u64>()) {
        let m = model(-0.5);
        let st = random_state(&m, seed);
        prop_assert!((&st.gamma - st.gamma.adjoint()).norm() <= 1e-14);
        prop_assert!((&st.alpha - st.alpha.transpose()).norm() <= 1e-14);
        prop_assert!(checked_spectrum(&st.block()).is_ok());
        for (k, c) in st.a_prime.wavevectors.iter().zip(&st.a_prime.coeffs) {
            prop_assert!((c[0] * k[0] + c[1] * k[1]).norm() <= 1e-14);
        }
    }

    #[test]
    fn breakdown_sums_to_total(seed in any::<u64>()) {
        let m = model(-0.5);
        let b = m.breakdown(&random_state(&m, seed)).unwrap();
        let sum = b.kinetic + b.pairing + b.field + b.chemical + b.entropy_term;
        prop_assert!((sum - b.total).abs() <= 1e-12 * b.total.abs().max(1.0));
    }

    #[test]
    fn projection_respects_clip(seed in any::<u64>(), clip in 1e-6f64..0.1) {
        let m = model(-0.5);
        let p = project_constraints(&random_state(&m, seed), clip).unwrap();
        let eigs = checked_spectrum(&p.block()).unwrap();
        prop_assert!(eigs.iter().all(|&v| v >= clip - 1e-12 && v <= 1.0 - clip + 1e-12));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn stability_operator_structure(t in 0.5f64..2.0, strength in -0.3f64..-0.05) {
        let g = build_geometry(0.5, C64::new(0.0, 1.0), 1).unwrap();
        let v = PairPotential::gaussian(strength, 1.0).unwrap();
        let basis = landau_levels(&g, 2);
        let s = solve_xi(t, 1.0, &basis, &v, 1e-12, 2000).unwrap();
        let op = build_stability_operator(&s, &v, &PairBasis::new(&basis, 3), 1e-10).unwrap();
        prop_assert!(op.kdiag.iter().all(|&k| k >= t * (1.0 - 1e-14)));
        prop_assert!((&op.w - op.w.transpose()).amax() <= 1e-12);
        prop_assert!((0..op.dim()).all(|i| op.w[(i, i)] <= 0.0));
    }
}
