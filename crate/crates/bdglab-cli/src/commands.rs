//! One function per subcommand. Each returns a record plus CSV tables.

use bdglab::free_energy::{expansion_check, random_admissible_alpha, FreeEnergyModel, FreeEnergyParams};
use bdglab::minimizer::{minimize, project_constraints, seed_state};
use bdglab::model::{landau_levels, LatticeGeometry};
use bdglab::normal::{current_residual, solve_xi, NormalState};
use bdglab::stability::{
    birman_schwinger_value, build_stability_operator, find_tc, lowest_eigenpair, PairBasis, TcSetup,
};
use bdglab::{Error, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{DescentSection, RunConfig};
use crate::record::{num, CommandOutput, ResultRecord, Table};
use crate::CliError;

const XI_TOL: f64 = 1e-13;
const XI_MAX_ITER: usize = 2000;
const CURRENT_GRID: usize = 16;

fn provenance(cfg: &RunConfig) -> String {
    let t = &cfg.truncation;
    format!(
        "M={} channelCutoff={} fourierCutoff={} guidingStates={} quadOrder={} quadTol={:e}",
        t.m, t.channel_cutoff, t.fourier_cutoff, t.guiding_states, t.quad_order, t.quad_tol
    )
}

fn record(cfg: &RunConfig, command: &str) -> ResultRecord {
    let mut r = ResultRecord::new(cfg.hash(), command);
    r.provenance_note = provenance(cfg);
    r
}

fn output(record: ResultRecord, tables: Vec<Table>) -> CommandOutput {
    CommandOutput { record, tables, converged: true }
}

fn normal_state(cfg: &RunConfig) -> Result<NormalState, CliError> {
    let geom = cfg.geometry()?;
    let v = cfg.pair_potential()?;
    let basis = landau_levels(&geom, cfg.truncation.m);
    Ok(solve_xi(cfg.physics.t, cfg.physics.mu, &basis, &v, XI_TOL, XI_MAX_ITER)?)
}

pub fn cmd_normal(cfg: &RunConfig) -> Result<CommandOutput, CliError> {
    let state = normal_state(cfg)?;
    let current = current_residual(&state, CURRENT_GRID)?;
    let mut r = record(cfg, "normal");
    r.put("xi", state.xi);
    r.put("b", state.basis.geometry.b);
    r.put("iterations", state.iterations);
    r.put("fixedPointResidual", state.residual);
    r.put("lipschitz", state.lipschitz);
    r.put("observedRatio", state.observed_ratio);
    r.put("currentMaxNorm", current.max_norm);
    r.put("currentDrift", current.drift);
    r.put("occupations", state.occupations.clone());
    let mut warnings = state.warnings.clone();
    warnings.extend(current.warning);
    r.put("warnings", warnings);
    let mut t = Table::new("normal_occupations", &["m", "level", "shifted", "occupation"]);
    for (m, &f) in state.occupations.iter().enumerate() {
        t.push(vec![m.to_string(), num(state.basis.levels[m]), num(state.shifted_level(m)), num(f)]);
    }
    Ok(output(r, vec![t]))
}

fn default_e_grid(kmax: f64, t: f64) -> Vec<f64> {
    let (lo, hi) = (1e-3 * t.max(1e-6), 10.0 * kmax.max(t));
    let n = 20;
    (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect()
}

pub fn cmd_stability(cfg: &RunConfig) -> Result<CommandOutput, CliError> {
    let state = normal_state(cfg)?;
    let v = cfg.pair_potential()?;
    let basis = landau_levels(&cfg.geometry()?, cfg.truncation.m);
    let pb = PairBasis::new(&basis, cfg.truncation.channel_cutoff);
    let op = build_stability_operator(&state, &v, &pb, cfg.truncation.quad_tol)?;
    let (lambda, _) = lowest_eigenpair(&op)?;
    let kmax = op.kdiag.iter().cloned().fold(0.0, f64::max);
    let grid = match &cfg.stability {
        Some(s) if !s.e_grid.is_empty() => s.e_grid.clone(),
        _ => default_e_grid(kmax, state.t),
    };
    let mut r = record(cfg, "stability");
    r.put("lambdaMin", lambda);
    r.put("dimension", op.dim());
    r.put("xi", state.xi);
    r.put("stable", lambda > 0.0);
    let bs: Vec<Result<f64, Error>> = grid.par_iter().map(|&e| birman_schwinger_value(e, &op)).collect();
    let mut t = Table::new("stability_bs", &["E", "bs", "bsAboveOne", "lambdaBelowMinusE", "agree"]);
    match bs.iter().find_map(|b| b.as_ref().err()) {
        Some(Error::Indefinite(x)) => {
            r.put("birmanSchwinger", Value::Null);
            r.put("birmanSchwingerSkipped", format!("potential not attractive: -W has eigenvalue {x:e}"));
        }
        Some(other) => return Err(other.clone().into()),
        None => {
            let mut all = true;
            for (&e, b) in grid.iter().zip(&bs) {
                let b = *b.as_ref().expect("checked above");
                let (above, below) = (b > 1.0, lambda < -e);
                all &= above == below;
                t.push(vec![num(e), num(b), above.to_string(), below.to_string(), (above == below).to_string()]);
            }
            r.put("birmanSchwinger", bs.iter().map(|b| *b.as_ref().unwrap()).collect::<Vec<_>>());
            r.put("dualityConsistent", all);
        }
    }
    r.put("eGrid", grid);
    Ok(output(r, vec![t]))
}

pub fn cmd_tc_curve(cfg: &RunConfig) -> Result<CommandOutput, CliError> {
    let tc_cfg = cfg.tc.clone().ok_or_else(|| CliError::Config("tc-curve needs a \"tc\" block".into()))?;
    let geom = cfg.geometry()?;
    let v = cfg.pair_potential()?;
    let b_grid = tc_cfg.b_grid.clone().unwrap_or_else(|| vec![geom.b]);
    let results: Vec<Result<_, CliError>> = b_grid
        .par_iter()
        .map(|&b| {
            let g = LatticeGeometry::with_field(b, geom.tau, geom.n).map_err(|e| CliError::Config(e.to_string()))?;
            let setup = TcSetup {
                geometry: g,
                mu: cfg.physics.mu,
                cutoff: cfg.truncation.m,
                channels: cfg.truncation.channel_cutoff,
                quad_tol: cfg.truncation.quad_tol,
                scan_points: tc_cfg.scan_points,
            };
            Ok(find_tc(&setup, &v, (tc_cfg.t_range[0], tc_cfg.t_range[1]), tc_cfg.tol)?)
        })
        .collect();
    let mut r = record(cfg, "tc-curve");
    let mut curve = Table::new("tc_curve", &["b", "Tc"]);
    let mut scan = Table::new("tc_scan", &["b", "T", "lambdaMin"]);
    let mut tcs = Vec::new();
    let mut multiple = Vec::new();
    for (&b, res) in b_grid.iter().zip(results) {
        let res = res?;
        curve.push(vec![num(b), res.tc.map(num).unwrap_or_else(|| "none".into())]);
        for &(t, l) in &res.scan {
            scan.push(vec![num(b), num(t), num(l)]);
        }
        tcs.push(res.tc.map(Value::from).unwrap_or(Value::Null));
        multiple.push(res.multiple);
    }
    r.put("b", b_grid);
    r.put("Tc", tcs);
    r.put("multipleCrossings", multiple);
    Ok(output(r, vec![curve, scan]))
}

fn free_energy_model(cfg: &RunConfig, mu: f64) -> Result<FreeEnergyModel, CliError> {
    if !(cfg.physics.t > 0.0) {
        return Err(CliError::Config("the free energy needs T > 0".into()));
    }
    let t = &cfg.truncation;
    let params = FreeEnergyParams {
        t: cfg.physics.t,
        mu,
        cutoff: t.m,
        guiding: t.guiding_states,
        fourier_cutoff: t.fourier_cutoff,
        quad_order: t.quad_order,
        quad_tol: t.quad_tol,
    };
    Ok(FreeEnergyModel::new(cfg.geometry()?, cfg.pair_potential()?, params)?)
}

pub fn cmd_expansion(cfg: &RunConfig) -> Result<CommandOutput, CliError> {
    let ex = cfg.expansion.clone().ok_or_else(|| CliError::Config("expansion needs an \"expansion\" block".into()))?;
    let state = normal_state(cfg)?;
    let model = free_energy_model(cfg, cfg.physics.mu - state.xi)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let alphas = (0..ex.samples).map(|_| random_admissible_alpha(&model, &mut rng)).collect::<Result<Vec<_>, _>>()?;
    let reports = alphas
        .par_iter()
        .map(|a| expansion_check(&model, a, &ex.epsilons))
        .collect::<Result<Vec<_>, _>>()?;
    let mut r = record(cfg, "expansion");
    let mut t = Table::new("expansion", &["sample", "epsilon", "deltaF"]);
    for (i, rep) in reports.iter().enumerate() {
        for (e, d) in rep.epsilons.iter().zip(&rep.delta_f) {
            t.push(vec![i.to_string(), num(*e), num(*d)]);
        }
    }
    r.put("xi", state.xi);
    r.put("target", reports.iter().map(|x| x.target).collect::<Vec<_>>());
    r.put("fittedCoefficient", reports.iter().map(|x| x.coefficients[0]).collect::<Vec<_>>());
    r.put("relativeError", reports.iter().map(|x| x.relative_error).collect::<Vec<_>>());
    r.put("remainderSlope", reports.iter().map(|x| x.remainder_slope).collect::<Vec<_>>());
    r.put("rejectedEpsilons", reports.iter().map(|x| x.rejected.clone()).collect::<Vec<_>>());
    Ok(output(r, vec![t]))
}

pub fn cmd_minimize(cfg: &RunConfig) -> Result<CommandOutput, CliError> {
    let d = cfg.descent.clone().unwrap_or_else(DescentSection::default);
    let model = free_energy_model(cfg, cfg.physics.mu)?;
    let (mut seed, lam) = seed_state(&model, d.seed_amplitude)?;
    if d.noise > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let dim = model.dim();
        let x = bdglab::CMatrix::from_fn(dim, dim, |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * d.noise
        });
        seed.alpha += (&x + x.transpose()) * C64::new(0.5, 0.0);
        seed = project_constraints(&seed, d.clip_floor)?;
    }
    let rep = minimize(&model, &seed, &d.descent_config())?;
    let mut r = record(cfg, "minimize");
    r.put("converged", rep.converged);
    r.put("stalled", rep.stalled);
    r.put("iterations", rep.iterations);
    r.put("finalEnergy", *rep.energy_trace.last().expect("trace starts with the seed"));
    r.put("comparisonToNormal", rep.comparison_to_normal);
    r.put("alphaNorm", rep.alpha_norm);
    r.put("flux", rep.flux);
    r.put("residuals", json!([rep.residuals.0, rep.residuals.1]));
    r.put("spectralDistance", rep.spectral_distance);
    r.put("boundaryFlag", rep.boundary_flag);
    r.put("maxFluxError", rep.max_flux_error);
    r.put("maxConstraintDefect", rep.max_constraint_defect);
    r.put("seedModeEigenvalue", lam);
    let mut t = Table::new("minimize_trace", &["iteration", "energy"]);
    for (i, e) in rep.energy_trace.iter().enumerate() {
        t.push(vec![i.to_string(), num(*e)]);
    }
    let mut out = output(r, vec![t]);
    out.converged = rep.converged;
    Ok(out)
}
