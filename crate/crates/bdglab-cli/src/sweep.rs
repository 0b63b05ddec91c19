//! Cartesian sweeps over `(T, b, strength)`.

use rayon::prelude::*;
use serde_json::json;
use std::path::Path;

use crate::commands::{cmd_expansion, cmd_minimize, cmd_normal, cmd_stability, cmd_tc_curve};
use crate::config::{RunConfig, SweepCommand};
use crate::record::{num, CommandOutput, ResultRecord, Table};
use crate::CliError;

/// One grid point: its coordinates and the command outcome.
#[derive(Debug)]
pub struct SweepPoint {
    pub t: f64,
    pub b: f64,
    pub strength: f64,
    pub config: RunConfig,
    pub result: Result<CommandOutput, CliError>,
}

pub fn run_command(cmd: SweepCommand, cfg: &RunConfig) -> Result<CommandOutput, CliError> {
    match cmd {
        SweepCommand::Normal => cmd_normal(cfg),
        SweepCommand::Stability => cmd_stability(cfg),
        SweepCommand::TcCurve => cmd_tc_curve(cfg),
        SweepCommand::Expansion => cmd_expansion(cfg),
        SweepCommand::Minimize => cmd_minimize(cfg),
    }
}

/// Grid points in row-major `(T, b, strength)` order.
pub fn grid(cfg: &RunConfig) -> Result<Vec<(f64, f64, f64, RunConfig)>, CliError> {
    let sweep = cfg.sweep.as_ref().ok_or_else(|| CliError::Config("sweep needs a \"sweep\" block".into()))?;
    let b0 = cfg.geometry()?.b;
    let ts = sweep.t.clone().unwrap_or_else(|| vec![cfg.physics.t]);
    let bs = sweep.b.clone().unwrap_or_else(|| vec![b0]);
    let ss = sweep.strength.clone().unwrap_or_else(|| vec![cfg.potential.strength]);
    let mut out = Vec::with_capacity(ts.len() * bs.len() * ss.len());
    for &t in &ts {
        for &b in &bs {
            for &s in &ss {
                let mut c = if sweep.b.is_some() { cfg.with_field(b) } else { cfg.clone() };
                c.physics.t = t;
                c.potential.strength = s;
                c.sweep = None;
                c.validate()?;
                out.push((t, b, s, c));
            }
        }
    }
    Ok(out)
}

pub fn cmd_sweep(cfg: &RunConfig) -> Result<Vec<SweepPoint>, CliError> {
    let cmd = cfg.sweep.as_ref().ok_or_else(|| CliError::Config("sweep needs a \"sweep\" block".into()))?.command;
    let points = grid(cfg)?;
    Ok(points
        .into_par_iter()
        .map(|(t, b, strength, config)| {
            let result = run_command(cmd, &config);
            SweepPoint { t, b, strength, config, result }
        })
        .collect())
}

/// Write per-point outputs under `dir/point_NNNN/` plus an index; returns the
/// first failing exit code in grid order.
pub fn write_sweep(points: &[SweepPoint], dir: &Path) -> Result<i32, CliError> {
    let mut index = Table::new("sweep_index", &["index", "T", "b", "strength", "configHash", "status"]);
    let mut records: Vec<ResultRecord> = Vec::with_capacity(points.len());
    let mut code = 0;
    for (i, p) in points.iter().enumerate() {
        let hash = p.config.hash();
        let status = match &p.result {
            Ok(out) => {
                out.write(&dir.join(format!("point_{i:04}")))?;
                records.push(out.record.clone());
                if out.converged {
                    "ok".to_string()
                } else {
                    if code == 0 {
                        code = 3;
                    }
                    "not-converged".to_string()
                }
            }
            Err(e) => {
                let mut r = ResultRecord::new(hash.clone(), "error");
                r.put("error", e.to_string());
                r.put("exitCode", e.exit_code());
                records.push(r);
                if code == 0 {
                    code = e.exit_code();
                }
                format!("error({})", e.exit_code())
            }
        };
        index.push(vec![i.to_string(), num(p.t), num(p.b), num(p.strength), hash, status]);
    }
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(e.to_string()))?;
    let mut text = serde_json::to_string_pretty(&json!(records)).expect("records serialize");
    text.push('\n');
    std::fs::write(dir.join("sweep.json"), text).map_err(|e| CliError::Io(e.to_string()))?;
    std::fs::write(dir.join("sweep_index.csv"), index.to_csv()?).map_err(|e| CliError::Io(e.to_string()))?;
    Ok(code)
}
