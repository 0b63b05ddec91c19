use serde_json::Value;
use std::path::Path;
use std::process::Command;

const BIN: &str = env!("CARGO_BIN_EXE_bdglab");

fn config(strength: f64, extra: &str) -> String {
    format!(
        r#"{{
  "geometry": {{"delta": 0.5, "tau": [0.0, 1.0], "n": 1}},
  "physics": {{"T": 1.0, "mu": 1.5707963267948966}},
  "potential": {{"kind": "gaussian", "strength": {strength}, "range": 1.0}},
  "truncation": {{"M": 1, "channelCutoff": 4, "fourierCutoff": 1, "quadTol": 1e-10, "guidingStates": 3, "quadOrder": 32}},
  "tc": {{"Trange": [0.05, 50.0], "tol": 1e-6, "bGrid": [1.0, 1.5707963267948966], "scanPoints": 8}},
  "expansion": {{"epsilons": [0.01, 0.005, 0.0025], "samples": 2}},
  "descent": {{"maxIters": 400}}{extra},
  "seed": 11
}}"#
    )
}

/// Thin cell (`τ = 0.1i`, `b = 2`) with the lowest level near the Fermi surface.
fn thin_config(t: f64) -> String {
    let delta = (0.1f64 * 2.0 / (2.0 * std::f64::consts::PI)).sqrt();
    format!(
        r#"{{
  "geometry": {{"delta": {delta}, "tau": [0.0, 0.1], "n": 1}},
  "physics": {{"T": {t}, "mu": 1.99}},
  "potential": {{"kind": "gaussian", "strength": -1.0, "range": 1.0}},
  "truncation": {{"M": 1, "channelCutoff": 4, "fourierCutoff": 1, "quadTol": 1e-10}},
  "tc": {{"Trange": [0.04, 200.0], "tol": 1e-6, "bGrid": [2.0, 2.2], "scanPoints": 8}},
  "seed": 1
}}"#
    )
}

fn run(dir: &Path, cmd: &str, cfg: &str, workers: &str) -> i32 {
    let path = dir.join("config.json");
    std::fs::write(&path, cfg).unwrap();
    let out = Command::new(BIN)
        .args([cmd, "--config", path.to_str().unwrap(), "--out", dir.join("out").to_str().unwrap(), "--workers", workers])
        .output()
        .unwrap();
    out.status.code().unwrap()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn outputs(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = walk(&dir.join("out"));
    files.sort();
    files.into_iter().map(|p| (p.strip_prefix(dir).unwrap().display().to_string(), std::fs::read(&p).unwrap())).collect()
}

fn walk(dir: &Path) -> Vec<std::path::PathBuf> {
    let mut out = Vec::new();
    for e in std::fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        if p.is_dir() {
            out.extend(walk(&p));
        } else {
            out.push(p);
        }
    }
    out
}

#[test]
fn normal_zero_and_attractive() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(run(d.path(), "normal", &config(0.0, ""), "1"), 0);
    let r = read_json(&d.path().join("out/normal.json"));
    assert_eq!(r["outputs"]["xi"].as_f64().unwrap(), 0.0);
    assert_eq!(r["command"], "normal");
    assert!(d.path().join("out/normal_occupations.csv").exists());
    assert_eq!(run(d.path(), "normal", &config(-1.0, ""), "1"), 0);
    let r = read_json(&d.path().join("out/normal.json"));
    assert!(r["outputs"]["xi"].as_f64().unwrap() < 0.0);
}

#[test]
fn stability_free_and_attractive() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(run(d.path(), "stability", &config(0.0, ""), "2"), 0);
    let r = read_json(&d.path().join("out/stability.json"));
    assert!(r["outputs"]["lambdaMin"].as_f64().unwrap() >= 1.0 - 1e-12);
    assert_eq!(r["outputs"]["dualityConsistent"], true);
    assert_eq!(run(d.path(), "stability", &thin_config(0.04), "2"), 0);
    let r = read_json(&d.path().join("out/stability.json"));
    assert!(r["outputs"]["lambdaMin"].as_f64().unwrap() < 0.0);
    assert_eq!(r["outputs"]["dualityConsistent"], true);
}

#[test]
fn tc_curve_and_expansion_run() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(run(d.path(), "tc-curve", &thin_config(0.04), "2"), 0);
    let csv = std::fs::read_to_string(d.path().join("out/tc_curve.csv")).unwrap();
    assert!(csv.starts_with("b,Tc\n"));
    assert_eq!(csv.lines().count(), 3);
    assert!(!csv.contains("none"));
    assert_eq!(run(d.path(), "expansion", &config(-1.0, ""), "2"), 0);
    let r = read_json(&d.path().join("out/expansion.json"));
    for e in r["outputs"]["relativeError"].as_array().unwrap() {
        assert!(e.as_f64().unwrap() < 1e-6);
    }
}

#[test]
fn minimize_and_non_convergence_exit() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(run(d.path(), "minimize", &config(-1.0, ""), "1"), 0);
    let r = read_json(&d.path().join("out/minimize.json"));
    assert!((r["outputs"]["flux"].as_f64().unwrap() - 1.0).abs() < 1e-10);
    let cfg = config(-8.0, "").replace("\"maxIters\": 400", "\"maxIters\": 1");
    assert_eq!(run(d.path(), "minimize", &cfg, "1"), 3);
    assert!(d.path().join("out/minimize_trace.csv").exists());
}

#[test]
fn config_errors_exit_two() {
    let d = tempfile::tempdir().unwrap();
    let cfg = config(-1.0, "").replace("\"seed\": 11", "\"seed\": 11, \"bogus\": true");
    assert_eq!(run(d.path(), "normal", &cfg, "1"), 2);
    let cfg = config(-1.0, "").replace("\"delta\": 0.5", "\"delta\": -0.5");
    assert_eq!(run(d.path(), "normal", &cfg, "1"), 2);
    assert_eq!(run(d.path(), "tc-curve", &config(-1.0, "").replace("\"tc\"", "\"tcx\""), "1"), 2);
}

#[test]
fn outputs_are_byte_identical_across_workers() {
    let extra = r#",
  "sweep": {"command": "stability", "T": [1.0, 2.0], "strength": [-1.0, -0.5]}"#;
    for cmd in ["normal", "stability", "expansion", "minimize", "sweep", "tc-curve"] {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let cfg = if cmd == "tc-curve" { thin_config(0.04) } else { config(-1.0, extra) };
        assert_eq!(run(a.path(), cmd, &cfg, "1"), 0, "{cmd}");
        assert_eq!(run(b.path(), cmd, &cfg, "4"), 0, "{cmd}");
        assert_eq!(outputs(a.path()), outputs(b.path()), "{cmd}");
    }
}

#[test]
fn sweep_grid_records() {
    let d = tempfile::tempdir().unwrap();
    let extra = r#",
  "sweep": {"command": "normal", "T": [1.0, 2.0], "b": [1.0, 1.5]}"#;
    assert_eq!(run(d.path(), "sweep", &config(-1.0, extra), "3"), 0);
    let recs = read_json(&d.path().join("out/sweep.json"));
    let recs = recs.as_array().unwrap();
    assert_eq!(recs.len(), 4);
    let mut hashes: Vec<_> = recs.iter().map(|r| r["configHash"].as_str().unwrap().to_string()).collect();
    hashes.sort();
    hashes.dedup();
    assert_eq!(hashes.len(), 4);

    // a one-point grid reproduces the single command
    let one = tempfile::tempdir().unwrap();
    let extra = r#",
  "sweep": {"command": "normal"}"#;
    assert_eq!(run(one.path(), "sweep", &config(-1.0, extra), "1"), 0);
    let single = tempfile::tempdir().unwrap();
    assert_eq!(run(single.path(), "normal", &config(-1.0, ""), "1"), 0);
    let swept = read_json(&one.path().join("out/point_0000/normal.json"));
    let direct = read_json(&single.path().join("out/normal.json"));
    assert_eq!(swept["outputs"], direct["outputs"]);
    assert_eq!(swept["configHash"], direct["configHash"]);
}
