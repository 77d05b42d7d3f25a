use std::path::Path;
use std::process::{Command, Output};

const NN_PAIR: &str = r#"
seed = 3

[kernel]
dim = 1
preset = "nn"

[interval]
a = 0.0
b = 1.0

[geometry]
kind = "region"
sites = [[0], [1]]

[boundary]
values = [{ site = [-1], value = 0.0 }, { site = [2], value = 1.0 }]
"#;

const TORUS: &str = r#"
seed = 5

[kernel]
dim = 1
preset = "nn"

[interval]
a = 0.0
b = 1.0

[geometry]
kind = "torus"
extents = [8]
"#;

fn run(dir: &Path, sub: &str, config: &str, extra: &[&str]) -> Output {
    let path = dir.join(format!("{sub}.toml"));
    std::fs::write(&path, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_truncfield"))
        .arg(sub)
        .arg("--config")
        .arg(&path)
        .arg("--out")
        .arg(dir.join("out"))
        .args(extra)
        .output()
        .unwrap()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn unknown_field_reports_path_and_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let config = NN_PAIR.replace("preset = \"nn\"", "preset = \"nn\"\nradius = 3");
    let out = run(tmp.path(), "spec-check", &config, &[]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("kernel"), "{stderr}");
}

#[test]
fn bad_interval_is_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let config = NN_PAIR.replace("b = 1.0", "b = -1.0");
    let out = run(tmp.path(), "spec-check", &config, &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("interval"));
}

#[test]
fn missing_config_file_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_truncfield"))
        .args(["pd-check", "--config"])
        .arg(tmp.path().join("absent.toml"))
        .arg("--out")
        .arg(tmp.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn volume_command_on_torus_is_unsupported() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(tmp.path(), "pd-check", TORUS, &[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn spec_check_reports_two_site_gaussian() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(tmp.path(), "spec-check", NN_PAIR, &[]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&tmp.path().join("out/spec_check.json"));
    assert_eq!(doc["command"], "spec-check");
    assert_eq!(doc["pass"], true);
    let r = &doc["result"];
    assert_eq!(r["A"], serde_json::json!([[1.0, -0.5], [-0.5, 1.0]]));
    assert_eq!(r["B"], serde_json::json!([[0.5, 0.0], [0.0, 0.5]]));
    let mean: Vec<f64> = r["mean"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    assert!((mean[0] - 1.0 / 3.0).abs() < 1e-15 && (mean[1] - 2.0 / 3.0).abs() < 1e-15);
    let cov = &r["covariance"];
    assert!((cov[0][0].as_f64().unwrap() - 4.0 / 3.0).abs() < 1e-15);
    assert!((cov[0][1].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-15);
}

#[test]
fn sandwich_trace_starts_at_full_gap() {
    let tmp = tempfile::tempdir().unwrap();
    let config = format!("{TORUS}\n[sandwich]\nsweeps = 20\n");
    let out = run(tmp.path(), "sandwich", &config, &[]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(tmp.path().join("out/sandwich_trace.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("sweep,sup_gap,mean_gap"));
    assert_eq!(lines.next(), Some("0,1,1"));
    assert_eq!(csv.lines().count(), 22);
}

#[test]
fn injected_fault_fails_check_with_exit_1() {
    let tmp = tempfile::tempdir().unwrap();
    let config = format!("{TORUS}\n[sandwich]\nsweeps = 20\nfault_at_update = 30\n");
    let out = run(tmp.path(), "sandwich", &config, &[]);
    assert_eq!(out.status.code(), Some(1));
    let doc = json(&tmp.path().join("out/sandwich.json"));
    assert_eq!(doc["pass"], false);
}

#[test]
fn seed_flag_overrides_config() {
    let tmp = tempfile::tempdir().unwrap();
    let config = format!("{NN_PAIR}\n[af_probe]\ntrials = 10\n");
    let out = run(tmp.path(), "af-probe", &config, &["--seed", "99"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&tmp.path().join("out/af_probe.json"));
    assert_eq!(doc["seed"], 99);
    assert_eq!(doc["config"]["seed"], 99);
}

#[test]
fn different_seeds_change_probe_draws() {
    let tmp = tempfile::tempdir().unwrap();
    let config = format!("{NN_PAIR}\n[af_probe]\ntrials = 10\n");
    run(tmp.path(), "af-probe", &config, &["--seed", "1"]);
    let a = std::fs::read(tmp.path().join("out/af_probe_deltas.csv")).unwrap();
    run(tmp.path(), "af-probe", &config, &["--seed", "2"]);
    let b = std::fs::read(tmp.path().join("out/af_probe_deltas.csv")).unwrap();
    assert_ne!(a, b);
}
