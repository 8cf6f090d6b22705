use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const MINIMAL: &str = r#"
seed = 1

[ring]
kind = "modular"
n = 2
lambda = 1

[space]
l = 3
ranks = [0, 1, 1, 1]
param = "maximal"
"#;

fn oddu(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_oddu"));
    cmd.args(args).env_remove("ODDU_CAP");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("oddu runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn run_with(config: &str, sub: &str, extra: &[&str]) -> (Output, Option<serde_json::Value>) {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", config);
    let out = dir.path().join("r.json");
    let mut args = vec![sub, "--config", cfg.to_str().unwrap(), "--output", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    let o = oddu(&args, &[]);
    let report = std::fs::read_to_string(&out).ok().map(|t| serde_json::from_str(&t).unwrap());
    (o, report)
}

fn check_names(report: &serde_json::Value) -> Vec<(String, String)> {
    let mut out = Vec::new();
    for c in report["campaigns"].as_array().unwrap() {
        for s in c["sections"].as_array().unwrap() {
            for ch in s["checks"].as_array().unwrap() {
                out.push((ch["name"].as_str().unwrap().to_string(), ch["status"].as_str().unwrap().to_string()));
            }
        }
    }
    out
}

#[test]
fn relations_on_the_minimal_config_is_green() {
    let (o, report) = run_with(MINIMAL, "relations", &["--no-timestamp"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report = report.expect("report written");
    assert_eq!(report["status"], "pass");
    let checks = check_names(&report);
    for n in (1..=10).map(|k| format!("NQ{k}")).chain((1..=8).map(|k| format!("T{k}"))) {
        assert!(checks.iter().any(|(name, st)| *name == n && st == "pass"), "{n} missing or red");
    }
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("relations: pass"));
}

#[test]
fn lambda_that_is_not_a_unit_is_a_field_level_error() {
    let cfg = MINIMAL.replace("n = 2", "n = 4").replace("lambda = 1", "lambda = 2");
    let (o, report) = run_with(&cfg, "lambda", &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(report.is_none());
    let e = stderr(&o);
    assert!(e.contains("ring.lambda") && e.contains("InvalidLambda"), "{e}");
}

#[test]
fn missing_ranks_is_a_parse_error() {
    let cfg = MINIMAL.replace("ranks = [0, 1, 1, 1]\n", "");
    let (o, _) = run_with(&cfg, "lambda", &[]);
    assert_eq!(o.status.code(), Some(2));
    let e = stderr(&o);
    assert!(e.contains("parse error") && e.contains("ranks"), "{e}");
}

#[test]
fn unknown_ring_kind_and_bad_odd_block_are_reported_together() {
    let cfg = MINIMAL
        .replace("kind = \"modular\"", "kind = \"adeles\"")
        .replace("ranks = [0, 1, 1, 1]", "ranks = [1, 1, 1, 1]\nodd_block = [[0]]");
    let (o, _) = run_with(&cfg, "lambda", &[]);
    assert_eq!(o.status.code(), Some(2));
    let e = stderr(&o);
    assert!(e.contains("unknown ring kind"), "{e}");
}

#[test]
fn unknown_flags_are_rejected() {
    let o = oddu(&["relations", "--config", "x.toml", "--frobnicate"], &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--frobnicate"));
}

#[test]
fn missing_config_file_exits_2() {
    let o = oddu(&["lambda", "--config", "/nonexistent/oddu.toml"], &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn a_tiny_cap_surfaces_cap_exceeded() {
    let (o, report) = run_with(MINIMAL, "sandwich", &["--cap", "10"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(report.is_none());
    assert!(stderr(&o).contains("cap exceeded"), "{}", stderr(&o));
}

#[test]
fn the_cap_can_come_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", MINIMAL);
    let out = dir.path().join("r.json");
    let o = oddu(&["groups", "--config", cfg.to_str().unwrap(), "--output", out.to_str().unwrap()], &[("ODDU_CAP", "10")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("cap exceeded"));
}

#[test]
fn reports_are_byte_stable_without_timestamps() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", MINIMAL);
    let mut texts = Vec::new();
    for k in 0..2 {
        let out = dir.path().join(format!("r{k}.json"));
        let o = oddu(&["lambda", "--config", cfg.to_str().unwrap(), "--output", out.to_str().unwrap(), "--no-timestamp"], &[]);
        assert_eq!(o.status.code(), Some(0));
        texts.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(texts[0], texts[1]);
    let v: serde_json::Value = serde_json::from_slice(&texts[0]).unwrap();
    assert!(v.get("timestamp").is_none());
    assert_eq!(v["tool"], "oddu");
    assert_eq!(v["config"]["space"]["ranks"], serde_json::json!([0, 1, 1, 1]));
}

#[test]
fn seed_override_is_echoed() {
    let (o, report) = run_with(MINIMAL, "lambda", &["--seed", "99", "--no-timestamp"]);
    assert_eq!(o.status.code(), Some(0));
    let r = report.unwrap();
    assert_eq!(r["seed"], 99);
    assert_eq!(r["config"]["seed"], 99);
}

#[test]
fn timestamps_are_present_by_default() {
    let (o, report) = run_with(MINIMAL, "lambda", &[]);
    assert_eq!(o.status.code(), Some(0));
    let r = report.unwrap();
    assert!(r["timestamp"].as_u64().is_some());
    assert!(r["campaigns"][0]["sections"][0]["timing_ms"].is_u64());
}
