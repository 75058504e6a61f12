use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn qcdual(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcdual"))
        .args(args)
        .env_remove("QCDUAL_SEED")
        .output()
        .expect("binary runs")
}

fn qcdual_env(args: &[&str], seed: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcdual"))
        .args(args)
        .env("QCDUAL_SEED", seed)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn two_site_duality_passes_in_every_sector() {
    let out = qcdual(&["duality", "--n", "2", "--eta", "1", "--twist", "2,1", "--x", "0,2", "--sector", "all"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&out);
    assert_eq!(r["schema"], "qcdual-report/1");
    assert_eq!(r["passed"], true);
    let sectors = r["payload"]["sectors"].as_array().unwrap();
    let ms: Vec<u64> = sectors.iter().map(|s| s["m"].as_u64().unwrap()).collect();
    assert_eq!(ms, vec![0, 1, 2]);
    assert!(sectors.iter().all(|s| s["passed"] == true));
    // complex numbers are [re, im]
    let h = &sectors[0]["records"][0]["h"][0];
    assert_eq!(h.as_array().unwrap().len(), 2);
    assert!(r["timestamp"].is_u64());
}

#[test]
fn missing_config_is_a_usage_error() {
    let out = qcdual(&["spectrum", "--config", "missing.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
}

#[test]
fn two_site_inverse_has_one_spurious_solution() {
    let out = qcdual(&["invert", "--n", "2", "--sector", "0", "--no-timestamp"]);
    assert_eq!(out.status.code(), Some(0));
    let s = &json(&out)["payload"]["sectors"][0];
    assert_eq!(s["solution_count"], 2);
    assert_eq!(s["matched_count"], 1);
    let unmatched: Vec<&Value> = s["solutions"].as_array().unwrap().iter().filter(|v| v["matched"] == false).collect();
    assert_eq!(unmatched.len(), 1);
    let h: Vec<f64> = unmatched[0]["h"].as_array().unwrap().iter().map(|z| z[0].as_f64().unwrap()).collect();
    assert!((h[0] - 3.0).abs() < 1e-8 && (h[1] - 1.0).abs() < 1e-8, "{h:?}");
}

#[test]
fn reports_are_deterministic() {
    let args = ["invert", "--n", "3", "--x", "0,0.7,1.9", "--starts", "60", "--no-timestamp"];
    let a = qcdual(&args);
    let b = qcdual(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = qcdual(&["bethe", "--n", "3", "--x", "0,0.7,1.9", "--no-timestamp"]);
    let d = qcdual(&["bethe", "--n", "3", "--x", "0,0.7,1.9", "--no-timestamp"]);
    assert_eq!(c.stdout, d.stdout);
}

#[test]
fn echoed_config_reproduces_the_payload() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.json");
    let second = dir.path().join("second.json");
    let out = qcdual(&["bethe", "--x", "0,0.4,1.3,2.2", "--sector", "2", "--output", first.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let out = qcdual(&["bethe", "--config", first.to_str().unwrap(), "--output", second.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let (a, b) = (read_json(&first), read_json(&second));
    assert_eq!(a["payload"], b["payload"]);
    assert_eq!(a["config"]["chain"], b["config"]["chain"]);

    // the echo alone, extracted into a config file, does the same
    let echo = dir.path().join("echo.json");
    std::fs::write(&echo, serde_json::to_string(&a["config"]).unwrap()).unwrap();
    let out = qcdual(&["bethe", "--config", echo.to_str().unwrap(), "--output", second.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(read_json(&second)["payload"], a["payload"]);
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{"command": "spectrum", "chain": {"eta": 0.5, "twist": [1.5, 0.5], "x": [0, 1.2, 2.9]},
            "sector": 1, "solver": {"seed": 11}, "output": {"timestamp": false}}"#,
    )
    .unwrap();
    let out = qcdual(&["spectrum", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert!(r.get("timestamp").is_none());
    assert_eq!(r["config"]["chain"]["n"], 3);
    assert_eq!(r["config"]["solver"]["seed"], 11);
    assert_eq!(r["payload"]["sectors"].as_array().unwrap().len(), 1);

    let out = qcdual(&["spectrum", "--config", cfg.to_str().unwrap(), "--eta", "0.3", "--sector", "all", "--seed", "5"]);
    let r = json(&out);
    assert_eq!(r["config"]["chain"]["eta"].as_f64(), Some(0.3));
    assert_eq!(r["config"]["solver"]["seed"], 5);
    assert_eq!(r["payload"]["sectors"].as_array().unwrap().len(), 4);
}

#[test]
fn seed_from_environment() {
    let out = qcdual_env(&["spectrum", "--no-timestamp"], "99");
    assert_eq!(json(&out)["config"]["solver"]["seed"], 99);
    let out = qcdual_env(&["spectrum", "--no-timestamp", "--seed", "3"], "99");
    assert_eq!(json(&out)["config"]["solver"]["seed"], 3);
    let out = qcdual_env(&["spectrum"], "not-a-number");
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn invalid_chain_names_the_pair() {
    let out = qcdual(&["spectrum", "--eta", "1", "--x", "0,3,1"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("(3,1)"), "{err}");

    let out = qcdual(&["gaudin", "--x", "0.5,-1,0.5"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("(1,3)"));
}

#[test]
fn usage_errors() {
    assert_eq!(qcdual(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(qcdual(&[]).status.code(), Some(1));
    assert_eq!(qcdual(&["spectrum", "--twist", "1,2,3"]).status.code(), Some(1));
    assert_eq!(qcdual(&["spectrum", "--n", "3", "--x", "0,1"]).status.code(), Some(1));
    assert_eq!(qcdual(&["spectrum", "--sector", "5"]).status.code(), Some(1));
    assert_eq!(qcdual(&["invert", "--format", "csv"]).status.code(), Some(1));
    assert_eq!(qcdual(&["--help"]).status.code(), Some(0));

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"chain": {"n": 2, "spin": 1}}"#).unwrap();
    let out = qcdual(&["spectrum", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("spin"));
}

#[test]
fn failed_check_exits_2_and_still_writes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = qcdual(&["duality", "--tol", "1e-40", "--x", "0,1.3,2.9", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let r = read_json(&path);
    assert_eq!(r["passed"], false);
    assert!(r["checks"].as_array().unwrap().iter().any(|c| c["passed"] == false));
}

#[test]
fn csv_spectrum_table() {
    let out = qcdual(&["spectrum", "--n", "3", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let mut rdr = csv::Reader::from_reader(out.stdout.as_slice());
    let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header.len(), 2 + 2 * 3 + 1);
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 8);
    let v: f64 = rows[0][2].parse().unwrap();
    assert!((v - 0.75).abs() < 1e-15);
}

#[test]
fn dynamics_and_limits() {
    let out = qcdual(&["dynamics", "--eta", "0.4", "--x", "-1.5,0.1,1.7", "--v", "-0.8,-1.1,-0.9", "--no-timestamp"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&out);
    assert_eq!(r["payload"]["steps"], 1000);
    assert!(r["payload"]["integral_drift"].as_f64().unwrap() < 1e-8);

    let out = qcdual(&["limits", "--x", "0,1.2,-0.9", "--twist", "0.8,-0.3", "--v", "0.4,-0.7,0.2"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["payload"]["rows"].as_array().unwrap().len(), 4);
    assert!((r["payload"]["slopes"]["lax"].as_f64().unwrap() - 1.0).abs() < 0.1);
}

#[test]
fn collision_still_writes_a_report() {
    // RS pair with x_2 - x_1 crossing eta
    let out = qcdual(&["dynamics", "--eta", "0.5", "--x", "0,2", "--v", "-0.2,-3", "--t-end", "3", "--dt", "1e-3"]);
    assert_eq!(out.status.code(), Some(2));
    let r = json(&out);
    assert_eq!(r["passed"], false);
}

#[test]
fn invariant_battery() {
    let out = qcdual(&["--check"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.lines().filter(|l| l.ends_with("PASS")).count() > 20, "{text}");
    assert!(!text.contains("FAIL"));
    assert_eq!(qcdual(&["--check", "spectrum"]).status.code(), Some(1));
}
