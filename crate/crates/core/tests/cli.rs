use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use bc_core::report::{report_json, Report};
use serde_json::Value;

const SMALL_CONFIG: &str = r#"{
  "map": { "zeros": [[0.5, 0.0], [-0.3, 0.4], [0.0, -0.7]] },
  "alphas": [0.0, 1.5],
  "grid": { "max_level": 6, "coarse_level": 4, "boundary_samples": 128 },
  "seed": 11
}"#;

fn bcmap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bcmap")).args(args).output().unwrap()
}

fn write_config(dir: &Path) -> String {
    let path = dir.join("config.json");
    fs::write(&path, SMALL_CONFIG).unwrap();
    path.to_str().unwrap().to_string()
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn analyze_is_deterministic_and_complete() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    let grids = dir.path().join("grids");
    for (out, g) in [(&a, Some(&grids)), (&b, None)] {
        let mut args = vec!["analyze", "--config", &config, "--out", out.to_str().unwrap()];
        if let Some(g) = g {
            args.extend(["--grids", g.to_str().unwrap()]);
        }
        let run = bcmap(&args);
        assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());

    let report: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(report["header"]["schema"], "bc-report/1");
    assert_eq!(report["header"]["seed"], 11);
    let sections = report["sections"].as_object().unwrap();
    for label in [
        "1", "1a", "1b", "1c", "1d", "1e", "1f", "2", "3", "4", "5a", "5b", "5c", "6.critical_set",
        "6.quasi_separation", "6.density", "6.gce_residual", "6.jensen", "6.maximality", "consistency",
    ] {
        let s = &sections[label];
        assert!(["ok", "skipped", "failed"].contains(&s["status"].as_str().unwrap()), "{label}");
        assert!(s["title"].is_string(), "{label}");
    }
    assert_eq!(sections["6.maximality"]["status"], "skipped");

    // one CSV per grid, each with the header row
    let names: Vec<String> = report["grids"].as_object().unwrap().keys().cloned().collect();
    assert!(names.iter().any(|n| n == "diameter"));
    for name in names {
        let csv = fs::read_to_string(grids.join(format!("{name}.csv"))).unwrap();
        assert!(csv.starts_with("key,value\n"), "{name}");
    }
}

#[test]
fn report_round_trips_through_json() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    let out = bcmap(&["analyze", "--config", &config]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let report: Report = serde_json::from_str(&text).unwrap();
    let again = report_json(&report).unwrap();
    assert_eq!(
        serde_json::from_str::<Value>(&text).unwrap(),
        serde_json::from_str::<Value>(&again).unwrap()
    );
}

#[test]
fn diameter_of_z_squared() {
    let dir = tempfile::tempdir().unwrap();
    let zeros = dir.path().join("zeros.csv");
    fs::write(&zeros, "# z^2\n0,0\n\n0.0, 0.0\n").unwrap();
    let out = bcmap(&["diameter", "--zeros", zeros.to_str().unwrap(), "--radius", "1"]);
    let v = stdout_json(&out);
    assert!((v["diameter"].as_f64().unwrap() - 0.8675).abs() < 1e-3);
}

#[test]
fn subcommands_emit_json() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    let clark = stdout_json(&bcmap(&["clark", "--config", &config, "--alpha", "-0.5"]));
    assert_eq!(clark["degree"], 3);
    assert_eq!(clark["measures"].as_array().unwrap().len(), 1);
    let density = stdout_json(&bcmap(&["density", "--config", &config, "--of-zeros"]));
    assert_eq!(density["points"], 3);
    assert!(density["d_plus"].as_f64().unwrap() >= 0.0);
    let descent = stdout_json(&bcmap(&["descent", "--config", &config, "--point", "0.1,-0.2", "--length", "3"]));
    assert!(!descent["squares"].as_array().unwrap().is_empty());
}

#[test]
fn bad_input_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let zeros = dir.path().join("zeros.csv");
    fs::write(&zeros, "0.1,0.2\n1.5,0\n").unwrap();
    let out = bcmap(&["analyze", "--zeros", zeros.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains(":2:"));

    let missing = bcmap(&["analyze", "--config", dir.path().join("nope.json").to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(1));

    let config = dir.path().join("bad.json");
    fs::write(&config, r#"{ "grid": { "no_such_field": 1 } }"#).unwrap();
    assert_eq!(bcmap(&["analyze", "--config", config.to_str().unwrap()]).status.code(), Some(1));

    assert_eq!(bcmap(&["diameter", "--point", "2,0"]).status.code(), Some(1));
    assert_eq!(bcmap(&["diameter", "--rmax", "1.0"]).status.code(), Some(1));
}
