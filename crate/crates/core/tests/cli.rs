use std::io::Write;
use std::process::{Command, Output};

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_strategic-pricing")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = cli(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn solve_reports_region_and_rho() {
    let text = stdout(&["solve", "--vh", "2.6", "--vl", "1.4", "--l", "0.5"]);
    let row = text.lines().find(|l| l.starts_with("III,")).expect("Region III row");
    assert!(row.starts_with("III,0.166666667,"), "{row}");
    assert!(text.lines().any(|l| l.starts_with("# ")));
}

#[test]
fn json_output_parses() {
    let text = stdout(&["welfare", "--vh", "3", "--vl", "1.5", "--l", "0.5", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["region"], "IV");
    assert!((v["revenue_strategic"].as_f64().unwrap() - 3.5625).abs() < 1e-12);
}

#[test]
fn seeded_simulation_is_reproducible() {
    let args = ["simulate", "--vh", "3.8", "--ratio", "0.5", "--l", "0.5", "--shuffles", "500", "--seed", "4"];
    assert_eq!(stdout(&args), stdout(&args));
    let other = stdout(&["simulate", "--vh", "3.8", "--ratio", "0.5", "--l", "0.5", "--shuffles", "500", "--seed", "5"]);
    assert_ne!(stdout(&args), other);
}

#[test]
fn stochastic_commands_require_a_seed() {
    let out = cli(&["simulate", "--vh", "3.8", "--ratio", "0.5", "--l", "0.5"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("seed"));
}

#[test]
fn invalid_parameters_are_rejected() {
    let out = cli(&["solve", "--vh", "1", "--vl", "2", "--l", "0.5"]);
    assert!(!out.status.success());
}

#[test]
fn flags_override_config_file() {
    let mut cfg = tempfile::NamedTempFile::new().unwrap();
    writeln!(cfg, "v_h = 4.0\nv_l = 3.0\nl = 0.5").unwrap();
    let path = cfg.path().to_str().unwrap();
    let from_file = stdout(&["--config", path, "region", "--format", "json"]);
    assert!(from_file.contains("\"region\": \"I\""), "{from_file}");
    let overridden = stdout(&["--config", path, "region", "--vl", "1", "--format", "json"]);
    assert!(overridden.contains("\"region\": \"V\""), "{overridden}");
}

#[test]
fn verify_passes_every_check() {
    let text = stdout(&["verify", "--vh", "4", "--vl", "3", "--l", "0.5", "--seed", "1", "--samples", "100000"]);
    let checks: Vec<&str> = text.lines().filter(|l| !l.starts_with('#') && !l.starts_with("check,")).collect();
    assert_eq!(checks.len(), 6);
    assert!(checks.iter().all(|l| l.split(',').nth(1) == Some("true")), "{text}");
}

#[test]
fn continuous_and_sweep_outputs() {
    let text = stdout(&["continuous", "--vbar", "8", "--l", "0.5"]);
    assert!(text.lines().any(|l| l.starts_with("3,0.176286671")), "{text}");
    let sweep = stdout(&["fig7", "--ratio", "0.5", "--l", "0.5", "--steps", "2", "--shuffles", "50", "--seed", "3"]);
    let rows: Vec<&str> = sweep.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "v_H,nlp_mean,ulp_mean,slp_mean,slp_stderr");
    assert_eq!(rows.len(), 3);
}
