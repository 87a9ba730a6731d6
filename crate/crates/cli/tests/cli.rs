//! The `stieltjes` binary: exit codes, formats and overrides.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_stieltjes"))
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn run(config: &Path, extra: &[&str]) -> Output {
    bin().arg("run").arg(config).args(extra).output().unwrap()
}

const POINT_SUM: &str = r#"{
  "mode": "free-sum",
  "scenario": {"measures": [{"atoms": [[2.0, 1.0]]}, {"atoms": [[3.0, 1.0]]}]},
  "z_grid": [[0.0, 1.0], [4.0, 0.5]]
}"#;

#[test]
fn csv_to_stdout() {
    let dir = TempDir::new().unwrap();
    let out = run(&write(&dir, "c.json", POINT_SUM), &["--quiet"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("z_re,z_im,G_re,G_im,residual,iterations,status"));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    // 1/(5 - i) = (5 + i)/26
    assert!((first[2].parse::<f64>().unwrap() - 5.0 / 26.0).abs() < 1e-9);
    assert!((first[3].parse::<f64>().unwrap() - 1.0 / 26.0).abs() < 1e-9);
    assert_eq!(first[6], "ok");
    assert_eq!(lines.count(), 1);
}

#[test]
fn json_to_file() {
    let dir = TempDir::new().unwrap();
    let target = dir.path().join("out.json");
    let out = run(&write(&dir, "c.json", POINT_SUM), &["--format", "json", "--output", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(target).unwrap()).unwrap();
    assert_eq!(v["columns"][2], "G_re");
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);
    assert_eq!(v["rows"][1][6], "ok");
}

#[test]
fn schema_errors_exit_2_and_list_every_violation() {
    let dir = TempDir::new().unwrap();
    let bad = write(
        &dir,
        "bad.json",
        r#"{
  "mode": "cdma-sinr",
  "scenario": {
    "transmitters": [{"alpha": 1.5, "signature_kind": "isometric", "power": {"atoms": [[1.0, 1.0]]}}],
    "channel": {"independent": [{"atoms": [[1.0, 1.0]]}]}
  }
}"#,
    );
    let out = run(&bad, &[]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("isometric requires alpha <= 1"), "{err}");
    assert!(err.contains("noise_variance"), "{err}");

    let v = bin().arg("validate").arg(&bad).output().unwrap();
    assert_eq!(v.status.code(), Some(2));

    let unknown = write(&dir, "u.json", r#"{"mode": "free-sum", "bogus": 1}"#);
    assert_eq!(run(&unknown, &[]).status.code(), Some(2));
    assert_eq!(run(&dir.path().join("missing.json"), &[]).status.code(), Some(2));
}

#[test]
fn validate_accepts_good_configs() {
    let dir = TempDir::new().unwrap();
    let out = bin().arg("validate").arg(write(&dir, "c.json", POINT_SUM)).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().trim_end().ends_with(": ok"));
}

#[test]
fn shipped_configs_validate() {
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(configs).unwrap() {
        let path = entry.unwrap().path();
        let out = bin().arg("validate").arg(&path).output().unwrap();
        assert_eq!(out.status.code(), Some(0), "{}: {}", path.display(), String::from_utf8_lossy(&out.stderr));
        seen += 1;
    }
    assert!(seen >= 5);
}

#[test]
fn non_convergence_exits_3_with_all_rows() {
    let dir = TempDir::new().unwrap();
    let config = write(
        &dir,
        "c.json",
        r#"{
  "mode": "free-sum",
  "scenario": {"measures": [{"atoms": [[-1.0, 0.5], [1.0, 0.5]]}, {"atoms": [[-1.0, 0.5], [1.0, 0.5]]}]},
  "z_grid": [[0.3, 0.5], [1.0, 0.2]],
  "solver": {"max_iterations": 1}
}"#,
    );
    let out = run(&config, &["--quiet"]);
    assert_eq!(out.status.code(), Some(3));
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.ends_with(",non_convergence")), "{text}");
}

#[test]
fn seed_override_changes_monte_carlo_output() {
    let dir = TempDir::new().unwrap();
    let config = write(
        &dir,
        "c.json",
        r#"{
  "mode": "monte-carlo",
  "scenario": {"kind": "sum", "measures": [{"atoms": [[-1.0, 0.5], [1.0, 0.5]]}, {"atoms": [[0.0, 0.5], [1.0, 0.5]]}]},
  "z_grid": [[0.0, 0.5]],
  "mc": {"n": 16, "trials": 2, "seed": 1}
}"#,
    );
    let a = run(&config, &["--quiet"]).stdout;
    let b = run(&config, &["--quiet", "--seed", "2"]).stdout;
    let c = run(&config, &["--quiet", "--seed", "1", "--n", "16", "--trials", "2"]).stdout;
    assert_ne!(a, b);
    assert_eq!(a, c);
    assert!(String::from_utf8(a).unwrap().lines().nth(1).unwrap().ends_with(",16,2"));
}
