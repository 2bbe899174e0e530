use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn problem(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../problems").join(format!("{name}.json"))
}

fn hkit(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hkit"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env("HKIT_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn parabolicity_reports() {
    let dir = tempfile::tempdir().unwrap();
    let heat = problem("heat");
    let o = hkit(dir.path(), &["check-parabolicity", heat.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("0.707107"));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("parabolicity.json")).unwrap()).unwrap();
    assert!((json["min_abs"].as_f64().unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-4);
    assert!(std::fs::read_to_string(dir.path().join("parabolicity.csv")).unwrap().starts_with("min_abs,"));

    let back = problem("backward_heat");
    assert_eq!(code(&hkit(dir.path(), &["check-parabolicity", back.to_str().unwrap(), "--resolution", "32"])), 1);
}

#[test]
fn oblique_covering_fails_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let o = hkit(dir.path(), &["check-covering", problem("oblique").to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("covering.json")).unwrap()).unwrap();
    assert_eq!(json["worst"]["point"]["xi"], serde_json::json!([1.0]));
    assert_eq!(json["worst"]["point"]["p"], serde_json::json!([0.0, 0.0]));
    assert_eq!(code(&hkit(dir.path(), &["check-covering", problem("heat_neumann").to_str().unwrap()])), 0);
}

#[test]
fn compat_and_projection_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let heat = problem("heat");
    let h = heat.to_str().unwrap();
    assert_eq!(code(&hkit(dir.path(), &["compat", h, "--s", "4"])), 0);
    let csv = std::fs::read_to_string(dir.path().join("compat.csv")).unwrap();
    assert!(csv.starts_with("j,k,residual,tol,pass\n"));
    assert_eq!(csv.lines().count(), 3);
    assert_eq!(code(&hkit(dir.path(), &["compat", h, "--s", "4", "--perturb", "0.1"])), 1);
    assert_eq!(code(&hkit(dir.path(), &["project-q", h, "--s", "4", "--perturb", "0.1"])), 0);
    let projected = dir.path().join("projected");
    assert_eq!(code(&hkit(dir.path(), &["compat", h, "--s", "4", "--data", projected.to_str().unwrap()])), 0);
    // ladder value
    assert_eq!(code(&hkit(dir.path(), &["compat", h, "--s", "2.5"])), 2);
}

#[test]
fn norm_interp_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let heat = problem("heat");
    let h = heat.to_str().unwrap();
    assert_eq!(code(&hkit(dir.path(), &["norm", h, "--s", "2.75", "--phi=-1", "--modes", "4"])), 0);
    // reading the written field back gives the same norm
    let stem = dir.path().join("norm_field");
    let first = std::fs::read_to_string(dir.path().join("norm.csv")).unwrap();
    assert_eq!(code(&hkit(dir.path(), &["norm", h, "--s", "2.75", "--phi=-1", "--field", stem.to_str().unwrap()])), 0);
    assert_eq!(first, std::fs::read_to_string(dir.path().join("norm.csv")).unwrap());

    assert_eq!(code(&hkit(dir.path(), &["interp-verify", h, "--s0", "1", "--s", "2", "--s1", "3", "--phi", "1", "--modes", "8"])), 0);
    assert_eq!(code(&hkit(dir.path(), &["interp-verify", h, "--s0", "1", "--s", "4", "--s1", "3"])), 2);
    assert_eq!(code(&hkit(dir.path(), &["trace-verify", h, "--r", "2", "--count", "5", "--modes", "8"])), 0);
}

#[test]
fn experiments_are_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let heat = problem("heat");
    let h = heat.to_str().unwrap();
    let args = ["iso-experiment", h, "--ensemble", "4", "--modes", "3", "--seed", "5"];
    assert_eq!(code(&hkit(dir.path(), &args)), 0);
    let a = std::fs::read_to_string(dir.path().join("iso_experiment.csv")).unwrap();
    assert_eq!(code(&hkit(dir.path(), &args)), 0);
    assert_eq!(a, std::fs::read_to_string(dir.path().join("iso_experiment.csv")).unwrap());
    assert!(a.starts_with("s,phi,level,cutoff,"));

    let o = hkit(dir.path(), &["local-reg", h, "--smooth", "--modes", "16", "--levels", "2"]);
    assert!(matches!(code(&o), 0 | 1));
    assert!(std::fs::read_to_string(dir.path().join("local_reg.csv")).unwrap().starts_with("sigma,intervals,local,global\n"));
}

#[test]
fn usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&hkit(dir.path(), &["--help"])), 0);
    assert_eq!(code(&hkit(dir.path(), &["no-such-command"])), 2);
    assert_eq!(code(&hkit(dir.path(), &["check-covering", "/does/not/exist.json"])), 2);
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"n\": 2}").unwrap();
    assert_eq!(code(&hkit(dir.path(), &["check-parabolicity", bad.to_str().unwrap()])), 2);
    let o = Command::new(env!("CARGO_BIN_EXE_hkit"))
        .args(["norm", problem("heat").to_str().unwrap(), "--s", "1", "--out"])
        .arg(dir.path())
        .env("HKIT_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
}
