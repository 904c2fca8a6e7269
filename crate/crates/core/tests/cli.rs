use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use hele_shaw::output::{read_report, read_snapshots};

const BIN: &str = env!("CARGO_BIN_EXE_hele-shaw");

fn hele_shaw(args: &[&str], dir: &Path) -> Output {
    Command::new(BIN)
        .args(args)
        .arg("--out-dir")
        .arg(dir)
        .env_remove("RUST_LOG")
        .output()
        .expect("binary runs")
}

fn config(dir: &Path, text: &str) -> String {
    let p = dir.join("config.toml");
    fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn stderr_line(out: &Output) -> String {
    let text = String::from_utf8_lossy(&out.stderr);
    text.lines()
        .find(|l| l.starts_with("error "))
        .unwrap_or_else(|| panic!("no error line in {text:?}"))
        .to_string()
}

const SMALL_RUN: &str = "shape = { kind = \"perturbed_circle\", d1 = 0.1, d2 = 3 }\nn_points = 60\ndt = 1e-4\nt_end = 2e-3\nsnapshot_every = 10\n";

#[test]
fn run_writes_snapshots_diagnostics_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), SMALL_RUN);
    let out = hele_shaw(&["run", "--config", &cfg], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let rows = read_snapshots(&dir.path().join("snapshots.csv")).unwrap();
    // snapshots at steps 0, 10, 20
    assert_eq!(rows.len(), 3 * 60);
    assert_eq!(rows.last().unwrap().index, 59);

    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "run");
    assert_eq!(manifest["config"]["shape"]["n_points"], 60);
    let files = manifest["files"].as_array().unwrap();
    assert_eq!(files.len(), 2);
    assert_eq!(files[0]["rows"], 180);
    assert_eq!(files[1]["rows"], 21);
}

#[test]
fn identical_seed_gives_identical_bytes() {
    let text = "shape = \"circle\"\nsampling = \"uniform_random\"\nn_points = 80\ndt = 1e-4\nt_end = 1e-3\n";
    let mut outputs = Vec::new();
    for _ in 0..2 {
        let dir = tempfile::tempdir().unwrap();
        let cfg = config(dir.path(), text);
        let out = hele_shaw(
            &["run", "--config", &cfg, "--seed", "4", "--threads", "1"],
            dir.path(),
        );
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        outputs.push((
            fs::read(dir.path().join("snapshots.csv")).unwrap(),
            fs::read(dir.path().join("diagnostics.csv")).unwrap(),
        ));
    }
    assert!(outputs[0] == outputs[1]);
}

#[test]
fn dump_system_writes_matrix_and_rhs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "shape = \"heart\"\nn_points = 200\n");
    let out = hele_shaw(&["dump-system", "--config", &cfg], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let a = fs::read_to_string(dir.path().join("A.csv")).unwrap();
    let b = fs::read_to_string(dir.path().join("b.csv")).unwrap();
    assert_eq!(a.lines().count(), 1 + 200 * 200);
    assert_eq!(b.lines().count(), 1 + 200);
    assert!(a.starts_with("row,col,value\n"));
}

#[test]
fn curvature_test_writes_one_report_per_degree() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(
        dir.path(),
        "shape = \"circle\"\n[study]\ncurvature_n_values = [100, 200, 400]\ndegrees = [3]\nseeds = 2\n",
    );
    let out = hele_shaw(&["curvature-test", "--config", &cfg], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (rows, slope) = read_report(&dir.path().join("curvature_l3.csv")).unwrap();
    assert_eq!(rows.len(), 3);
    // error against N: the footer slope is negative
    assert!(slope < -0.5, "slope {slope}");
}

#[test]
fn bad_config_exits_two_with_one_error_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "shape = \"circle\"\ndt = -1\nmeshsize = 3\n");
    let out = hele_shaw(&["run", "--config", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let line = stderr_line(&out);
    assert!(line.starts_with("error stage=config code=2 message="), "{line}");
    assert!(line.contains("dt > 0") && line.contains("meshsize"), "{line}");
}

#[test]
fn missing_config_file_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.toml");
    let out = hele_shaw(&["run", "--config", missing.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_line(&out).contains("code=1"));
}

#[test]
fn collapsing_run_exits_three_and_keeps_partial_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(
        dir.path(),
        "shape = \"circle\"\nn_points = 50\ndt = 1e-3\nt_end = 1e-2\nforcing = { amplitude = -500.0, omega = 1.0 }\n",
    );
    let out = hele_shaw(&["run", "--config", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(3));
    let line = stderr_line(&out);
    assert!(line.contains("code=3") && line.contains("stage="), "{line}");
    assert!(dir.path().join("diagnostics.csv").exists());
    assert!(dir.path().join("manifest.json").exists());
}
