use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_timefringe"))
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn simulate_stueckelberg_marks_fringe_peaks() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&[
        "simulate",
        "--scenario",
        scenario("desk_stueckelberg.json").to_str().unwrap(),
        "--out",
        out,
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let svg = std::fs::read_to_string(dir.path().join("desk_stueckelberg_trace.svg")).unwrap();
    assert!(svg.matches(r#"class="peak""#).count() >= 6);
    assert!(svg.contains("<metadata>scenario-sha256:"));
    let trace = std::fs::read_to_string(dir.path().join("desk_stueckelberg_trace.csv")).unwrap();
    assert!(trace.lines().count() > 1000);
    assert!(dir.path().join("desk_stueckelberg_report.json").exists());
}

#[test]
fn control_without_fringes_still_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "--json",
        "simulate",
        "--scenario",
        scenario("desk_schrodinger_control.json").to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["status"], "ok");
    assert_eq!(report["coherence_visibility"], 0.0);
    assert!(!report["notes"].as_array().unwrap().is_empty());
}

#[test]
fn estimate_prints_table_without_a_scenario() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["estimate", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("relativistic"), "{text}");
    assert!(dir.path().join("run_estimates.csv").exists());
}

#[test]
fn scan_from_command_line_values() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "--threads",
        "2",
        "scan",
        "--scenario",
        scenario("desk_stueckelberg.json").to_str().unwrap(),
        "--param",
        "epsilon",
        "--values",
        "4,8",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("desk_stueckelberg_scan.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn config_errors_exit_two_and_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(
        dir.path(),
        "bad.json",
        r#"{"theory": "stueckelberg", "setup": {"wavelength": 850, "photon_count": 300, "flight_distance": 0.01, "gate_spacing": 2.6e-15, "gatewidth": 1e-16}}"#,
    );
    let o = run(&[
        "simulate",
        "--scenario",
        &bad,
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 2);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("gate_width"), "{err}");
    let report = std::fs::read_to_string(dir.path().join("run_report.json")).unwrap();
    assert!(report.contains("\"config\""), "{report}");
}

#[test]
fn resolution_limits_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "simulate",
        "--scenario",
        scenario("lab_reference.json").to_str().unwrap(),
        "--engine",
        "quadrature",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn missing_files_exit_five() {
    let o = run(&[
        "simulate",
        "--scenario",
        "/nonexistent/scenario.json",
        "--out",
        "/tmp/timefringe-missing",
    ]);
    assert_eq!(code(&o), 5);
    let o = run(&[
        "fringes",
        "--trace",
        "/nonexistent/trace.csv",
        "--out",
        "/tmp/timefringe-missing",
    ]);
    assert_eq!(code(&o), 5);
}
