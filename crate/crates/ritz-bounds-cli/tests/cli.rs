//! End-to-end checks of the binary: exit codes, CSV output, and the bound
//! table.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ritz-bounds"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn tmp_path(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("ritz-bounds-test-{}-{}", std::process::id(), name));
    p
}

#[test]
fn run_writes_csv_and_metadata() {
    let out = tmp_path("uniform.csv");
    let output = run(&[
        "run",
        "--scenario",
        "eig_uniform",
        "--n",
        "90",
        "--k",
        "9",
        "--iters",
        "20",
        "--seed",
        "7",
        "--gap-mode",
        "both",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "stderr: {}", String::from_utf8_lossy(&output.stderr));
    let csv = std::fs::read_to_string(&out).unwrap();
    let header = csv.lines().next().unwrap();
    assert!(header.starts_with("index,gap_mode,theta,exact_value,abs_error,residual_e"));
    // Both gap modes, 9 indices each.
    assert_eq!(csv.lines().count(), 1 + 18);
    let meta = std::fs::read_to_string(out.with_extension("csv.meta")).unwrap();
    assert!(meta.contains("scenario=eig_uniform"));
    assert!(meta.contains("seed=7"));
    std::fs::remove_file(&out).ok();
    std::fs::remove_file(out.with_extension("csv.meta")).ok();
}

#[test]
fn run_rejects_inconsistent_sizes_with_exit_2() {
    let output = run(&[
        "run",
        "--scenario",
        "eig_uniform",
        "--k",
        "500",
        "--n",
        "300",
    ]);
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("k must not exceed n"), "stderr: {stderr}");
}

#[test]
fn unknown_flags_are_rejected() {
    let output = run(&["run", "--scenario", "eig_uniform", "--bogus", "1"]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn bound_prints_worked_example() {
    let input = tmp_path("structure.json");
    std::fs::write(
        &input,
        r#"{
            "kind": "symmetric",
            "theta": [1.0, 2.0],
            "residual_norms_e": [0.01, 0.02],
            "tail_spectrum": [4.0]
        }"#,
    )
    .unwrap();
    let output = run(&["bound", "--input", input.to_str().unwrap()]);
    assert!(output.status.success());
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("gap mode: exact"), "stdout: {stdout}");
    // Index 1 bound is about 3.3449e-5.
    assert!(stdout.contains("3.344934e-5"), "stdout: {stdout}");
    std::fs::remove_file(&input).ok();
}

#[test]
fn bound_missing_file_is_runtime_failure() {
    let output = run(&["bound", "--input", "/nonexistent/structure.json"]);
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn list_scenarios_names_everything() {
    let output = run(&["list-scenarios"]);
    assert!(output.status.success());
    let stdout = String::from_utf8_lossy(&output.stdout);
    for name in [
        "eig_uniform",
        "eig_cluster",
        "eig_lanczos",
        "svd_pg",
        "svd_hmt",
        "svd_pg_vs_hmt",
        "sharpness",
    ] {
        assert!(stdout.contains(name), "missing {name}");
    }
}

#[test]
fn stdout_output_keeps_metadata_on_stderr() {
    let output = run(&[
        "run",
        "--scenario",
        "sharpness",
        "--seed",
        "3",
    ]);
    assert!(output.status.success());
    let stdout = String::from_utf8_lossy(&output.stdout);
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stdout.starts_with("epsilon,index,theta"));
    assert!(stderr.contains("scenario=sharpness"));
    assert!(!stdout.contains("wall_time_ms"));
}
