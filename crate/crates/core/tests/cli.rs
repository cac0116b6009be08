//! The command-line front end.

use std::path::Path;
use std::process::Command;

fn cli() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cutcell-dg"))
}

fn config(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("configs")
        .join(name)
        .display()
        .to_string()
}

fn run(cmd: &mut Command) -> String {
    let out = cmd.output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn spectrum_prints_abscissa_and_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let stdout = run(cli().args(["spectrum", "--p", "1", "--alpha", "0.1", "--variant", "full", "--csv", "--out"]).arg(dir.path()));
    assert!(stdout.starts_with("mu = "), "{stdout}");
    let csv = std::fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("re,im"));
    assert_eq!(csv.lines().count(), 1 + 180 * 2);
    assert!(dir.path().join("metadata.json").exists());
}

#[test]
fn solve_with_overrides_writes_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    run(cli()
        .args(["solve", "-c", &config("advection.toml"), "--t-final", "0.05", "--p", "1", "--snapshot-every", "5", "--dump-mesh", "--out"])
        .arg(dir.path()));
    for name in ["snapshot.csv", "snapshot_000005.csv", "mesh.csv", "metadata.json"] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("metadata.json")).unwrap()).unwrap();
    assert_eq!(meta["config"]["p"], 1);
    assert_eq!(meta["command"], "solve");
}

#[test]
fn sod_and_burgers_shock_defaults_run() {
    let dir = tempfile::tempdir().unwrap();
    let stdout = run(cli().args(["sod", "--n", "20", "--p", "0", "--out"]).arg(dir.path()));
    assert!(stdout.contains("min rho"), "{stdout}");
    let snapshot = std::fs::read_to_string(dir.path().join("snapshot.csv")).unwrap();
    assert_eq!(snapshot.lines().next(), Some("cell,kind,x,rho,v,p"));

    let stdout = run(cli().args(["burgers-shock", "--p", "1", "--limiter", "tvdm", "--out"]).arg(dir.path()));
    assert!(stdout.contains("overshoot"), "{stdout}");
}

#[test]
fn converge_writes_error_table() {
    let dir = tempfile::tempdir().unwrap();
    let stdout = run(cli()
        .args(["converge", "--case", "advection", "--p-list", "1", "--n-list", "10,20", "--out"])
        .arg(dir.path()));
    assert!(stdout.contains("advection p=1"), "{stdout}");
    let csv = std::fs::read_to_string(dir.path().join("errors.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 3 * 2);
}

#[test]
fn cfl_violation_is_warned_about() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli()
        .args(["solve", "-c", &config("advection.toml"), "--nu", "0.0005", "--t-final", "0.0", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
}

#[test]
fn bad_input_fails_cleanly() {
    let out = cli().arg("solve").output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("--config"));
    let out = cli().args(["converge", "--case", "nonsense"]).output().unwrap();
    assert!(!out.status.success());
}
