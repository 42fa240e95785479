use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn helix(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_helix-euler"))
        .env_remove("HELIX_EULER_OUT")
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .unwrap()
}

fn error_code(o: &Output) -> String {
    let v: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    v["error"].as_str().unwrap().to_string()
}

#[test]
fn kernel_verify_passes_and_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = helix(dir.path(), &["--seed", "7", "kernel-verify", "--points", "1000", "bound_points_large=20000"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("kernel_verify.json")).unwrap()).unwrap();
    assert!(v["max_series_vs_images"].as_f64().unwrap() < 1e-8);
    let s: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("scenario.json")).unwrap()).unwrap();
    assert_eq!(s["seed"], 7);
    assert_eq!(s["kernel_verify"]["points"], 1000);
}

#[test]
fn invalid_inputs_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = helix(dir.path(), &["kernel-table", "kappa=-1"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_code(&o), "invalid_kappa");

    let o = helix(dir.path(), &["kernel-table", "no_such_key=3"]);
    assert_eq!(o.status.code(), Some(2));

    let o = helix(dir.path(), &["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_code(&o), "invalid_arguments");

    let cfg = dir.path().join("s.json");
    fs::write(&cfg, r#"{"schema_version": 99, "kind": "kernel-table"}"#).unwrap();
    let o = helix(dir.path(), &["--config", cfg.to_str().unwrap(), "kernel-table"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_code(&o), "unsupported_schema_version");

    let o = helix(dir.path(), &["--config", "/nonexistent/s.json", "kernel-table"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn kernel_table_columns() {
    let dir = tempfile::tempdir().unwrap();
    let o = helix(dir.path(), &["kernel-table", "points=8"]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(dir.path().join("kernel_table.csv")).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("x1,x2,x3"), "{header}");
    assert_eq!(lines.count(), 8);
}

#[test]
fn simulate_radial_steady_writes_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let o = helix(
        dir.path(),
        &["simulate", "--preset", "radial-steady", "--t_end", "0.02", "--dt", "0.01"],
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let s: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert!(s["max_radius_drift"].as_f64().unwrap() < 1e-6);
    assert_eq!(s["steps"], 2);
    let snaps = dir.path().join("snapshots");
    assert!(snaps.join("index.json").exists());
    assert!(snaps.join("snapshot_00002.csv").exists());
}

#[test]
fn outputs_are_byte_identical_across_runs_and_threads() {
    let read = |d: &Path| {
        let mut files: Vec<_> = fs::read_dir(d).unwrap().map(|e| e.unwrap().path()).filter(|p| p.is_file()).collect();
        files.sort();
        files.into_iter().map(|p| (p.file_name().unwrap().to_owned(), fs::read(&p).unwrap())).collect::<Vec<_>>()
    };
    let args = ["velocity-probe", "probes=4", "preset=dipole"];
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let c = tempfile::tempdir().unwrap();
    let mut with_threads = vec!["--threads", "1"];
    with_threads.extend(args);
    assert_eq!(helix(a.path(), &with_threads).status.code(), Some(0));
    assert_eq!(helix(b.path(), &with_threads).status.code(), Some(0));
    with_threads[1] = "4";
    assert_eq!(helix(c.path(), &with_threads).status.code(), Some(0));
    assert_eq!(read(a.path()), read(b.path()));
    assert_eq!(read(a.path()), read(c.path()));
}

#[test]
fn env_overrides_out_flag() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_helix-euler"))
        .env("HELIX_EULER_OUT", dir.path().join("env"))
        .args(["--out", dir.path().join("flag").to_str().unwrap(), "kernel-table", "points=2"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(dir.path().join("env/kernel_table.csv").exists());
    assert!(!dir.path().join("flag").exists());
}
