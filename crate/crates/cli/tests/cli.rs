use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn qfluid(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qfluid")).args(args).output().expect("binary runs")
}

fn scenario_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/scenarios").join(name)
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn csv_column(path: &Path, name: &str) -> Vec<f64> {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let col = lines.next().unwrap().split(',').position(|h| h == name).unwrap();
    lines.map(|l| l.split(',').nth(col).unwrap().parse().unwrap()).collect()
}

const VACUUM: &str = r#"
name = "vacuum"

[grid]
n = 64
length = 10.0

[physics]
kt = 0.01

[terms]
thermo = true
quantum = false
external = false

[initial]
kind = "cosine"
amplitude = 0.5
velocity = 1.0

[solver]
dt = 0.01
t_end = 5.0
snapshot_stride = 10
density_floor = 0.2
"#;

#[test]
fn equilibrium_run_keeps_bernoulli_flat() {
    let dir = tempfile::tempdir().unwrap();
    let out = qfluid(&["run", scenario_path("equilibrium.toml").to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let bern = csv_column(&dir.path().join("diagnostics.csv"), "bernoulli_residual");
    assert!(!bern.is_empty() && bern.iter().all(|&b| b < 1e-8), "{bern:?}");
    let snap = fs::read_to_string(dir.path().join("snapshots/snap_00000.csv")).unwrap();
    assert_eq!(snap.lines().next().unwrap(), "x,rho,phi,v,U_Q,V_e");
    let manifest: String = fs::read_to_string(dir.path().join("manifest.json")).unwrap();
    for key in ["\"version\"", "\"wall_time_seconds\"", "\"kt_over_m\"", "\"density_floor\"", "\"status\": \"ok\""] {
        assert!(manifest.contains(key), "manifest lacks {key}");
    }
}

#[test]
fn vacuum_run_fails_with_record_and_partial_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "vacuum.toml", VACUUM);
    let out_dir = dir.path().join("out");
    let out = qfluid(&["run", cfg.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("status: vacuum"));
    let record = fs::read_to_string(out_dir.join("error.json")).unwrap();
    assert!(record.contains("\"status\": \"vacuum\""), "{record}");
    assert!(out_dir.join("snapshots/snap_00000.csv").exists());
    assert!(csv_column(&out_dir.join("diagnostics.csv"), "t").len() > 1);
}

#[test]
fn reruns_are_bit_identical() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(scenario_path("trap.toml")).unwrap().replace("t_end = 6.283185307179586", "t_end = 0.3");
    let cfg = write(dir.path(), "trap.toml", &text);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        assert!(qfluid(&["run", cfg.to_str().unwrap(), "--out", d.to_str().unwrap()]).status.success());
    }
    let mut names: Vec<_> = fs::read_dir(a.join("snapshots")).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.len() >= 2);
    for n in &names {
        assert_eq!(fs::read(a.join("snapshots").join(n)).unwrap(), fs::read(b.join("snapshots").join(n)).unwrap());
    }
    assert_eq!(fs::read(a.join("diagnostics.csv")).unwrap(), fs::read(b.join("diagnostics.csv")).unwrap());
}

#[test]
fn invalid_grid_is_a_usage_error_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(scenario_path("wave.toml")).unwrap().replace("n = 64", "n = 7");
    let cfg = write(dir.path(), "bad.toml", &text);
    let out = qfluid(&["run", cfg.to_str().unwrap(), "--out", dir.path().join("out").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("even") && err.contains(">= 8") && err.contains("line 5"), "{err}");
}

#[test]
fn unknown_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(scenario_path("wave.toml")).unwrap().replace("kt = 1.0", "kt = 1.0\nkT = 2.0");
    let cfg = write(dir.path(), "typo.toml", &text);
    let out = qfluid(&["run", cfg.to_str().unwrap(), "--out", dir.path().join("out").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("kT"));
}

#[test]
fn unknown_suite_is_a_usage_error() {
    let out = qfluid(&["verify", "everything"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("identities"));
}

#[test]
fn identities_suite_reports_bohm_residual() {
    let out = qfluid(&["verify", "identities", "--seed", "3", "--threads", "2"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.lines().any(|l| l.starts_with("C1  PASS") && l.contains("bohm_identity_residual")), "{text}");
    assert_eq!(text.lines().filter(|l| l.starts_with('C')).count(), 3);
}

#[test]
fn scan_writes_table_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = qfluid(&["scan", "--kernel", "gaussian", "--fractions", "0.01,0.02", "--max-order", "3", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("fitted exponent"));
    let csv = fs::read_to_string(dir.path().join("scan.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "a_over_l,err_n1,err_n2,err_n3");
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn compare_writes_errors() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(scenario_path("free.toml")).unwrap().replace("t_end = 4.0", "t_end = 0.4");
    let cfg = write(dir.path(), "free.toml", &text);
    let out = qfluid(&["compare", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let l2 = csv_column(&dir.path().join("compare.csv"), "l2_density_error");
    assert!(l2.iter().all(|&e| e < 1e-6), "{l2:?}");
    assert!(dir.path().join("summary.json").exists());
}
