mod common;

use std::fs;
use std::process::{Command, Output};

use common::fcidump_path;

fn vqebench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vqebench")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn selftest_passes() {
    let o = vqebench(&["selftest"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("all checks passed"));
}

#[test]
fn run_reports_metrics() {
    let path = fcidump_path("nah", "1.80");
    let o = vqebench(&["run", "--fcidump", path.to_str().unwrap(), "--method", "adapt", "--optimizer", "nelder_mead"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("iter   1"));
    assert!(out.contains("final |G|"));
    assert!(out.contains("measurements"));
}

#[test]
fn missing_input_is_exit_one() {
    let o = vqebench(&["run", "--fcidump", "/nonexistent/x.fcidump"]);
    assert_eq!(o.status.code(), Some(1));
    let o = vqebench(&["scan", "--config", "/nonexistent/scan.toml"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn bad_config_is_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "output = \"out\"\nmethods = [\"vqe\"]\nbogus = 1\n").unwrap();
    let o = vqebench(&["scan", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));

    let path = fcidump_path("h2", "0.70");
    let o = vqebench(&["run", "--fcidump", path.to_str().unwrap(), "--fd-step", "0"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn malformed_fcidump_is_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("broken.fcidump");
    fs::write(&dump, "&FCI NORB=2,NELEC=2,\n&END\n 0.5 1 x 1 1\n").unwrap();
    let o = vqebench(&["run", "--fcidump", dump.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn scan_writes_report_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("scan.toml");
    fs::write(
        &cfg,
        format!(
            "output = \"report\"\nmethods = [\"fci\", \"adapt\"]\noptimizers = [\"lbfgs\"]\n\n[[inputs]]\nlabel = \"0.70\"\nfcidump = \"{}\"\n",
            fcidump_path("h2", "0.70").display()
        ),
    )
    .unwrap();
    let o = vqebench(&["scan", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for name in ["scan.csv", "scan.json", "summary.txt", "curves.dat"] {
        assert!(dir.path().join("report").join(name).is_file(), "{name}");
    }
    let csv = fs::read_to_string(dir.path().join("report/scan.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
}
