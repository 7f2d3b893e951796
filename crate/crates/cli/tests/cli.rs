use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn mhd1d(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mhd1d"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("config.toml");
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

const MINIMAL: &str = "[grid]\nlength = 5.0\nn_cells = 40\n\n[scheme]\nt_end = 0.1\n";

#[test]
fn far_field_run_passes_every_check() {
    let out = tempfile::tempdir().unwrap();
    let o = mhd1d(&[
        "--quiet",
        "run",
        configs().join("far_field.toml").to_str().unwrap(),
        "--out",
        out.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());

    let series = std::fs::read_to_string(out.path().join("series.csv")).unwrap();
    let mut lines = series.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let n = header.len();
    for row in lines {
        let cells: Vec<&str> = row.split(',').collect();
        assert_eq!(cells.len(), n);
        assert_eq!(&cells[n - 5..], ["pass"; 5]);
    }

    let snaps = std::fs::read_to_string(out.path().join("snapshots.csv")).unwrap();
    assert!(snaps.starts_with("t,x,v,u,w1,w2,b1,b2,theta\n"));
    assert_eq!(snaps.lines().count(), 1 + 100 * 101);

    let reports = std::fs::read_to_string(out.path().join("reports.jsonl")).unwrap();
    let lines: Vec<serde_json::Value> = reports
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 101);
    assert_eq!(lines[0]["kind"], "step");
    assert_eq!(lines[100]["kind"], "summary");
    assert_eq!(lines[100]["verdicts"]["sobolev"], "pass");
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (format!("{MINIMAL}\n[params]\nviscocity = 1.0\n"), "viscocity"),
        ("[grid]\nlength = 5.0\nn_cells = -5\n[scheme]\nt_end = 1.0\n".to_string(), "grid.n_cells"),
        (format!("{MINIMAL}\n[checks]\nreconstruct = true\n"), "probes required"),
        ("[grid]\nlength = 5.0\n".to_string(), "line"),
    ];
    for (body, needle) in cases {
        let path = write_config(dir.path(), &body);
        let o = mhd1d(&["run", &path, "--out", dir.path().to_str().unwrap()]);
        let err = String::from_utf8_lossy(&o.stderr);
        assert_eq!(o.status.code(), Some(2), "{err}");
        assert!(err.contains(needle), "{needle}: {err}");
    }
    let o = mhd1d(&["run", "/nonexistent/config.toml"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(mhd1d(&[]).status.code(), Some(2));
    assert_eq!(mhd1d(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(mhd1d(&["roots", "abc"]).status.code(), Some(2));
}

#[test]
fn roots_command() {
    let o = mhd1d(&["roots", "0"]);
    assert_eq!(String::from_utf8_lossy(&o.stdout), "1.000000000000 1.000000000000 0\n");
    let o = mhd1d(&["roots", "0.5"]);
    assert_eq!(
        String::from_utf8_lossy(&o.stdout),
        "0.301709562684 2.357676673946 2.588699449562\n"
    );
    let o = mhd1d(&["roots", "-1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
}

#[test]
fn hostile_run_exits_1_without_output() {
    let out = tempfile::tempdir().unwrap();
    let o = mhd1d(&[
        "--quiet",
        "run",
        configs().join("hostile.toml").to_str().unwrap(),
        "--out",
        out.path().to_str().unwrap(),
    ]);
    let err = String::from_utf8_lossy(&o.stderr);
    assert_eq!(o.status.code(), Some(1), "{err}");
    assert!(err.contains("positivity breach") && err.contains("t = "), "{err}");
    assert!(!out.path().join("series.csv").exists());
}

#[test]
fn mms_command() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();

    let o = mhd1d(&["mms", configs().join("mms_smooth.toml").to_str().unwrap(), "--levels", "3", "--out", out]);
    let text = String::from_utf8_lossy(&o.stdout);
    assert_eq!(o.status.code(), Some(0), "{text}");
    let last = text.lines().last().unwrap();
    let orders: Vec<f64> = last.split(',').rev().take(5).map(|x| x.parse().unwrap()).collect();
    assert!(orders.iter().all(|&o| o >= 1.8), "{last}");
    assert!(dir.path().join("convergence.csv").exists());

    let path = write_config(dir.path(), &format!("{MINIMAL}\n[mms]\ncase = \"far-field\"\n"));
    let o = mhd1d(&["mms", &path, "--levels", "2", "--out", out]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("exact at all levels"));

    let path = write_config(dir.path(), &format!("{MINIMAL}\n[mms]\ncase = \"foo\"\n"));
    assert_eq!(mhd1d(&["mms", &path, "--out", out]).status.code(), Some(2));

    let path = write_config(dir.path(), MINIMAL);
    assert_eq!(mhd1d(&["mms", &path, "--out", out]).status.code(), Some(2));
}

#[test]
fn reconstruct_command() {
    let dir = tempfile::tempdir().unwrap();
    let body = format!(
        "{MINIMAL}\n[initial]\nprofile = \"gaussian\"\nv = 0.2\ntheta = 0.3\nu = 0.1\n"
    );
    let path = write_config(dir.path(), &body);
    let o = mhd1d(&["reconstruct", &path, "--probe", "-1.0", "--at", "0.1"]);
    let text = String::from_utf8_lossy(&o.stdout);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(text.starts_with("x,v,v_rec\n"));
    assert_eq!(text.lines().count(), 42);
    let err: f64 = text.lines().last().unwrap().rsplit(' ').next().unwrap().parse().unwrap();
    assert!(err < 0.05, "{err}");

    assert_eq!(
        mhd1d(&["reconstruct", &path, "--probe", "9", "--at", "0.1"]).status.code(),
        Some(2)
    );
    assert_eq!(
        mhd1d(&["reconstruct", &path, "--probe", "0", "--at", "5"]).status.code(),
        Some(2)
    );
}
