use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tonestack_cli::csv_out::{read_rows, HEADER};

fn tonestack(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tonestack"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("spawn tonestack")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn response_defaults_write_fifty_rows() {
    let dir = tempfile::tempdir().unwrap();
    let o = tonestack(
        &["response", "--out", "r.csv", "--svg", "r.svg"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("r.csv")).unwrap();
    assert_eq!(text.lines().next(), Some(HEADER));
    assert_eq!(text.lines().count(), 51);
    let svg = fs::read_to_string(dir.path().join("r.svg")).unwrap();
    assert!(svg.contains("<polyline"));
}

#[test]
fn vin_override_leaves_magnitude_unchanged() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("stack.cfg");
    fs::write(&cfg, "version = 1\nt = 0.5\nm = 0.5\nb = 0.5\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    assert_eq!(
        tonestack(&["response", cfg, "--out", "a.csv"], dir.path())
            .status
            .code(),
        Some(0)
    );
    assert_eq!(
        tonestack(
            &["response", cfg, "--set", "vin=10", "--out", "b.csv"],
            dir.path()
        )
        .status
        .code(),
        Some(0)
    );
    let a = read_rows(&dir.path().join("a.csv")).unwrap();
    let b = read_rows(&dir.path().join("b.csv")).unwrap();
    assert_eq!(a.len(), 50);
    for (x, y) in a.iter().zip(&b) {
        assert!((x.magnitude_db - y.magnitude_db).abs() < 1e-12);
        assert!((2.0 * x.vout_re - y.vout_re).abs() <= 1e-12 * y.vout_re.abs().max(1e-12));
    }
}

#[test]
fn missing_config_names_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let o = tonestack(
        &["response", "does-not-exist.cfg", "--out", "x.csv"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("does-not-exist.cfg"));
}

#[test]
fn parse_errors_are_positioned() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.cfg"), "r1 = 56k\n  c1 = 22x\n").unwrap();
    let o = tonestack(&["response", "bad.cfg", "--out", "x.csv"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("bad.cfg:2:10:"), "{}", stderr(&o));
    assert!(!dir.path().join("x.csv").exists());

    let o = tonestack(
        &["response", "--set", "t=1.5", "--out", "x.csv"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains(":1:3:"), "{}", stderr(&o));
}

#[test]
fn sweep_file_layout() {
    let dir = tempfile::tempdir().unwrap();
    let o = tonestack(
        &[
            "sweep",
            "--control",
            "treble",
            "--step",
            "1.0",
            "--out-dir",
            "out",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let mut names: Vec<String> = fs::read_dir(dir.path().join("out"))
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(
        names,
        ["treble_0.00.csv", "treble_1.00.csv", "treble_sweep.svg"]
    );
}

#[test]
fn sweep_reads_control_from_config() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("s.cfg"), "sweep = mid, 0.5\n").unwrap();
    let o = tonestack(&["sweep", "s.cfg", "--out-dir", "out"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for v in ["0.00", "0.50", "1.00"] {
        assert!(dir.path().join(format!("out/mid_{v}.csv")).exists());
    }

    let o = tonestack(&["sweep", "--out-dir", "out2"], dir.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn sweep_into_unwritable_location_fails_with_os_error() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("plain-file"), "").unwrap();
    let o = tonestack(
        &["sweep", "--control", "bass", "--out-dir", "plain-file/sub"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("os error"), "{}", stderr(&o));
}

#[test]
fn compare_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let o = tonestack(&["compare"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert_eq!(
        stdout
            .lines()
            .filter(|l| l.contains("max_rel_dev="))
            .count(),
        125
    );

    let o = tonestack(&["compare", "--tolerance", "0"], dir.path());
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("t="));

    fs::write(dir.path().join("bad.cfg"), "grid = logspace(0, 5\n").unwrap();
    assert_eq!(
        tonestack(&["compare", "bad.cfg"], dir.path()).status.code(),
        Some(1)
    );

    let o = tonestack(
        &[
            "compare",
            "--set",
            "load_compat=true",
            "--grid-density",
            "3",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn overflowing_values_are_numerical_failures() {
    let dir = tempfile::tempdir().unwrap();
    let o = tonestack(
        &["response", "--set", "c1=1e-320", "--out", "x.csv"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}
