//! End-to-end tests of the installed binary: flags, files, exit codes.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_charge-states"))
}

#[test]
fn sweep_writes_stable_csv_and_config_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out_a = dir.path().join("a.csv");
    let out_b = dir.path().join("b.csv");
    let config = dir.path().join("sweep.json");

    let status = bin()
        .args([
            "sweep",
            "--model",
            "pt",
            "--param",
            "nu=3",
            "--q",
            "2",
            "--parity",
            "full",
            "--x-min",
            "0.2",
            "--x-max",
            "8",
            "--points",
            "12",
            "--measures",
            "g,S_x1",
            "-o",
        ])
        .arg(&out_a)
        .arg("--save-config")
        .arg(&config)
        .status()
        .unwrap();
    assert!(status.success());

    let status = bin()
        .args(["sweep", "--config"])
        .arg(&config)
        .arg("-o")
        .arg(&out_b)
        .status()
        .unwrap();
    assert!(status.success());

    let a = std::fs::read(&out_a).unwrap();
    let b = std::fs::read(&out_b).unwrap();
    assert_eq!(a, b, "config replay must reproduce the CSV byte-for-byte");
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("x,g,S_x1\n"));
    assert_eq!(text.lines().count(), 13);
}

#[test]
fn figure_emits_curves_and_script() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .args(["figure", "--id", "4", "-o"])
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    for name in ["fig04_f_unit.csv", "fig04_f_pt.csv", "fig04_plot.py"] {
        assert!(dir.path().join(name).exists(), "{name} missing");
    }
    let csv = std::fs::read_to_string(dir.path().join("fig04_f_unit.csv")).unwrap();
    assert!(csv.starts_with("x,g\n"));
}

#[test]
fn exit_codes_match_error_classes() {
    // usage error: unknown model
    let status = bin()
        .args([
            "sweep", "--model", "nope", "--q", "2", "--x-min", "1", "--x-max", "2", "--points",
            "3", "-o", "/tmp/ignored.csv",
        ])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));

    // usage error: unknown measure
    let status = bin()
        .args([
            "sweep", "--model", "unit", "--q", "2", "--x-min", "1", "--x-max", "2", "--points",
            "3", "--measures", "bogus", "-o", "/tmp/ignored.csv",
        ])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));

    // numeric error: amplitude outside the convergence region
    let status = bin()
        .args([
            "sweep", "--model", "hydrogen", "--q", "2", "--x-min", "0.5", "--x-max", "3",
            "--points", "4", "-o", "/tmp/ignored.csv",
        ])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(3));

    // --help is not an error
    let status = bin().arg("--help").status().unwrap();
    assert_eq!(status.code(), Some(0));
}

#[test]
fn verify_quick_passes_and_prints_report() {
    let output = bin().args(["verify", "--level", "quick"]).output().unwrap();
    assert!(output.status.success());
    let text = String::from_utf8(output.stdout).unwrap();
    assert!(text.contains("PASS"));
    assert!(!text.contains("FAIL"));
    assert!(text.trim_end().ends_with("(quick)"));
}

#[test]
fn state_dump_to_stdout() {
    let output = bin()
        .args([
            "state", "--model", "hydrogen", "--q", "-2", "--xi-re", "0.4", "--xi-im", "0.1",
            "--parity", "odd",
        ])
        .output()
        .unwrap();
    assert!(output.status.success());
    let text = String::from_utf8(output.stdout).unwrap();
    assert!(text.contains("# q=-2"));
    assert!(text.contains("# parity=odd"));
    assert!(text.contains("n,n1,n2,re_c,im_c,p"));
}
