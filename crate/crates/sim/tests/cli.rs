//! End-to-end tests of the `avofdm` binary: argument handling, precedence,
//! reproducibility, and the sidecar contract.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn avofdm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_avofdm"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn assert_success(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn identical_seeds_give_byte_identical_csv() {
    let args = [
        "threshold",
        "--constellation",
        "qpsk",
        "--seed",
        "7",
        "--n-fft",
        "256",
        "--frames",
        "20",
        "--kappa",
        "1.0:0.05:1.3",
    ];
    let a = assert_success(&avofdm(&args));
    let b = assert_success(&avofdm(&args));
    assert_eq!(a, b);
    assert!(a.contains("kappa_threshold="));
}

#[test]
fn snr_grid_arithmetic_row_count() {
    let out = assert_success(&avofdm(&[
        "ser-vs-snr",
        "--kappa",
        "1.2",
        "--constellation",
        "qpsk",
        "--snr",
        "0:2:20",
        "--frames",
        "2",
        "--n-fft",
        "64",
        "--detectors",
        "isea,clipping",
    ]));
    // header + 11 sweep points x 2 detectors
    assert_eq!(out.lines().count(), 1 + 11 * 2);
    let records = avofdm_sim::csv::read_sweep_csv(out.as_bytes()).unwrap();
    assert_eq!(records.len(), 22);
    assert_eq!(records.iter().filter(|r| r.detector == avofdm_core::DetectorKind::Isea).count(), 11);
}

#[test]
fn detect_one_degenerate_case_reports_two_iterations() {
    let out = assert_success(&avofdm(&[
        "detect-one",
        "--kappa",
        "100",
        "--snr-db",
        "inf",
        "--n-fft",
        "256",
        "--seed",
        "3",
    ]));
    assert!(
        out.contains("errors=0 iterations=2 converged=true"),
        "unexpected detect-one output: {out}"
    );
}

#[test]
fn config_file_applies_and_flags_override_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("run.toml");
    fs::write(
        &cfg_path,
        "n_fft = 256\nframes = 5\nconstellation = \"8psk\"\nkappas = [1.0]\n\
         snrs_db = [10.0]\ndetectors = [\"clipping\"]\nseed = 11\n",
    )
    .unwrap();
    let out = assert_success(&avofdm(&[
        "ser-vs-kappa",
        "--config",
        cfg_path.to_str().unwrap(),
        "--frames",
        "3",
        "--kappa",
        "1.0,1.5",
    ]));
    let records = avofdm_sim::csv::read_sweep_csv(out.as_bytes()).unwrap();
    assert_eq!(records.len(), 2, "two kappa points from the flag override");
    for r in &records {
        assert_eq!(r.frames, 3, "flag overrides config file");
        assert_eq!(r.n_fft, 256, "file overrides default");
        assert_eq!(r.constellation, avofdm_core::ConstellationKind::Psk8);
    }
}

#[test]
fn sidecar_reproduces_the_run_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.csv");
    assert_success(&avofdm(&[
        "av-noise",
        "--kappa",
        "0.5,1.5",
        "--frames",
        "10",
        "--n-fft",
        "256",
        "--seed",
        "99",
        "--out",
        first.to_str().unwrap(),
    ]));
    let sidecar = dir.path().join("first.csv.config.toml");
    assert!(sidecar.exists(), "sidecar written next to the CSV");

    let second = dir.path().join("second.csv");
    assert_success(&avofdm(&[
        "av-noise",
        "--config",
        sidecar.to_str().unwrap(),
        "--out",
        second.to_str().unwrap(),
    ]));
    assert_eq!(read_bytes(&first), read_bytes(&second));
}

fn read_bytes(p: &Path) -> Vec<u8> {
    fs::read(p).unwrap()
}

#[test]
fn invalid_parameters_exit_nonzero_with_diagnostics() {
    let cases: [&[&str]; 4] = [
        &["ser-vs-snr", "--kappa", "-1", "--frames", "1", "--n-fft", "64"],
        &["ser-vs-snr", "--n-fft", "100", "--frames", "1"],
        &["ser-vs-snr", "--detectors", "isea,bogus", "--frames", "1"],
        &["threshold", "--kappa", "1:0:2"],
    ];
    for args in cases {
        let out = avofdm(args);
        assert!(!out.status.success(), "{args:?} should fail");
        let stderr = String::from_utf8_lossy(&out.stderr);
        assert!(!stderr.is_empty(), "{args:?} should print a diagnostic");
    }
    let out = avofdm(&["no-such-subcommand"]);
    assert!(!out.status.success());
}

#[test]
fn scatter_emits_soft_estimates() {
    let out = assert_success(&avofdm(&[
        "scatter",
        "--constellation",
        "qpsk",
        "--kappa",
        "1.2",
        "--snr",
        "noiseless",
        "--frames",
        "2",
        "--n-fft",
        "64",
        "--detectors",
        "isea,lower-bound",
    ]));
    let mut lines = out.lines();
    assert_eq!(lines.next().unwrap(), avofdm_sim::csv::SCATTER_HEADER);
    // 2 detectors x 2 frames x 31 payload subcarriers
    assert_eq!(out.lines().count(), 1 + 2 * 2 * 31);
}
