//! Output files, determinism, summaries and the command-line entry point.

use std::fs;
use std::process::Command;

use capa_harness::runner::{RUNS_FILE, SUMMARY_FILE, TRACE_FILE};
use capa_harness::{run_experiment, summarize, Algorithm, Experiment, ExperimentSpec, HarnessError};

const GOLDEN_HEADER: &str =
    "experiment,algorithm,seed,sweep_value,outer_iter,inner_iter,eta,objective,group_rates,power,ee,wall_ms,status";

fn tiny(dir: &std::path::Path) -> ExperimentSpec {
    let mut s = ExperimentSpec::new(Experiment::RatefloorSweep, dir);
    s.sweep = vec![0.5];
    s.num_realizations = 2;
    s.algorithms = vec![Algorithm::Zf, Algorithm::Cov];
    s.base.num_groups = 2;
    s.base.users_per_group = 2;
    s.base.rate_floors = vec![0.5; 2];
    s.base.grid_order = 8;
    s.timing = false;
    s
}

#[test]
fn files_have_golden_headers_and_are_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let out = run_experiment(&tiny(a.path())).unwrap();
    assert_eq!(out.runs.len(), 4);
    run_experiment(&tiny(b.path())).unwrap();
    for f in [TRACE_FILE, RUNS_FILE, SUMMARY_FILE] {
        let x = fs::read(a.path().join(f)).unwrap();
        let y = fs::read(b.path().join(f)).unwrap();
        assert_eq!(x, y, "{f} differs between runs");
    }
    for f in [TRACE_FILE, RUNS_FILE] {
        let text = fs::read_to_string(a.path().join(f)).unwrap();
        assert_eq!(text.lines().next().unwrap(), GOLDEN_HEADER);
    }
    let summary = fs::read_to_string(a.path().join(SUMMARY_FILE)).unwrap();
    assert_eq!(
        summary.lines().next().unwrap(),
        "experiment,algorithm,sweep_value,runs,failures,mean_ee,mean_outer_iter"
    );
}

#[test]
fn summarize_averages_a_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let nested = dir.path().join("ratefloor-sweep");
    fs::create_dir(&nested).unwrap();
    let rows = [
        "ratefloor-sweep,cov,1,1.000000000e0,4,9,,,1.0;2.0,1.0e1,3.000000000e-1,,ok",
        "ratefloor-sweep,cov,2,1.000000000e0,6,9,,,1.0;2.0,1.0e1,6.000000000e-1,,ok",
        "ratefloor-sweep,cov,3,1.000000000e0,0,0,,,,,,,infeasible",
    ];
    fs::write(
        nested.join(RUNS_FILE),
        format!("{GOLDEN_HEADER}\n{}\n", rows.join("\n")),
    )
    .unwrap();
    let s = summarize(dir.path()).unwrap();
    assert_eq!(s.len(), 1);
    assert_eq!((s[0].runs, s[0].failures), (3, 1));
    assert!((s[0].mean_ee.unwrap() - 0.45).abs() <= 1e-12);
    assert!((s[0].mean_outer_iter.unwrap() - 5.0).abs() <= 1e-12);
}

#[test]
fn empty_directory_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(summarize(dir.path()), Err(HarnessError::EmptySummary(_))));
    let out = Command::new(env!("CARGO_BIN_EXE_capa"))
        .args(["summarize"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("empty summary"));
}

#[test]
fn bad_header_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join(RUNS_FILE), "experiment,algorithm\nx,y\n").unwrap();
    assert!(summarize(dir.path()).is_err());
}

#[test]
fn cli_runs_from_an_experiment_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.txt");
    fs::write(
        &cfg,
        "[experiment]\nid = users-sweep\nsweep = 1\nrealizations = 1\nalgorithms = zf\ntiming = false\n\
         [config]\nnum_groups = 2\nrate_floors = 0.5\ngrid_order = 6\n",
    )
    .unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_capa"))
        .args(["run", "users-sweep", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let runs = fs::read_to_string(dir.path().join("users-sweep").join(RUNS_FILE)).unwrap();
    assert_eq!(runs.lines().count(), 2);
    let wrong = Command::new(env!("CARGO_BIN_EXE_capa"))
        .args(["run", "convergence", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(!wrong.status.success());
}
