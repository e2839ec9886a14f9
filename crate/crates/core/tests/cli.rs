use std::path::Path;
use std::process::{Command, Output};

use wardsim::cli::{parse_invocation, rerun, CliInvocation};
use wardsim::error::ConfigError;
use wardsim::io::{read_results_file, write_results_csv};
use wardsim::{enumerate_combos, Error, ExperimentPlan};

fn wardsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wardsim"))
        .args(args)
        .output()
        .expect("spawn wardsim")
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn layout_matches_golden() {
    let out = wardsim(&["layout"]);
    assert!(out.status.success());
    let golden = include_str!("golden/layout.txt");
    assert_eq!(String::from_utf8(out.stdout).unwrap(), golden);
}

#[test]
fn simulate_writes_one_row_per_replica() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let args = [
        "simulate", "--replicas", "4", "--horizon", "60", "--seed", "9", "--disinfect",
        "--direct-infection", "--out-dir", d,
    ];
    assert!(wardsim(&args).status.success());
    let first = read(&dir.path().join("results.csv"));
    assert_eq!(first.lines().count(), 5);
    assert!(first.ends_with('\n'));

    assert!(wardsim(&args).status.success());
    assert_eq!(read(&dir.path().join("results.csv")), first);

    let rows = read_results_file(&dir.path().join("results.csv")).unwrap();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().enumerate().all(|(i, r)| r.seed == 9 + i as u64));
}

#[test]
fn simulate_trace_has_row_per_tick() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = wardsim(&["simulate", "--horizon", "30", "--trace", "--out-dir", d]);
    assert!(out.status.success());
    let trace = read(&dir.path().join("trace.csv"));
    // Header, the initial state, then one row per tick.
    assert_eq!(trace.lines().count(), 1 + 1 + 30);
}

#[test]
fn empty_results_are_header_only() {
    let mut buf = Vec::new();
    write_results_csv(&[], &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().count(), 1);
    assert_eq!(text.trim_end().split(',').count(), 21);
}

#[test]
fn summarize_round_trips_through_binary() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    assert!(wardsim(&["simulate", "--replicas", "5", "--horizon", "80", "--out-dir", d])
        .status
        .success());
    let input = dir.path().join("results.csv");
    let out = wardsim(&["summarize", input.to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("experiment,combo_id,metric,n,mean,std,min,q1,median,q3,max\n"));

    let rows = read_results_file(&input).unwrap();
    let totals: Vec<f64> = rows
        .iter()
        .map(|r| {
            let c = &r.counters;
            (c.infected_by_ht + c.infected_by_lt + c.infected_by_colonized + c.infected_by_diseased)
                as f64
        })
        .collect();
    let mean = totals.iter().sum::<f64>() / totals.len() as f64;
    let line = text
        .lines()
        .find(|l| l.split(',').nth(2) == Some("total_contact_infections"))
        .expect("total row");
    let fields: Vec<&str> = line.split(',').collect();
    assert_eq!(fields[3], "5");
    assert!((fields[4].parse::<f64>().unwrap() - mean).abs() < 1e-9);
}

#[test]
fn errors_exit_nonzero() {
    let out = wardsim(&["simulate", "--disinfect", "--random-disinfect"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("random-disinfect"));

    let out = wardsim(&["simulate", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(1));

    let out = wardsim(&["experiment", "7"]);
    assert_eq!(out.status.code(), Some(1));

    let out = wardsim(&["summarize", "/nonexistent/results.csv"]);
    assert_eq!(out.status.code(), Some(1));

    let out = wardsim(&["--help"]);
    assert!(out.status.success());
    assert!(!out.stdout.is_empty());
}

#[test]
fn invocation_errors_are_typed() {
    let err = parse_invocation(["wardsim", "simulate", "--disinfect", "--random-disinfect"]).unwrap_err();
    assert!(matches!(err, Error::Config(ConfigError::ConflictingFlags(..))));

    let err = parse_invocation(["wardsim", "simulate", "--bogus"]).unwrap_err();
    assert!(matches!(err, Error::Config(ConfigError::UnknownFlag(_))));

    let err = parse_invocation(["wardsim", "simulate", "--high-touch-disinfection-rate", "1.5"])
        .unwrap_err();
    assert!(matches!(err, Error::Config(ConfigError::InvalidValue { .. })));

    let err = parse_invocation(["wardsim", "experiment", "4"]).unwrap_err();
    assert!(matches!(err, Error::Config(ConfigError::UnknownExperiment(4))));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(
        &path,
        "seed = 5\nhorizon = 40\nrandom-disinfect = true\nnumber-of-random-cleaning = 12\n\n[parameters]\ncapacity = 100\n",
    )
    .unwrap();
    let inv = parse_invocation([
        "wardsim",
        "simulate",
        "--config",
        path.to_str().unwrap(),
        "--seed",
        "6",
    ])
    .unwrap();
    let CliInvocation::Simulate { config, .. } = inv else {
        panic!("expected simulate");
    };
    assert_eq!(config.seed, 6);
    assert_eq!(config.horizon, 40);
    assert_eq!(config.params.capacity, 100);
    assert_eq!(config.scenario.cleaning.random_count(), Some(12));
}

#[test]
fn experiment_output_independent_of_parallelism() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for (dir, threads) in [(&a, "1"), (&b, "8")] {
        let out = wardsim(&[
            "experiment", "1", "--replicas", "3", "--horizon", "50", "--seed", "11",
            "--parallelism", threads, "--out-dir", dir.path().to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for file in ["results.csv", "summary.csv"] {
        assert_eq!(read(&a.path().join(file)), read(&b.path().join(file)), "{file}");
    }
}

#[test]
fn single_run_reproduces_its_row() {
    let plan = ExperimentPlan::for_experiments(&[2], 2, 21, 60).unwrap();
    let out = wardsim::run_experiment(&plan, 2).unwrap();
    let combos = enumerate_combos(2).unwrap();
    for (combo, replica) in [(&combos[0], 1), (&combos[77], 0), (&combos[143], 1)] {
        let alone = rerun(&plan, combo, replica).unwrap();
        let stored = out
            .results
            .iter()
            .find(|r| r.combo_id == combo.combo_id && r.replica_index == replica)
            .unwrap();
        assert_eq!(&alone, stored);

        let (mut x, mut y) = (Vec::new(), Vec::new());
        write_results_csv(std::slice::from_ref(&alone), &mut x).unwrap();
        write_results_csv(std::slice::from_ref(stored), &mut y).unwrap();
        assert_eq!(x, y);
    }
}
