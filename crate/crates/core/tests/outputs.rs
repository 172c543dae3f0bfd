use std::fs;

use modalshift::indicators::{run_csv_row, RUN_CSV_HEADER};
use modalshift::optimizer::{optimize, write_front_csv, write_log_csv, OptimizeSpec, FRONT_CSV_HEADER};
use modalshift::sim;
use modalshift::sweep::{run_sweep, sweep_csv_header, write_sweep_csv, SweepSpec};
use modalshift::SimulationConfig;

fn short_base() -> SimulationConfig {
    let mut c = SimulationConfig::default();
    c.horizon = 45;
    c
}

#[test]
fn run_row_matches_header() {
    let (result, _) = sim::run(&short_base()).unwrap();
    let row = run_csv_row(&short_base(), &result);
    assert_eq!(row.split(',').count(), RUN_CSV_HEADER.split(',').count());
    assert!(result.completed + result.uncompleted == result.total_created);
}

#[test]
fn sweep_file_is_rectangular_and_newline_terminated() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let spec = SweepSpec {
        base: short_base(),
        beta_c_values: vec![-1.0, 1.0],
        beta_tau_values: vec![0.0],
        capacity_values: vec![500, 1000],
        interval_values: vec![4],
        replications: 2,
        master_seed: 3,
    };
    write_sweep_csv(&run_sweep(&spec, 2).unwrap(), &path).unwrap();
    let text = fs::read_to_string(&path).unwrap();
    assert!(text.ends_with('\n'));
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), sweep_csv_header());
    let width = sweep_csv_header().split(',').count();
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|l| l.split(',').count() == width));
}

#[test]
fn optimisation_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let mut spec = OptimizeSpec {
        population: 6,
        generations: 2,
        replications: 1,
        ..OptimizeSpec::default()
    };
    spec.base.horizon = 30;
    let result = optimize(&spec, 1).unwrap();
    write_front_csv(&result.front, &dir.path().join("front.csv")).unwrap();
    write_log_csv(&result.log, &dir.path().join("log.csv")).unwrap();

    let front = fs::read_to_string(dir.path().join("front.csv")).unwrap();
    assert_eq!(front.lines().next(), Some(FRONT_CSV_HEADER));
    assert_eq!(front.lines().count(), result.front.len() + 1);
    let f1: Vec<f64> = result.front.iter().map(|i| i.objectives[0]).collect();
    assert!(f1.windows(2).all(|w| w[0] <= w[1]));
    let log = fs::read_to_string(dir.path().join("log.csv")).unwrap();
    assert_eq!(log.lines().count(), 1 + 3);
}
