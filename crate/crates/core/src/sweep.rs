//! Replicated cartesian grid over (β_c, β_τ, C, I).
//!
//! Replication `r` of grid point `i` runs with seed
//! `mix_seed(master_seed, i, r)`, so every run is fixed by the spec alone and
//! the output does not depend on how runs are spread over threads.

use std::io::{self, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::indicators::{SimResult, SCALAR_NAMES};
use crate::model::{mix_seed, BehaviouralParams, ConfigError, SimulationConfig};
use crate::output::{format_sig6, write_atomic};
use crate::sim;

#[derive(Debug, thiserror::Error)]
pub enum SweepError {
    #[error("sweep list `{0}` is empty")]
    EmptyList(&'static str),
    #[error("sweep needs at least one replication")]
    NoReplications,
    #[error("parallelism must be at least 1")]
    NoWorkers,
    #[error("grid point {index} ({point}) has an invalid configuration: {source}")]
    InvalidPoint {
        index: usize,
        point: String,
        source: ConfigError,
    },
    #[error("could not build worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
    #[error("writing {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: SimulationConfig,
    pub beta_c_values: Vec<f64>,
    pub beta_tau_values: Vec<f64>,
    pub capacity_values: Vec<u32>,
    pub interval_values: Vec<u32>,
    pub replications: u32,
    pub master_seed: u64,
}

impl Default for SweepSpec {
    /// 10 × 10 × 4 × 6 grid with 10 replications: 24 000 runs.
    fn default() -> Self {
        let betas: Vec<f64> = (-5..=4).map(f64::from).collect();
        SweepSpec {
            base: SimulationConfig::default(),
            beta_c_values: betas.clone(),
            beta_tau_values: betas,
            capacity_values: vec![500, 1000, 1500, 2000],
            interval_values: vec![2, 3, 4, 5, 8, 10],
            replications: 10,
            master_seed: 0,
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), SweepError> {
        if self.beta_c_values.is_empty() {
            return Err(SweepError::EmptyList("beta_c"));
        }
        if self.beta_tau_values.is_empty() {
            return Err(SweepError::EmptyList("beta_tau"));
        }
        if self.capacity_values.is_empty() {
            return Err(SweepError::EmptyList("train_capacity"));
        }
        if self.interval_values.is_empty() {
            return Err(SweepError::EmptyList("train_interval"));
        }
        if self.replications == 0 {
            return Err(SweepError::NoReplications);
        }
        Ok(())
    }

    pub fn grid_len(&self) -> usize {
        self.beta_c_values.len()
            * self.beta_tau_values.len()
            * self.capacity_values.len()
            * self.interval_values.len()
    }

    pub fn run_count(&self) -> usize {
        self.grid_len() * self.replications as usize
    }

    /// The configuration of replication `replication` at `point`.
    pub fn config_for(&self, point: &GridPoint, replication: u32) -> SimulationConfig {
        let mut config = self.base.clone();
        config.behavioural = BehaviouralParams {
            beta_c: point.beta_c,
            beta_tau: point.beta_tau,
        };
        config.service.train_capacity = point.train_capacity;
        config.service.train_interval = point.train_interval;
        config.seed = mix_seed(self.master_seed, point.index as u64, u64::from(replication));
        config
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub index: usize,
    pub beta_c: f64,
    pub beta_tau: f64,
    pub train_capacity: u32,
    pub train_interval: u32,
}

impl std::fmt::Display for GridPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "beta_c={}, beta_tau={}, C={}, I={}",
            self.beta_c, self.beta_tau, self.train_capacity, self.train_interval
        )
    }
}

/// Full cartesian product, lexicographic in (β_c, β_τ, C, I).
pub fn build_grid(spec: &SweepSpec) -> Result<Vec<GridPoint>, SweepError> {
    spec.validate()?;
    let mut grid = Vec::with_capacity(spec.grid_len());
    for &beta_c in &spec.beta_c_values {
        for &beta_tau in &spec.beta_tau_values {
            for &train_capacity in &spec.capacity_values {
                for &train_interval in &spec.interval_values {
                    grid.push(GridPoint {
                        index: grid.len(),
                        beta_c,
                        beta_tau,
                        train_capacity,
                        train_interval,
                    });
                }
            }
        }
    }
    Ok(grid)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stat {
    pub mean: f64,
    pub sd: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub point: GridPoint,
    pub replications: u32,
    /// One entry per [`SCALAR_NAMES`] indicator.
    pub stats: [Stat; SCALAR_NAMES.len()],
}

impl SweepRow {
    pub fn stat(&self, indicator: &str) -> Option<Stat> {
        SCALAR_NAMES
            .iter()
            .position(|&n| n == indicator)
            .map(|i| self.stats[i])
    }
}

/// Mean and sample standard deviation, skipping undefined values.
///
/// A single defined value has sd 0; no defined value gives NaN for both.
pub fn mean_sd(values: impl IntoIterator<Item = f64>) -> Stat {
    let xs: Vec<f64> = values.into_iter().filter(|x| !x.is_nan()).collect();
    if xs.is_empty() {
        return Stat {
            mean: f64::NAN,
            sd: f64::NAN,
        };
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let sd = if xs.len() < 2 {
        0.0
    } else {
        (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    };
    Stat { mean, sd }
}

pub fn aggregate(point: GridPoint, results: &[SimResult]) -> SweepRow {
    let scalars: Vec<_> = results.iter().map(SimResult::scalars).collect();
    SweepRow {
        point,
        replications: results.len() as u32,
        stats: std::array::from_fn(|k| mean_sd(scalars.iter().map(|s| s[k]))),
    }
}

/// Runs every replication of every grid point on `parallelism` threads.
pub fn run_sweep(spec: &SweepSpec, parallelism: usize) -> Result<Vec<SweepRow>, SweepError> {
    if parallelism == 0 {
        return Err(SweepError::NoWorkers);
    }
    let grid = build_grid(spec)?;
    for point in &grid {
        spec.config_for(point, 0)
            .validate()
            .map_err(|source| SweepError::InvalidPoint {
                index: point.index,
                point: point.to_string(),
                source,
            })?;
    }

    let reps = spec.replications as usize;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism)
        .build()?;
    let results: Vec<SimResult> = pool.install(|| {
        (0..grid.len() * reps)
            .into_par_iter()
            .map(|job| {
                let config = spec.config_for(&grid[job / reps], (job % reps) as u32);
                sim::run(&config).expect("grid point validated").0
            })
            .collect()
    });

    Ok(grid
        .iter()
        .zip(results.chunks(reps))
        .map(|(point, runs)| aggregate(*point, runs))
        .collect())
}

pub fn sweep_csv_header() -> String {
    let mut header =
        String::from("beta_c,beta_tau,train_capacity,train_interval,replications");
    for name in SCALAR_NAMES {
        header.push_str(&format!(",{name}_mean,{name}_sd"));
    }
    header
}

pub fn write_sweep_rows<W: Write + ?Sized>(rows: &[SweepRow], out: &mut W) -> io::Result<()> {
    writeln!(out, "{}", sweep_csv_header())?;
    for row in rows {
        let p = row.point;
        write!(
            out,
            "{},{},{},{},{}",
            format_sig6(p.beta_c),
            format_sig6(p.beta_tau),
            p.train_capacity,
            p.train_interval,
            row.replications
        )?;
        for s in &row.stats {
            write!(out, ",{},{}", format_sig6(s.mean), format_sig6(s.sd))?;
        }
        writeln!(out)?;
    }
    Ok(())
}

pub fn write_sweep_csv(rows: &[SweepRow], path: &Path) -> Result<(), SweepError> {
    write_atomic(path, |w| write_sweep_rows(rows, w)).map_err(|source| SweepError::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModeId;

    fn small_spec() -> SweepSpec {
        let mut base = SimulationConfig::default();
        base.horizon = 30;
        SweepSpec {
            base,
            beta_c_values: vec![-1.0, 1.0, 2.0],
            beta_tau_values: vec![-0.5, 0.5],
            capacity_values: vec![500],
            interval_values: vec![5],
            replications: 3,
            master_seed: 17,
        }
    }

    #[test]
    fn grid_is_lexicographic() {
        let spec = SweepSpec {
            beta_c_values: vec![0.0, 1.0],
            beta_tau_values: vec![2.0, 3.0],
            capacity_values: vec![500],
            interval_values: vec![5],
            ..SweepSpec::default()
        };
        let grid = build_grid(&spec).unwrap();
        let pairs: Vec<_> = grid.iter().map(|p| (p.beta_c, p.beta_tau)).collect();
        assert_eq!(pairs, vec![(0.0, 2.0), (0.0, 3.0), (1.0, 2.0), (1.0, 3.0)]);
        assert!(grid.iter().enumerate().all(|(i, p)| p.index == i));
    }

    #[test]
    fn default_grid_size() {
        let spec = SweepSpec::default();
        assert_eq!(build_grid(&spec).unwrap().len(), 2400);
        assert_eq!(spec.run_count(), 24_000);
    }

    #[test]
    fn empty_lists_are_rejected() {
        let mut spec = SweepSpec::default();
        spec.interval_values.clear();
        assert!(matches!(build_grid(&spec), Err(SweepError::EmptyList("train_interval"))));
        let mut spec = SweepSpec::default();
        spec.replications = 0;
        assert!(matches!(build_grid(&spec), Err(SweepError::NoReplications)));
    }

    #[test]
    fn invalid_point_is_identified() {
        let mut spec = small_spec();
        spec.capacity_values = vec![500, 0];
        let err = run_sweep(&spec, 2).unwrap_err();
        match err {
            SweepError::InvalidPoint { index, .. } => assert_eq!(index, 1),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn aggregates_match_serial_recomputation() {
        let spec = small_spec();
        let rows = run_sweep(&spec, 4).unwrap();
        let grid = build_grid(&spec).unwrap();
        for (row, point) in rows.iter().zip(&grid) {
            let runs: Vec<_> = (0..spec.replications)
                .map(|r| sim::run(&spec.config_for(point, r)).unwrap().0)
                .collect();
            let rer: Vec<f64> = runs.iter().map(|r| r.rer_congestion).collect();
            let mean = rer.iter().sum::<f64>() / 3.0;
            let var = rer.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 2.0;
            let stat = row.stat("rer_congestion").unwrap();
            assert!((stat.mean - mean).abs() < 1e-12);
            assert!((stat.sd - var.sqrt()).abs() < 1e-12);
            assert_eq!(row.replications, 3);
        }
    }

    #[test]
    fn output_is_independent_of_parallelism() {
        let spec = small_spec();
        let mut a = Vec::new();
        let mut b = Vec::new();
        write_sweep_rows(&run_sweep(&spec, 1).unwrap(), &mut a).unwrap();
        write_sweep_rows(&run_sweep(&spec, 8).unwrap(), &mut b).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn single_replication_has_zero_sd() {
        let mut spec = small_spec();
        spec.replications = 1;
        let rows = run_sweep(&spec, 2).unwrap();
        assert!(rows.iter().all(|r| r.stats.iter().all(|s| s.sd == 0.0)));
    }

    #[test]
    fn mean_sd_skips_undefined_values() {
        let s = mean_sd([1.0, f64::NAN, 3.0]);
        assert_eq!(s.mean, 2.0);
        assert!((s.sd - 2f64.sqrt()).abs() < 1e-15);
        assert!(mean_sd([f64::NAN]).mean.is_nan());
    }

    #[test]
    fn csv_file_shape_and_parse_back() {
        let spec = small_spec();
        let rows = run_sweep(&spec, 2).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sweep.csv");
        write_sweep_csv(&rows[..4], &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.ends_with('\n'));
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 5);
        let columns = lines[0].split(',').count();
        assert_eq!(columns, 5 + 2 * SCALAR_NAMES.len());
        for (line, row) in lines[1..].iter().zip(&rows) {
            let fields: Vec<f64> = line.split(',').map(|f| f.parse().unwrap()).collect();
            assert_eq!(fields.len(), columns);
            for (k, s) in row.stats.iter().enumerate() {
                for (parsed, exact) in [(fields[5 + 2 * k], s.mean), (fields[6 + 2 * k], s.sd)] {
                    let scale = exact.abs().max(f64::MIN_POSITIVE);
                    assert!((parsed - exact).abs() / scale <= 5e-6, "{parsed} vs {exact}");
                }
            }
        }

        write_sweep_csv(&rows[..4], &path).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), text);
    }

    #[test]
    fn sweep_overrides_only_grid_parameters() {
        let spec = small_spec();
        let grid = build_grid(&spec).unwrap();
        let c = spec.config_for(&grid[3], 2);
        assert_eq!(c.modes[ModeId::Metro], spec.base.modes[ModeId::Metro]);
        assert_eq!(c.behavioural.beta_c, grid[3].beta_c);
        assert_eq!(c.seed, mix_seed(17, 3, 2));
    }
}
