//! Multi-objective search over the behavioural parameters (β_c, β_τ).
//!
//! Objectives are the time-averaged Rer congestion and the mean congestion of
//! the alternative modes, both minimised. Every genome is scored on the same
//! replication seeds so that differences between genomes are not drowned by
//! simulation noise.

mod nsga2;
mod sorting;
mod variation;

use std::io::{self, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

pub use nsga2::{GenerationLog, Individual, Nsga2, Nsga2Error, Nsga2Settings, Problem};
pub use sorting::{crowded_cmp, crowding_distance, dominates, fast_non_dominated_sort};
pub use variation::{poly_mutate, sbx_crossover, Bound, Genome, Variation};

use crate::model::{mix_seed, BehaviouralParams, ConfigError, SimulationConfig};
use crate::output::{format_sig6, write_atomic};
use crate::sim;

pub const FRONT_CSV_HEADER: &str = "beta_c,beta_tau,rer_congestion,other_congestion,rank,crowding";
pub const LOG_CSV_HEADER: &str =
    "generation,front_size,min_rer_congestion,min_other_congestion,mean_rer_congestion,mean_other_congestion";

/// Index reserved for the optimiser's evaluation seeds; sweeps use grid
/// indices, which never get this large.
const EVAL_SEED_INDEX: u64 = u32::MAX as u64;

#[derive(Debug, Error)]
pub enum OptimizeError {
    #[error("population must be even and at least 4, got {0}")]
    Population(usize),
    #[error("generations must be at least 1")]
    NoGenerations,
    #[error("each evaluation needs at least one replication")]
    NoReplications,
    #[error("{name} bounds [{lo}, {hi}] are empty or not finite")]
    Bounds { name: &'static str, lo: f64, hi: f64 },
    #[error("{name} = {value} is out of range")]
    Variation { name: &'static str, value: f64 },
    #[error("parallelism must be at least 1")]
    NoWorkers,
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("could not build worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
    #[error("writing {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

impl From<Nsga2Error<ConfigError>> for OptimizeError {
    fn from(e: Nsga2Error<ConfigError>) -> Self {
        match e {
            Nsga2Error::Population(mu) => OptimizeError::Population(mu),
            Nsga2Error::Bounds { index, lo, hi } => OptimizeError::Bounds {
                name: if index == 0 { "beta_c" } else { "beta_tau" },
                lo,
                hi,
            },
            Nsga2Error::Pool(e) => OptimizeError::Pool(e),
            Nsga2Error::Evaluation(e) => OptimizeError::Config(e),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeSpec {
    pub base: SimulationConfig,
    pub population: usize,
    pub generations: usize,
    pub replications: u32,
    pub beta_c_bounds: Bound,
    pub beta_tau_bounds: Bound,
    pub variation: Variation,
    pub master_seed: u64,
}

impl Default for OptimizeSpec {
    fn default() -> Self {
        OptimizeSpec {
            base: SimulationConfig::congested_scenario(),
            population: 200,
            generations: 2000,
            replications: 5,
            beta_c_bounds: Bound::new(-5.0, 5.0),
            beta_tau_bounds: Bound::new(-5.0, 5.0),
            variation: Variation::default(),
            master_seed: 0,
        }
    }
}

impl OptimizeSpec {
    pub fn validate(&self) -> Result<(), OptimizeError> {
        if self.population < 4 || !self.population.is_multiple_of(2) {
            return Err(OptimizeError::Population(self.population));
        }
        if self.generations == 0 {
            return Err(OptimizeError::NoGenerations);
        }
        if self.replications == 0 {
            return Err(OptimizeError::NoReplications);
        }
        for (name, b) in [("beta_c", self.beta_c_bounds), ("beta_tau", self.beta_tau_bounds)] {
            if !(b.lo.is_finite() && b.hi.is_finite() && b.lo <= b.hi) {
                return Err(OptimizeError::Bounds { name, lo: b.lo, hi: b.hi });
            }
        }
        let v = self.variation;
        for (name, value, ok) in [
            ("crossover_probability", v.crossover_probability, (0.0..=1.0).contains(&v.crossover_probability)),
            ("mutation_probability", v.mutation_probability, (0.0..=1.0).contains(&v.mutation_probability)),
            ("eta_c", v.eta_c, v.eta_c.is_finite() && v.eta_c >= 0.0),
            ("eta_m", v.eta_m, v.eta_m.is_finite() && v.eta_m >= 0.0),
        ] {
            if !ok {
                return Err(OptimizeError::Variation { name, value });
            }
        }
        self.base.validate()?;
        Ok(())
    }

    /// Seeds shared by every evaluation of the run.
    pub fn evaluation_seeds(&self) -> Vec<u64> {
        (0..self.replications as u64)
            .map(|r| mix_seed(self.master_seed, EVAL_SEED_INDEX, r))
            .collect()
    }
}

/// The simulator seen as a two-objective function of (β_c, β_τ).
pub struct BehaviourProblem {
    base: SimulationConfig,
    seeds: Vec<u64>,
    bounds: [Bound; 2],
}

impl BehaviourProblem {
    pub fn new(spec: &OptimizeSpec) -> Self {
        BehaviourProblem {
            base: spec.base.clone(),
            seeds: spec.evaluation_seeds(),
            bounds: [spec.beta_c_bounds, spec.beta_tau_bounds],
        }
    }
}

impl Problem for BehaviourProblem {
    type Error = ConfigError;

    fn bounds(&self) -> &[Bound] {
        &self.bounds
    }

    fn evaluate(&self, genes: &[f64]) -> Result<Vec<f64>, ConfigError> {
        let mut config = self.base.clone();
        config.behavioural = BehaviouralParams {
            beta_c: genes[0],
            beta_tau: genes[1],
        };
        let (mut rer, mut other) = (0.0, 0.0);
        for &seed in &self.seeds {
            config.seed = seed;
            let (result, _) = sim::run(&config)?;
            rer += result.rer_congestion;
            other += result.avg_congestion_other;
        }
        let n = self.seeds.len() as f64;
        Ok(vec![rer / n, other / n])
    }
}

/// Mean (rer_congestion, avg_congestion_other) of `genes` over the spec's
/// common seeds.
pub fn evaluate(genes: [f64; 2], spec: &OptimizeSpec) -> Result<(f64, f64), ConfigError> {
    let f = BehaviourProblem::new(spec).evaluate(&genes)?;
    Ok((f[0], f[1]))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Optimization {
    /// Final rank-0 individuals, ordered by Rer congestion.
    pub front: Vec<Individual>,
    /// One entry per generation, starting with the initial population.
    pub log: Vec<GenerationLog>,
}

pub fn optimize(spec: &OptimizeSpec, parallelism: usize) -> Result<Optimization, OptimizeError> {
    if parallelism == 0 {
        return Err(OptimizeError::NoWorkers);
    }
    spec.validate()?;
    let problem = BehaviourProblem::new(spec);
    let settings = Nsga2Settings {
        population: spec.population,
        variation: spec.variation,
        seed: spec.master_seed,
        parallelism,
    };
    let mut engine = Nsga2::new(&problem, settings)?;
    let mut log = vec![engine.log()];
    while engine.generation() < spec.generations {
        engine.step()?;
        log.push(engine.log());
    }
    let mut front = engine.front();
    front.sort_by(|a, b| {
        a.objectives[0]
            .total_cmp(&b.objectives[0])
            .then(a.objectives[1].total_cmp(&b.objectives[1]))
    });
    Ok(Optimization { front, log })
}

pub fn write_front_rows<W: Write + ?Sized>(front: &[Individual], out: &mut W) -> io::Result<()> {
    writeln!(out, "{FRONT_CSV_HEADER}")?;
    for ind in front {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            format_sig6(ind.genome.genes[0]),
            format_sig6(ind.genome.genes[1]),
            format_sig6(ind.objectives[0]),
            format_sig6(ind.objectives[1]),
            ind.rank,
            format_sig6(ind.crowding)
        )?;
    }
    Ok(())
}

pub fn write_log_rows<W: Write + ?Sized>(log: &[GenerationLog], out: &mut W) -> io::Result<()> {
    writeln!(out, "{LOG_CSV_HEADER}")?;
    for g in log {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            g.generation,
            g.front_size,
            format_sig6(g.min[0]),
            format_sig6(g.min[1]),
            format_sig6(g.mean[0]),
            format_sig6(g.mean[1])
        )?;
    }
    Ok(())
}

pub fn write_front_csv(front: &[Individual], path: &Path) -> Result<(), OptimizeError> {
    write_atomic(path, |w| write_front_rows(front, w)).map_err(|source| OptimizeError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_log_csv(log: &[GenerationLog], path: &Path) -> Result<(), OptimizeError> {
    write_atomic(path, |w| write_log_rows(log, w)).map_err(|source| OptimizeError::Io {
        path: path.to_path_buf(),
        source,
    })
}
