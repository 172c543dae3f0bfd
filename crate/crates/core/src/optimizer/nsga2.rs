//! Generic generational NSGA-II over box-bounded real genomes.

use rayon::prelude::*;
use thiserror::Error;

use super::sorting::{crowded_cmp, crowding_distance, fast_non_dominated_sort};
use super::variation::{poly_mutate, sbx_crossover, Bound, Genome, Variation};
use crate::model::Rng;

/// A minimisation problem. Evaluations may run concurrently.
pub trait Problem: Sync {
    type Error: Send;

    fn bounds(&self) -> &[Bound];

    fn evaluate(&self, genes: &[f64]) -> Result<Vec<f64>, Self::Error>;
}

#[derive(Debug, Error)]
pub enum Nsga2Error<E> {
    #[error("population must be even and at least 4, got {0}")]
    Population(usize),
    #[error("bound {index} is empty or not finite: [{lo}, {hi}]")]
    Bounds { index: usize, lo: f64, hi: f64 },
    #[error("could not build worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
    #[error("objective evaluation failed: {0}")]
    Evaluation(E),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Nsga2Settings {
    pub population: usize,
    pub variation: Variation,
    pub seed: u64,
    pub parallelism: usize,
}

impl Default for Nsga2Settings {
    fn default() -> Self {
        Nsga2Settings {
            population: 40,
            variation: Variation::default(),
            seed: 0,
            parallelism: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub genome: Genome,
    pub objectives: Vec<f64>,
    /// 0 is non-dominated.
    pub rank: usize,
    pub crowding: f64,
}

/// Population summary after one generation.
#[derive(Debug, Clone, PartialEq)]
pub struct GenerationLog {
    pub generation: usize,
    pub front_size: usize,
    pub min: Vec<f64>,
    pub mean: Vec<f64>,
}

pub struct Nsga2<'p, P: Problem> {
    problem: &'p P,
    settings: Nsga2Settings,
    rng: Rng,
    pool: rayon::ThreadPool,
    population: Vec<Individual>,
    generation: usize,
}

impl<'p, P: Problem> Nsga2<'p, P> {
    /// Draws and evaluates the initial population (generation 0).
    pub fn new(problem: &'p P, settings: Nsga2Settings) -> Result<Self, Nsga2Error<P::Error>> {
        let mu = settings.population;
        if mu < 4 || !mu.is_multiple_of(2) {
            return Err(Nsga2Error::Population(mu));
        }
        for (index, b) in problem.bounds().iter().enumerate() {
            if !(b.lo.is_finite() && b.hi.is_finite() && b.lo <= b.hi) {
                return Err(Nsga2Error::Bounds { index, lo: b.lo, hi: b.hi });
            }
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(settings.parallelism.max(1))
            .build()?;
        let mut rng = Rng::new(settings.seed);
        let genomes: Vec<Genome> = (0..mu)
            .map(|_| Genome::random(problem.bounds(), &mut rng))
            .collect();

        let mut engine = Nsga2 {
            problem,
            settings,
            rng,
            pool,
            population: Vec::new(),
            generation: 0,
        };
        let mut population = engine.evaluate_all(genomes)?;
        assign_rank_and_crowding(&mut population);
        engine.population = population;
        Ok(engine)
    }

    pub fn generation(&self) -> usize {
        self.generation
    }

    pub fn population(&self) -> &[Individual] {
        &self.population
    }

    /// Current rank-0 individuals, in population order.
    pub fn front(&self) -> Vec<Individual> {
        self.population.iter().filter(|i| i.rank == 0).cloned().collect()
    }

    pub fn log(&self) -> GenerationLog {
        let m = self.population[0].objectives.len();
        let n = self.population.len() as f64;
        let mut min = vec![f64::INFINITY; m];
        let mut mean = vec![0.0; m];
        for ind in &self.population {
            for (k, &f) in ind.objectives.iter().enumerate() {
                min[k] = min[k].min(f);
                mean[k] += f / n;
            }
        }
        GenerationLog {
            generation: self.generation,
            front_size: self.population.iter().filter(|i| i.rank == 0).count(),
            min,
            mean,
        }
    }

    /// One generation: tournament, variation, evaluation, then elitist
    /// selection of the best μ out of parents and offspring.
    pub fn step(&mut self) -> Result<(), Nsga2Error<P::Error>> {
        let bounds = self.problem.bounds();
        let v = self.settings.variation;
        let mut offspring = Vec::with_capacity(self.population.len());
        while offspring.len() < self.population.len() {
            let a = self.tournament();
            let b = self.tournament();
            let (c1, c2) = sbx_crossover(
                &self.population[a].genome,
                &self.population[b].genome,
                bounds,
                v.crossover_probability,
                v.eta_c,
                &mut self.rng,
            );
            offspring.push(poly_mutate(&c1, bounds, v.mutation_probability, v.eta_m, &mut self.rng));
            offspring.push(poly_mutate(&c2, bounds, v.mutation_probability, v.eta_m, &mut self.rng));
        }
        let offspring = self.evaluate_all(offspring)?;

        let mu = self.population.len();
        let mut combined = std::mem::take(&mut self.population);
        combined.extend(offspring);
        let objectives: Vec<&[f64]> = combined.iter().map(|i| i.objectives.as_slice()).collect();

        let mut chosen = Vec::with_capacity(mu);
        for front in fast_non_dominated_sort(&objectives) {
            if chosen.len() + front.len() <= mu {
                chosen.extend(front);
                continue;
            }
            let points: Vec<&[f64]> = front.iter().map(|&i| objectives[i]).collect();
            let crowd = crowding_distance(&points);
            let mut order: Vec<usize> = (0..front.len()).collect();
            order.sort_by(|&x, &y| crowd[y].total_cmp(&crowd[x]).then(x.cmp(&y)));
            chosen.extend(order.into_iter().take(mu - chosen.len()).map(|k| front[k]));
            break;
        }
        chosen.sort_unstable();

        let mut slots: Vec<Option<Individual>> = combined.into_iter().map(Some).collect();
        let mut next: Vec<Individual> = chosen
            .into_iter()
            .map(|i| slots[i].take().expect("each index chosen once"))
            .collect();
        assign_rank_and_crowding(&mut next);
        self.population = next;
        self.generation += 1;
        Ok(())
    }

    /// Runs until `generations` generations have been completed.
    pub fn run_to(&mut self, generations: usize) -> Result<(), Nsga2Error<P::Error>> {
        while self.generation < generations {
            self.step()?;
        }
        Ok(())
    }

    fn tournament(&mut self) -> usize {
        let n = self.population.len();
        let a = self.rng.index(n);
        let b = self.rng.index(n);
        let (x, y) = (&self.population[a], &self.population[b]);
        match crowded_cmp(x.rank, x.crowding, y.rank, y.crowding) {
            std::cmp::Ordering::Greater => b,
            _ => a,
        }
    }

    fn evaluate_all(&self, genomes: Vec<Genome>) -> Result<Vec<Individual>, Nsga2Error<P::Error>> {
        let problem = self.problem;
        let objectives: Vec<Vec<f64>> = self
            .pool
            .install(|| {
                genomes
                    .par_iter()
                    .map(|g| problem.evaluate(&g.genes))
                    .collect::<Result<_, _>>()
            })
            .map_err(Nsga2Error::Evaluation)?;
        Ok(genomes
            .into_iter()
            .zip(objectives)
            .map(|(genome, objectives)| Individual {
                genome,
                objectives,
                rank: 0,
                crowding: 0.0,
            })
            .collect())
    }
}

fn assign_rank_and_crowding(population: &mut [Individual]) {
    let objectives: Vec<Vec<f64>> = population.iter().map(|i| i.objectives.clone()).collect();
    for (rank, front) in fast_non_dominated_sort(&objectives).into_iter().enumerate() {
        let points: Vec<&[f64]> = front.iter().map(|&i| objectives[i].as_slice()).collect();
        for (&i, d) in front.iter().zip(crowding_distance(&points)) {
            population[i].rank = rank;
            population[i].crowding = d;
        }
    }
}
