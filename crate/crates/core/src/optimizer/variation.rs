//! Real-coded variation: simulated binary crossover and polynomial mutation,
//! both in their bounded forms.

use crate::model::Rng;

/// Closed interval of admissible values for one gene.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bound {
    pub lo: f64,
    pub hi: f64,
}

impl Bound {
    pub fn new(lo: f64, hi: f64) -> Self {
        Bound { lo, hi }
    }

    pub fn clip(&self, x: f64) -> f64 {
        x.clamp(self.lo, self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        (self.lo..=self.hi).contains(&x)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Genome {
    pub genes: Vec<f64>,
}

impl Genome {
    pub fn new(genes: Vec<f64>) -> Self {
        Genome { genes }
    }

    pub fn random(bounds: &[Bound], rng: &mut Rng) -> Self {
        Genome::new(bounds.iter().map(|b| rng.uniform_in(b.lo, b.hi)).collect())
    }

    pub fn within(&self, bounds: &[Bound]) -> bool {
        self.genes.len() == bounds.len()
            && self.genes.iter().zip(bounds).all(|(&x, b)| b.contains(x))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Variation {
    /// Probability that a parent pair is recombined at all.
    pub crossover_probability: f64,
    /// SBX distribution index.
    pub eta_c: f64,
    /// Per-gene mutation probability.
    pub mutation_probability: f64,
    /// Polynomial mutation distribution index.
    pub eta_m: f64,
}

impl Default for Variation {
    fn default() -> Self {
        Variation {
            crossover_probability: 0.9,
            eta_c: 15.0,
            mutation_probability: 0.5,
            eta_m: 20.0,
        }
    }
}

const GENE_EPS: f64 = 1e-14;

/// Bounded SBX. Each gene of a recombined pair crosses with probability 1/2.
pub fn sbx_crossover(
    a: &Genome,
    b: &Genome,
    bounds: &[Bound],
    crossover_probability: f64,
    eta_c: f64,
    rng: &mut Rng,
) -> (Genome, Genome) {
    let mut c1 = a.clone();
    let mut c2 = b.clone();
    if rng.uniform() >= crossover_probability {
        return (c1, c2);
    }
    for (i, bound) in bounds.iter().enumerate() {
        let (x1, x2) = (a.genes[i], b.genes[i]);
        if rng.uniform() >= 0.5 || (x1 - x2).abs() <= GENE_EPS {
            continue;
        }
        let (y1, y2) = if x1 < x2 { (x1, x2) } else { (x2, x1) };
        let span = y2 - y1;
        let u = rng.uniform();

        let spread = |beta: f64| {
            let alpha = 2.0 - beta.powf(-(eta_c + 1.0));
            if u <= 1.0 / alpha {
                (u * alpha).powf(1.0 / (eta_c + 1.0))
            } else {
                (1.0 / (2.0 - u * alpha)).powf(1.0 / (eta_c + 1.0))
            }
        };
        let betaq_lo = spread(1.0 + 2.0 * (y1 - bound.lo) / span);
        let betaq_hi = spread(1.0 + 2.0 * (bound.hi - y2) / span);
        let low = bound.clip(0.5 * ((y1 + y2) - betaq_lo * span));
        let high = bound.clip(0.5 * ((y1 + y2) + betaq_hi * span));

        if rng.coin() {
            c1.genes[i] = high;
            c2.genes[i] = low;
        } else {
            c1.genes[i] = low;
            c2.genes[i] = high;
        }
    }
    (c1, c2)
}

/// Bounded polynomial mutation, applied to each gene with `mutation_probability`.
pub fn poly_mutate(
    g: &Genome,
    bounds: &[Bound],
    mutation_probability: f64,
    eta_m: f64,
    rng: &mut Rng,
) -> Genome {
    let mut out = g.clone();
    for (x, bound) in out.genes.iter_mut().zip(bounds) {
        if rng.uniform() >= mutation_probability {
            continue;
        }
        let span = bound.hi - bound.lo;
        if span <= 0.0 {
            *x = bound.lo;
            continue;
        }
        let delta1 = (*x - bound.lo) / span;
        let delta2 = (bound.hi - *x) / span;
        let u = rng.uniform();
        let power = 1.0 / (eta_m + 1.0);
        let deltaq = if u < 0.5 {
            let v = 2.0 * u + (1.0 - 2.0 * u) * (1.0 - delta1).powf(eta_m + 1.0);
            v.powf(power) - 1.0
        } else {
            let v = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * (1.0 - delta2).powf(eta_m + 1.0);
            1.0 - v.powf(power)
        };
        *x = bound.clip(*x + deltaq * span);
    }
    out
}
