use super::rng::Rng;

/// Rates up to this value use multiplication of uniforms; larger ones use
/// transformed rejection.
pub const INVERSION_LIMIT: f64 = 30.0;

/// Draws a Poisson(`lambda`) count.
///
/// `lambda = 0` returns 0 without consuming randomness.
pub fn poisson_draw(lambda: f64, rng: &mut Rng) -> u64 {
    debug_assert!(lambda >= 0.0 && lambda.is_finite());
    if lambda <= 0.0 {
        0
    } else if lambda <= INVERSION_LIMIT {
        product_of_uniforms(lambda, rng)
    } else {
        transformed_rejection(lambda, rng)
    }
}

fn product_of_uniforms(lambda: f64, rng: &mut Rng) -> u64 {
    let limit = (-lambda).exp();
    let mut k = 0;
    let mut prod = rng.uniform();
    while prod > limit {
        k += 1;
        prod *= rng.uniform();
    }
    k
}

// Hörmann's PTRS: transformed rejection with squeeze.
fn transformed_rejection(lambda: f64, rng: &mut Rng) -> u64 {
    let slam = lambda.sqrt();
    let loglam = lambda.ln();
    let b = 0.931 + 2.53 * slam;
    let a = -0.059 + 0.02483 * b;
    let inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    let vr = 0.9277 - 3.6224 / (b - 2.0);

    loop {
        let u = rng.uniform() - 0.5;
        let v = rng.uniform();
        let us = 0.5 - u.abs();
        let k = ((2.0 * a / us + b) * u + lambda + 0.43).floor();
        if us >= 0.07 && v <= vr {
            return k as u64;
        }
        if k < 0.0 || (us < 0.013 && v > us) {
            continue;
        }
        let lhs = v.ln() + inv_alpha.ln() - (a / (us * us) + b).ln();
        let rhs = -lambda + k * loglam - libm::lgamma(k + 1.0);
        if lhs <= rhs {
            return k as u64;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn moments(lambda: f64, n: usize, seed: u64) -> (f64, f64) {
        let mut rng = Rng::new(seed);
        let xs: Vec<f64> = (0..n).map(|_| poisson_draw(lambda, &mut rng) as f64).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        (mean, var)
    }

    #[test]
    fn zero_rate_gives_zero() {
        let mut rng = Rng::new(1);
        assert!((0..100).all(|_| poisson_draw(0.0, &mut rng) == 0));
    }

    #[test]
    fn determinism() {
        let mut a = Rng::new(99);
        let mut b = Rng::new(99);
        let xs: Vec<u64> = (0..500).map(|_| poisson_draw(100.0, &mut a)).collect();
        let ys: Vec<u64> = (0..500).map(|_| poisson_draw(100.0, &mut b)).collect();
        assert_eq!(xs, ys);
    }

    #[test]
    fn mean_matches_rate_on_both_branches() {
        let n = 10_000;
        for (lambda, seed) in [(0.5, 1), (5.0, 2), (30.0, 3), (31.0, 4), (100.0, 5), (2500.0, 6)] {
            let (mean, var) = moments(lambda, n, seed);
            let se = (lambda / n as f64).sqrt();
            assert!((mean - lambda).abs() < 3.0 * se, "λ={lambda}: mean {mean}");
            // Var of the sample variance of a Poisson: (λ + 2λ²)/n approx.
            let se_var = ((lambda + 2.0 * lambda * lambda) / n as f64).sqrt();
            assert!((var - lambda).abs() < 4.0 * se_var, "λ={lambda}: var {var}");
        }
    }

    #[test]
    fn small_rate_pmf_matches() {
        // P(0) = e^{-λ}, P(1) = λe^{-λ} for λ = 2.
        let mut rng = Rng::new(8);
        let n = 200_000;
        let mut zeros = 0;
        let mut ones = 0;
        for _ in 0..n {
            match poisson_draw(2.0, &mut rng) {
                0 => zeros += 1,
                1 => ones += 1,
                _ => {}
            }
        }
        let p0 = (-2.0f64).exp();
        let p1 = 2.0 * p0;
        let tol = |p: f64| 4.0 * (p * (1.0 - p) / n as f64).sqrt();
        assert!((zeros as f64 / n as f64 - p0).abs() < tol(p0));
        assert!((ones as f64 / n as f64 - p1).abs() < tol(p1));
    }
}
