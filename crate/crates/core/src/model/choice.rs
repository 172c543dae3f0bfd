//! Discrete choice between waiting for the train and shifting mode.

use super::config::ConfigError;
use super::mode::{ModeId, ModeTable};
use super::rng::Rng;

/// Behavioural coefficients of the utility difference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BehaviouralParams {
    /// Weight of perceived congestion (dimensionless).
    pub beta_c: f64,
    /// Weight of perceived time, per minute.
    pub beta_tau: f64,
}

impl Default for BehaviouralParams {
    fn default() -> Self {
        BehaviouralParams {
            beta_c: 0.0,
            beta_tau: 0.0,
        }
    }
}

/// How the logistic of the utility difference is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ShiftConvention {
    /// `P(shift) = 1 / (1 + exp(-ΔU))`: larger coefficients mean more shifting.
    #[default]
    Complement,
    /// `P(shift) = 1 / (1 + exp(ΔU))`: the logistic taken literally as the
    /// shift probability.
    Literal,
}

impl ShiftConvention {
    pub fn name(self) -> &'static str {
        match self {
            ShiftConvention::Complement => "complement",
            ShiftConvention::Literal => "literal",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "complement" => Some(ShiftConvention::Complement),
            "literal" => Some(ShiftConvention::Literal),
            _ => None,
        }
    }

    pub fn shift_probability(self, delta_u: f64) -> f64 {
        match self {
            ShiftConvention::Complement => shift_probability(delta_u),
            ShiftConvention::Literal => shift_probability(-delta_u),
        }
    }
}

/// Users waiting on the platform normalised by platform capacity. May exceed 1.
pub fn perceived_congestion(waiting_count: usize, platform_capacity: u32) -> f64 {
    waiting_count as f64 / platform_capacity as f64
}

/// Elapsed trip time plus the wait until the next train, in minutes.
pub fn perceived_time(elapsed: u32, wait_to_next_train: u32) -> f64 {
    f64::from(elapsed) + f64::from(wait_to_next_train)
}

/// Utility difference `β_c·c + β_τ·τ` between shifting and waiting.
pub fn delta_utility(params: BehaviouralParams, congestion: f64, perceived_time: f64) -> f64 {
    params.beta_c * congestion + params.beta_tau * perceived_time
}

/// Logistic `1 / (1 + exp(-ΔU))`, evaluated without overflow for any finite input.
pub fn shift_probability(delta_u: f64) -> f64 {
    if delta_u >= 0.0 {
        1.0 / (1.0 + (-delta_u).exp())
    } else {
        let e = delta_u.exp();
        e / (1.0 + e)
    }
}

/// Probabilities of picking each alternative mode once a shift is decided.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NestedShares(ModeTable<f64>);

impl NestedShares {
    pub const SUM_TOLERANCE: f64 = 1e-9;

    pub fn new(shares: ModeTable<f64>) -> Result<Self, ConfigError> {
        let mut violations = Vec::new();
        for (m, &s) in shares.iter() {
            if !(0.0..=1.0).contains(&s) {
                violations.push(format!("modes.{m}.shift_share = {s} is outside [0, 1]"));
            }
        }
        if shares[ModeId::Rer] != 0.0 {
            violations.push("modes.rer.shift_share must be 0".to_string());
        }
        let total: f64 = shares.alternatives().map(|(_, s)| s).sum();
        if (total - 1.0).abs() > Self::SUM_TOLERANCE {
            violations.push(format!(
                "shift_share over alternative modes sums to {total}, expected 1"
            ));
        }
        if violations.is_empty() {
            Ok(NestedShares(shares))
        } else {
            Err(ConfigError { violations })
        }
    }

    pub fn get(&self, mode: ModeId) -> f64 {
        self.0[mode]
    }

    /// True if some mode other than `mode` has a positive share.
    pub fn has_alternative_to(&self, mode: ModeId) -> bool {
        ModeId::ALTERNATIVES
            .iter()
            .any(|&m| m != mode && self.0[m] > 0.0)
    }

    /// Maps a uniform draw `u ∈ [0, 1)` onto a mode by cumulative intervals
    /// over [`ModeId::ALTERNATIVES`], optionally leaving one mode out (the
    /// remaining shares are renormalised).
    pub fn pick(&self, u: f64, exclude: Option<ModeId>) -> ModeId {
        let weight = |m: ModeId| if Some(m) == exclude { 0.0 } else { self.0[m] };
        let total: f64 = ModeId::ALTERNATIVES.iter().map(|&m| weight(m)).sum();
        let target = u * total;
        let mut cumulative = 0.0;
        let mut last_positive = None;
        for m in ModeId::ALTERNATIVES {
            let w = weight(m);
            if w <= 0.0 {
                continue;
            }
            cumulative += w;
            last_positive = Some(m);
            if target < cumulative {
                return m;
            }
        }
        // Rounding can leave `target` just above the final cumulative sum.
        last_positive
            .or_else(|| ModeId::ALTERNATIVES.into_iter().find(|&m| Some(m) != exclude))
            .expect("at least one alternative mode")
    }
}

/// Categorical draw of the alternative mode a shifting user heads to.
pub fn choose_alternative(shares: &NestedShares, rng: &mut Rng) -> ModeId {
    shares.pick(rng.uniform(), None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shares(values: [f64; 5]) -> NestedShares {
        let mut t = ModeTable::default();
        for (m, v) in ModeId::ALTERNATIVES.into_iter().zip(values) {
            t[m] = v;
        }
        NestedShares::new(t).unwrap()
    }

    #[test]
    fn congestion_is_a_plain_ratio() {
        assert_eq!(perceived_congestion(0, 2000), 0.0);
        assert_eq!(perceived_congestion(1000, 2000), 0.5);
        assert_eq!(perceived_congestion(3000, 2000), 1.5);
    }

    #[test]
    fn perceived_time_is_a_sum() {
        assert_eq!(perceived_time(0, 0), 0.0);
        assert_eq!(perceived_time(10, 3), 13.0);
        assert_eq!(perceived_time(7, 0), 7.0);
    }

    #[test]
    fn delta_utility_examples() {
        let p = |beta_c, beta_tau| BehaviouralParams { beta_c, beta_tau };
        assert_eq!(delta_utility(p(0.0, 0.0), 0.8, 12.0), 0.0);
        assert_eq!(delta_utility(p(1.0, 0.0), 0.5, 99.0), 0.5);
        assert!((delta_utility(p(2.0, 0.1), 0.5, 10.0) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn logistic_examples() {
        assert_eq!(shift_probability(0.0), 0.5);
        // 1 / (1 + 1/3)
        assert!((shift_probability(3f64.ln()) - 0.75).abs() < 1e-12);
        assert!(shift_probability(-1000.0) < 1e-12);
        assert_eq!(shift_probability(1000.0), 1.0);
        assert!(shift_probability(700.0).is_finite());
        assert!(shift_probability(-700.0).is_finite());
    }

    #[test]
    fn literal_convention_is_the_complement() {
        for x in [-3.0, -0.2, 0.0, 1.5, 9.0] {
            let a = ShiftConvention::Complement.shift_probability(x);
            let b = ShiftConvention::Literal.shift_probability(x);
            assert!((a + b - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_shares_always_pick_the_same_mode() {
        let s = shares([1.0, 0.0, 0.0, 0.0, 0.0]);
        let mut rng = Rng::new(11);
        for _ in 0..1000 {
            assert_eq!(choose_alternative(&s, &mut rng), ModeId::Metro);
        }
        assert_eq!(s.pick(0.999_999_999, None), ModeId::Metro);
    }

    #[test]
    fn cumulative_interval_boundary() {
        let s = shares([0.5, 0.5, 0.0, 0.0, 0.0]);
        assert_eq!(s.pick(0.4999, None), ModeId::Metro);
        assert_eq!(s.pick(0.5001, None), ModeId::Bus);
        assert_eq!(s.pick(0.5, None), ModeId::Bus);
    }

    #[test]
    fn uniform_shares_have_uniform_frequencies() {
        let s = shares([0.2; 5]);
        let mut rng = Rng::new(2024);
        let n = 100_000;
        let mut counts = ModeTable::<usize>::default();
        for _ in 0..n {
            counts[choose_alternative(&s, &mut rng)] += 1;
        }
        for (m, &c) in counts.alternatives() {
            let freq = c as f64 / n as f64;
            assert!((freq - 0.2).abs() < 0.01, "{m}: {freq}");
        }
        assert_eq!(counts[ModeId::Rer], 0);
    }

    #[test]
    fn exclusion_renormalises() {
        let s = shares([0.5, 0.5, 0.0, 0.0, 0.0]);
        assert_eq!(s.pick(0.1, Some(ModeId::Metro)), ModeId::Bus);
        assert_eq!(s.pick(0.9, Some(ModeId::Bus)), ModeId::Metro);
    }

    #[test]
    fn malformed_shares_are_rejected() {
        let mut t = ModeTable::default();
        t[ModeId::Metro] = 0.9;
        let err = NestedShares::new(t).unwrap_err();
        assert!(err.to_string().contains("shift_share"));

        t[ModeId::Metro] = 1.5;
        t[ModeId::Bus] = -0.5;
        let err = NestedShares::new(t).unwrap_err();
        assert_eq!(err.violations.len(), 2);

        t[ModeId::Metro] = 1.0;
        t[ModeId::Bus] = 0.0;
        t[ModeId::Rer] = 0.1;
        assert!(NestedShares::new(t).is_err());
    }
}
