use std::fmt;

use super::choice::{BehaviouralParams, NestedShares, ShiftConvention};
use super::mode::{ModeId, ModeTable};

/// Every violated configuration invariant, collected in one pass.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct ConfigError {
    pub violations: Vec<String>,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid configuration: {}", self.violations.join("; "))
    }
}

/// Per-mode parameters.
///
/// For [`ModeId::Rer`] only `arrival_rate` is used; trains carry the users.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSpec {
    /// Minutes to traverse the segment.
    pub traversal_time: u32,
    /// Maximum number of users in the mode's queue.
    pub queue_capacity: u32,
    /// Poisson arrival rate, users per minute.
    pub arrival_rate: f64,
    /// Probability of picking this mode once a user decided to shift.
    pub shift_share: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ServiceParams {
    /// Minutes between scheduled trains.
    pub train_interval: u32,
    /// Maximum number of users who can board one train.
    pub train_capacity: u32,
    /// Users boarding per minute.
    pub boarding_rate: u32,
    /// Minutes a train may dwell at the station.
    pub max_dwell: u32,
    /// Segment length in slots; a train moves one slot per minute.
    pub segment_slots: u32,
    /// Normalisation of platform occupancy into perceived congestion.
    pub platform_capacity: u32,
}

impl Default for ServiceParams {
    fn default() -> Self {
        ServiceParams {
            train_interval: 5,
            train_capacity: 2600,
            boarding_rate: 1000,
            max_dwell: 2,
            segment_slots: 4,
            platform_capacity: 2000,
        }
    }
}

/// How the five alternative-mode congestion values are averaged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CongestionWeighting {
    #[default]
    Unweighted,
    /// Weighted by the number of users who entered each mode during the run.
    Demand,
}

impl CongestionWeighting {
    pub fn name(self) -> &'static str {
        match self {
            CongestionWeighting::Unweighted => "unweighted",
            CongestionWeighting::Demand => "demand",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "unweighted" => Some(CongestionWeighting::Unweighted),
            "demand" => Some(CongestionWeighting::Demand),
            _ => None,
        }
    }
}

/// Everything needed to reproduce one run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub behavioural: BehaviouralParams,
    pub shift_convention: ShiftConvention,
    pub service: ServiceParams,
    pub modes: ModeTable<ModeSpec>,
    /// Number of one-minute steps.
    pub horizon: u32,
    /// Minutes a shifting user spends reaching the alternative mode.
    pub transfer_time: u32,
    pub seed: u64,
    /// Lets shifted users waiting for a full alternative queue shift again.
    pub allow_reshift: bool,
    pub congestion_weighting: CongestionWeighting,
}

pub fn default_modes() -> ModeTable<ModeSpec> {
    ModeTable::from_fn(|m| {
        let (traversal_time, queue_capacity, arrival_rate, shift_share) = match m {
            ModeId::Rer => (4, 2000, 100.0, 0.0),
            ModeId::Metro => (10, 3500, 40.0, 0.55),
            ModeId::Bus => (25, 300, 10.0, 0.20),
            ModeId::Taxi => (15, 50, 2.0, 0.05),
            ModeId::Bike => (20, 200, 5.0, 0.10),
            ModeId::Walk => (60, 10_000, 3.0, 0.10),
        };
        ModeSpec {
            traversal_time,
            queue_capacity,
            arrival_rate,
            shift_share,
        }
    })
}

impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig {
            behavioural: BehaviouralParams::default(),
            shift_convention: ShiftConvention::default(),
            service: ServiceParams::default(),
            modes: default_modes(),
            horizon: 240,
            transfer_time: 5,
            seed: 0,
            allow_reshift: false,
            congestion_weighting: CongestionWeighting::default(),
        }
    }
}

impl SimulationConfig {
    /// The congested optimisation scenario: C = 500, I = 5.
    pub fn congested_scenario() -> Self {
        let mut config = SimulationConfig::default();
        config.service.train_capacity = 500;
        config.service.train_interval = 5;
        config
    }

    pub fn nested_shares(&self) -> Result<NestedShares, ConfigError> {
        NestedShares::new(self.modes.map(|_, spec| spec.shift_share))
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let mut violations = Vec::new();
        let b = self.behavioural;
        if !b.beta_c.is_finite() {
            violations.push(format!("behaviour.beta_c = {} is not finite", b.beta_c));
        }
        if !b.beta_tau.is_finite() {
            violations.push(format!("behaviour.beta_tau = {} is not finite", b.beta_tau));
        }

        let s = self.service;
        for (name, value) in [
            ("train_interval", s.train_interval),
            ("train_capacity", s.train_capacity),
            ("boarding_rate", s.boarding_rate),
            ("max_dwell", s.max_dwell),
            ("segment_slots", s.segment_slots),
            ("platform_capacity", s.platform_capacity),
        ] {
            if value == 0 {
                violations.push(format!("service.{name} must be positive"));
            }
        }

        for (m, spec) in self.modes.iter() {
            if spec.traversal_time == 0 {
                violations.push(format!("modes.{m}.traversal_time must be at least 1"));
            }
            if spec.queue_capacity == 0 {
                violations.push(format!("modes.{m}.queue_capacity must be at least 1"));
            }
            if !(spec.arrival_rate.is_finite() && spec.arrival_rate >= 0.0) {
                violations.push(format!(
                    "modes.{m}.arrival_rate = {} must be finite and non-negative",
                    spec.arrival_rate
                ));
            }
        }
        if let Err(e) = self.nested_shares() {
            violations.extend(e.violations);
        }

        if self.horizon == 0 {
            violations.push("run.horizon must be at least 1".to_string());
        }

        if violations.is_empty() {
            Ok(())
        } else {
            Err(ConfigError { violations })
        }
    }
}
