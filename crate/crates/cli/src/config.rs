//! Flat `section.key = value` files for runs, sweeps and optimisations.
//!
//! One assignment per line; `#` starts a comment. Missing keys keep their
//! default, unknown or repeated keys are errors. List values are comma
//! separated.

use std::collections::HashSet;
use std::fmt::{Display, Write as _};
use std::str::FromStr;

use modalshift::model::{
    BehaviouralParams, ConfigError, CongestionWeighting, ModeId, ShiftConvention,
    SimulationConfig,
};
use modalshift::optimizer::{Bound, OptimizeSpec};
use modalshift::sweep::SweepSpec;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigFileError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: `{key}` is set twice")]
    DuplicateKey { line: usize, key: String },
    #[error("line {line}: bad value for `{key}`: {message}")]
    BadValue {
        line: usize,
        key: String,
        message: String,
    },
    #[error(transparent)]
    Invalid(#[from] ConfigError),
    #[error("{0}")]
    Spec(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub line: usize,
    pub key: String,
    pub value: String,
}

impl Entry {
    fn parse<T: FromStr>(&self) -> Result<T, ConfigFileError>
    where
        T::Err: Display,
    {
        self.value.parse().map_err(|e: T::Err| self.bad(e))
    }

    fn list<T: FromStr>(&self) -> Result<Vec<T>, ConfigFileError>
    where
        T::Err: Display,
    {
        if self.value.is_empty() {
            return Ok(Vec::new());
        }
        self.value
            .split(',')
            .map(|item| item.trim().parse().map_err(|e: T::Err| self.bad(e)))
            .collect()
    }

    fn bound(&self) -> Result<Bound, ConfigFileError> {
        match self.list::<f64>()?.as_slice() {
            &[lo, hi] => Ok(Bound::new(lo, hi)),
            _ => Err(self.bad("expected `lo, hi`")),
        }
    }

    fn bad(&self, message: impl Display) -> ConfigFileError {
        ConfigFileError::BadValue {
            line: self.line,
            key: self.key.clone(),
            message: message.to_string(),
        }
    }

    fn unknown(&self) -> ConfigFileError {
        ConfigFileError::UnknownKey {
            line: self.line,
            key: self.key.clone(),
        }
    }
}

/// Splits a file into assignments, rejecting malformed and repeated lines.
pub fn parse_entries(text: &str) -> Result<Vec<Entry>, ConfigFileError> {
    let mut seen = HashSet::new();
    let mut entries = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(ConfigFileError::Syntax {
                line,
                message: format!("expected `key = value`, got `{content}`"),
            });
        };
        let key = key.trim();
        if key.is_empty() || key.contains(char::is_whitespace) {
            return Err(ConfigFileError::Syntax {
                line,
                message: format!("malformed key `{key}`"),
            });
        }
        if !seen.insert(key.to_string()) {
            return Err(ConfigFileError::DuplicateKey {
                line,
                key: key.to_string(),
            });
        }
        entries.push(Entry {
            line,
            key: key.to_string(),
            value: value.trim().to_string(),
        });
    }
    Ok(entries)
}

fn parse_bool(e: &Entry) -> Result<bool, ConfigFileError> {
    match e.value.as_str() {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(e.bad("expected `true` or `false`")),
    }
}

fn apply_entry(config: &mut SimulationConfig, e: &Entry) -> Result<(), ConfigFileError> {
    let s = &mut config.service;
    match e.key.as_str() {
        "run.horizon" => config.horizon = e.parse()?,
        "run.transfer_time" => config.transfer_time = e.parse()?,
        "run.seed" => config.seed = e.parse()?,
        "run.allow_reshift" => config.allow_reshift = parse_bool(e)?,
        "behaviour.beta_c" => config.behavioural.beta_c = e.parse()?,
        "behaviour.beta_tau" => config.behavioural.beta_tau = e.parse()?,
        "behaviour.shift_convention" => {
            config.shift_convention = ShiftConvention::parse(&e.value)
                .ok_or_else(|| e.bad("expected `complement` or `literal`"))?
        }
        "service.train_interval" => s.train_interval = e.parse()?,
        "service.train_capacity" => s.train_capacity = e.parse()?,
        "service.boarding_rate" => s.boarding_rate = e.parse()?,
        "service.max_dwell" => s.max_dwell = e.parse()?,
        "service.segment_slots" => s.segment_slots = e.parse()?,
        "service.platform_capacity" => s.platform_capacity = e.parse()?,
        "indicators.congestion_weighting" => {
            config.congestion_weighting = CongestionWeighting::parse(&e.value)
                .ok_or_else(|| e.bad("expected `unweighted` or `demand`"))?
        }
        key => {
            let mut parts = key.split('.');
            let (Some("modes"), Some(mode), Some(field), None) =
                (parts.next(), parts.next(), parts.next(), parts.next())
            else {
                return Err(e.unknown());
            };
            let mode: ModeId = mode.parse().map_err(|_| e.unknown())?;
            let spec = &mut config.modes[mode];
            match field {
                "traversal_time" => spec.traversal_time = e.parse()?,
                "queue_capacity" => spec.queue_capacity = e.parse()?,
                "arrival_rate" => spec.arrival_rate = e.parse()?,
                "shift_share" => spec.shift_share = e.parse()?,
                _ => return Err(e.unknown()),
            }
        }
    }
    Ok(())
}

/// Applies a configuration file on top of `base` and validates the result.
pub fn parse_config_over(text: &str, base: SimulationConfig) -> Result<SimulationConfig, ConfigFileError> {
    let mut config = base;
    for e in parse_entries(text)? {
        apply_entry(&mut config, &e)?;
    }
    config.validate()?;
    Ok(config)
}

pub fn parse_config(text: &str) -> Result<SimulationConfig, ConfigFileError> {
    parse_config_over(text, SimulationConfig::default())
}

/// Writes every key, so the output reparses to an equal configuration.
pub fn serialize_config(config: &SimulationConfig) -> String {
    let mut out = String::new();
    let BehaviouralParams { beta_c, beta_tau } = config.behavioural;
    let s = &config.service;
    // Writing to a String cannot fail.
    let mut put = |key: &str, value: &dyn Display| writeln!(out, "{key} = {value}").unwrap();
    put("run.horizon", &config.horizon);
    put("run.transfer_time", &config.transfer_time);
    put("run.seed", &config.seed);
    put("run.allow_reshift", &config.allow_reshift);
    put("behaviour.beta_c", &beta_c);
    put("behaviour.beta_tau", &beta_tau);
    put("behaviour.shift_convention", &config.shift_convention.name());
    put("service.train_interval", &s.train_interval);
    put("service.train_capacity", &s.train_capacity);
    put("service.boarding_rate", &s.boarding_rate);
    put("service.max_dwell", &s.max_dwell);
    put("service.segment_slots", &s.segment_slots);
    put("service.platform_capacity", &s.platform_capacity);
    for mode in ModeId::ALL {
        let m = &config.modes[mode];
        put(&format!("modes.{mode}.traversal_time"), &m.traversal_time);
        put(&format!("modes.{mode}.queue_capacity"), &m.queue_capacity);
        put(&format!("modes.{mode}.arrival_rate"), &m.arrival_rate);
        put(&format!("modes.{mode}.shift_share"), &m.shift_share);
    }
    put("indicators.congestion_weighting", &config.congestion_weighting.name());
    out
}

/// Reads a sweep file; the run configuration comes from `base`.
pub fn parse_sweep(text: &str, base: SimulationConfig) -> Result<SweepSpec, ConfigFileError> {
    let mut spec = SweepSpec {
        base,
        ..SweepSpec::default()
    };
    for e in parse_entries(text)? {
        match e.key.as_str() {
            "sweep.beta_c" => spec.beta_c_values = e.list()?,
            "sweep.beta_tau" => spec.beta_tau_values = e.list()?,
            "sweep.train_capacity" => spec.capacity_values = e.list()?,
            "sweep.train_interval" => spec.interval_values = e.list()?,
            "sweep.replications" => spec.replications = e.parse()?,
            "sweep.master_seed" => spec.master_seed = e.parse()?,
            _ => return Err(e.unknown()),
        }
    }
    spec.validate().map_err(|e| ConfigFileError::Spec(e.to_string()))?;
    Ok(spec)
}

/// Reads an optimisation file; the run configuration comes from `base`.
pub fn parse_opt(text: &str, base: SimulationConfig) -> Result<OptimizeSpec, ConfigFileError> {
    let mut spec = OptimizeSpec {
        base,
        ..OptimizeSpec::default()
    };
    for e in parse_entries(text)? {
        let v = &mut spec.variation;
        match e.key.as_str() {
            "opt.population" => spec.population = e.parse()?,
            "opt.generations" => spec.generations = e.parse()?,
            "opt.replications" => spec.replications = e.parse()?,
            "opt.beta_c_bounds" => spec.beta_c_bounds = e.bound()?,
            "opt.beta_tau_bounds" => spec.beta_tau_bounds = e.bound()?,
            "opt.crossover_probability" => v.crossover_probability = e.parse()?,
            "opt.eta_c" => v.eta_c = e.parse()?,
            "opt.mutation_probability" => v.mutation_probability = e.parse()?,
            "opt.eta_m" => v.eta_m = e.parse()?,
            "opt.master_seed" => spec.master_seed = e.parse()?,
            _ => return Err(e.unknown()),
        }
    }
    spec.validate().map_err(|e| ConfigFileError::Spec(e.to_string()))?;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_file_gives_defaults() {
        let c = parse_config("").unwrap();
        assert_eq!(c, SimulationConfig::default());
        assert_eq!(c.horizon, 240);
        assert_eq!(c.transfer_time, 5);
        assert_eq!(c.modes[ModeId::Rer].arrival_rate, 100.0);
        assert_eq!(c.service.boarding_rate, 1000);
        assert_eq!(c.service.max_dwell, 2);
        assert_eq!(c.service.segment_slots, 4);
    }

    #[test]
    fn congested_scenario_from_two_keys() {
        let c = parse_config("service.train_capacity = 500\nservice.train_interval = 5 # congested\n")
            .unwrap();
        assert_eq!(c, SimulationConfig::congested_scenario());
    }

    #[test]
    fn share_out_of_range_is_rejected() {
        let err = parse_config("modes.metro.shift_share = 1.5").unwrap_err();
        assert!(matches!(err, ConfigFileError::Invalid(_)), "{err}");
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = parse_config("# header\n\nrun.horizon = 10\nrun.colour = red\n").unwrap_err();
        assert!(matches!(err, ConfigFileError::UnknownKey { line: 4, .. }), "{err}");
        assert!(matches!(
            parse_config("run.horizon = ten").unwrap_err(),
            ConfigFileError::BadValue { line: 1, .. }
        ));
        assert!(matches!(
            parse_config("run.horizon 10").unwrap_err(),
            ConfigFileError::Syntax { line: 1, .. }
        ));
        assert!(matches!(
            parse_config("run.seed = 1\nrun.seed = 2").unwrap_err(),
            ConfigFileError::DuplicateKey { line: 2, .. }
        ));
        assert!(matches!(
            parse_config("modes.tram.shift_share = 0.1").unwrap_err(),
            ConfigFileError::UnknownKey { .. }
        ));
        assert!(matches!(
            parse_config("modes.bus.colour = 1").unwrap_err(),
            ConfigFileError::UnknownKey { .. }
        ));
    }

    #[test]
    fn sweep_and_opt_files() {
        let sweep = parse_sweep(
            "sweep.beta_c = -1, 0, 1\nsweep.train_capacity = 500\nsweep.replications = 2\n",
            SimulationConfig::default(),
        )
        .unwrap();
        assert_eq!(sweep.beta_c_values, vec![-1.0, 0.0, 1.0]);
        assert_eq!(sweep.capacity_values, vec![500]);
        assert_eq!(sweep.beta_tau_values.len(), 10);
        assert_eq!(sweep.grid_len(), 3 * 10 * 6);
        assert!(parse_sweep("sweep.beta_tau =", SimulationConfig::default()).is_err());

        let opt = parse_opt(
            "opt.population = 12\nopt.beta_c_bounds = -2, 3\nopt.eta_m = 10",
            SimulationConfig::congested_scenario(),
        )
        .unwrap();
        assert_eq!(opt.population, 12);
        assert_eq!(opt.beta_c_bounds, Bound::new(-2.0, 3.0));
        assert_eq!(opt.variation.eta_m, 10.0);
        assert_eq!(opt.base.service.train_capacity, 500);
        assert!(parse_opt("opt.population = 7", SimulationConfig::default()).is_err());
        assert!(parse_opt("opt.beta_c_bounds = 1", SimulationConfig::default()).is_err());
    }

    fn any_config() -> impl Strategy<Value = SimulationConfig> {
        (
            (-1e3f64..1e3, -1e3f64..1e3, any::<bool>(), any::<bool>(), any::<bool>()),
            (1u32..20, 1u32..5000, 1u32..2000, 1u32..5, 1u32..10, 1u32..5000),
            (1u32..500, 0u32..20, any::<u64>()),
            prop::collection::vec((1u32..100, 0u32..10_000, 0.0f64..200.0), 6),
            prop::sample::select(vec![0.2, 0.3, 0.5]),
        )
            .prop_map(|(b, s, run, modes, metro_share)| {
                let mut c = SimulationConfig::default();
                c.behavioural = BehaviouralParams {
                    beta_c: b.0,
                    beta_tau: b.1,
                };
                if b.2 {
                    c.shift_convention = ShiftConvention::Literal;
                }
                c.allow_reshift = b.3;
                if b.4 {
                    c.congestion_weighting = CongestionWeighting::Demand;
                }
                c.service.train_interval = s.0;
                c.service.train_capacity = s.1;
                c.service.boarding_rate = s.2;
                c.service.max_dwell = s.3;
                c.service.segment_slots = s.4;
                c.service.platform_capacity = s.5;
                c.horizon = run.0;
                c.transfer_time = run.1;
                c.seed = run.2;
                for (mode, (t, q, rate)) in ModeId::ALL.into_iter().zip(modes) {
                    c.modes[mode].traversal_time = t;
                    c.modes[mode].queue_capacity = q;
                    c.modes[mode].arrival_rate = rate;
                }
                // Keep the alternatives summing to 1.
                c.modes[ModeId::Metro].shift_share = metro_share;
                c.modes[ModeId::Walk].shift_share = 0.65 - metro_share;
                c
            })
    }

    proptest! {
        #[test]
        fn serialization_round_trips(config in any_config()) {
            prop_assume!(config.validate().is_ok());
            let text = serialize_config(&config);
            let back = parse_config(&text).unwrap();
            prop_assert_eq!(&back, &config);
            prop_assert_eq!(serialize_config(&back), text);
        }
    }
}
