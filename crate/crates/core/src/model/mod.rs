//! Domain types, discrete-choice maths and random streams.

pub mod choice;
pub mod config;
pub mod mode;
pub mod poisson;
pub mod rng;

pub use choice::{
    choose_alternative, delta_utility, perceived_congestion, perceived_time, shift_probability,
    BehaviouralParams, NestedShares, ShiftConvention,
};
pub use config::{
    default_modes, ConfigError, CongestionWeighting, ModeSpec, ServiceParams, SimulationConfig,
};
pub use mode::{ModeId, ModeTable};
pub use poisson::poisson_draw;
pub use rng::{mix_seed, Rng};
