//! Agent-based simulation of modal shift on a disrupted train segment.
//!
//! Users arrive on a suburban train platform and on five alternative modes.
//! Every minute, waiting users weigh perceived congestion and perceived time
//! against shifting to another mode through a logit choice. Trains enter the
//! station at a fixed interval, board up to a capacity, and traverse a
//! single-track segment; alternative modes are capacity-limited queues.
//!
//! On top of single runs the crate provides a replicated parameter grid
//! ([`sweep`]) and an NSGA-II search over the behavioural coefficients
//! ([`optimizer`]). All randomness is seeded and results do not depend on the
//! number of worker threads.

pub mod indicators;
pub mod model;
pub mod optimizer;
pub mod output;
pub mod sim;
pub mod sweep;

pub use indicators::SimResult;
pub use model::{ModeId, SimulationConfig};
