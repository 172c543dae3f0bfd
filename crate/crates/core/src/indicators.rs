//! Run-level indicators: average travel time and time-averaged congestion.

use std::fmt::Write as _;

use crate::model::{CongestionWeighting, ModeId, ModeTable, SimulationConfig};
use crate::sim::{SimState, TraceRow, Trip};

pub const RUN_CSV_HEADER: &str = "seed,beta_c,beta_tau,train_interval,train_capacity,\
avg_travel_time,rer_congestion,metro_congestion,bus_congestion,taxi_congestion,\
bike_congestion,walk_congestion,avg_congestion_other,completed,uncompleted";

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    /// Mean travel time over completed trips; `None` when nothing completed.
    pub avg_travel_time: Option<f64>,
    /// Time-averaged occupancy over capacity, per mode.
    pub congestion: ModeTable<f64>,
    pub rer_congestion: f64,
    pub avg_congestion_other: f64,
    pub completed: u64,
    pub uncompleted: u64,
    pub total_created: u64,
    pub shifted: u64,
    pub boarded: u64,
}

/// Scalar indicators in output column order.
pub const SCALAR_NAMES: [&str; 11] = [
    "avg_travel_time",
    "rer_congestion",
    "metro_congestion",
    "bus_congestion",
    "taxi_congestion",
    "bike_congestion",
    "walk_congestion",
    "avg_congestion_other",
    "completed",
    "uncompleted",
    "total_created",
];

impl SimResult {
    /// Values matching [`SCALAR_NAMES`]; an undefined travel time is `NaN`.
    pub fn scalars(&self) -> [f64; 11] {
        [
            self.avg_travel_time.unwrap_or(f64::NAN),
            self.rer_congestion,
            self.congestion[ModeId::Metro],
            self.congestion[ModeId::Bus],
            self.congestion[ModeId::Taxi],
            self.congestion[ModeId::Bike],
            self.congestion[ModeId::Walk],
            self.avg_congestion_other,
            self.completed as f64,
            self.uncompleted as f64,
            self.total_created as f64,
        ]
    }
}

pub fn average_travel_time(trips: &[Trip]) -> Option<f64> {
    if trips.is_empty() {
        return None;
    }
    let total: u64 = trips.iter().map(|t| u64::from(t.travel_time())).sum();
    Some(total as f64 / trips.len() as f64)
}

/// Time-averaged congestion per mode.
///
/// Alternatives: (queue + pending) / queue capacity. Main mode: platform
/// occupancy / platform capacity.
pub fn mode_congestion(traces: &[TraceRow], config: &SimulationConfig) -> ModeTable<f64> {
    if traces.is_empty() {
        return ModeTable::default();
    }
    let steps = traces.len() as f64;
    ModeTable::from_fn(|mode| {
        let (occupied, capacity): (usize, u32) = if mode.is_main() {
            (
                traces.iter().map(|r| r.platform).sum(),
                config.service.platform_capacity,
            )
        } else {
            (
                traces.iter().map(|r| r.occupancy(mode)).sum(),
                config.modes[mode].queue_capacity,
            )
        };
        occupied as f64 / f64::from(capacity) / steps
    })
}

fn average_other(
    congestion: &ModeTable<f64>,
    weighting: CongestionWeighting,
    entered: &ModeTable<u64>,
) -> f64 {
    let unweighted = || {
        congestion.alternatives().map(|(_, c)| c).sum::<f64>() / ModeId::ALTERNATIVES.len() as f64
    };
    match weighting {
        CongestionWeighting::Unweighted => unweighted(),
        CongestionWeighting::Demand => {
            let total: u64 = entered.alternatives().map(|(_, n)| n).sum();
            if total == 0 {
                return unweighted();
            }
            congestion
                .alternatives()
                .map(|(m, c)| c * entered[m] as f64)
                .sum::<f64>()
                / total as f64
        }
    }
}

pub fn summarize(state: &SimState) -> SimResult {
    let config = state.config();
    let congestion = mode_congestion(&state.traces, config);
    let completed = state.arrived.len() as u64;
    let created = state.counters.created;
    SimResult {
        avg_travel_time: average_travel_time(&state.arrived),
        rer_congestion: congestion[ModeId::Rer],
        avg_congestion_other: average_other(
            &congestion,
            config.congestion_weighting,
            &state.counters.entered,
        ),
        congestion,
        completed,
        uncompleted: created - completed,
        total_created: created,
        shifted: state.counters.shifted,
        boarded: state.counters.boarded,
    }
}

/// One CSV row (no trailing newline) matching [`RUN_CSV_HEADER`].
pub fn run_csv_row(config: &SimulationConfig, result: &SimResult) -> String {
    let mut row = format!(
        "{},{},{},{},{}",
        config.seed,
        config.behavioural.beta_c,
        config.behavioural.beta_tau,
        config.service.train_interval,
        config.service.train_capacity,
    );
    match result.avg_travel_time {
        Some(t) => write!(row, ",{t}").unwrap(),
        None => row.push_str(",NaN"),
    }
    write!(row, ",{}", result.rer_congestion).unwrap();
    for m in ModeId::ALTERNATIVES {
        write!(row, ",{}", result.congestion[m]).unwrap();
    }
    write!(
        row,
        ",{},{},{}",
        result.avg_congestion_other, result.completed, result.uncompleted
    )
    .unwrap();
    row
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::User;

    fn trip(entry: u32, arrive: u32) -> Trip {
        Trip {
            user: User {
                id: 0,
                entry_time: entry,
                origin: ModeId::Rer,
                current_mode: ModeId::Rer,
                shifted: false,
            },
            arrival_time: arrive,
        }
    }

    fn row(t: u32, platform: usize, metro: usize, metro_pending: usize) -> TraceRow {
        let mut queue = ModeTable::default();
        queue[ModeId::Metro] = metro;
        let mut pending = ModeTable::default();
        pending[ModeId::Metro] = metro_pending;
        TraceRow {
            t,
            platform,
            rer_onboard: 0,
            queue,
            pending,
            transferring: 0,
            arrived: 0,
            rer_arrivals: 0,
            boarded: 0,
            boarding: false,
        }
    }

    #[test]
    fn travel_time_mean() {
        assert_eq!(average_travel_time(&[trip(0, 10), trip(5, 25)]), Some(15.0));
        assert_eq!(average_travel_time(&[]), None);
    }

    #[test]
    fn zero_traces_give_zero_congestion() {
        let config = SimulationConfig::default();
        let traces: Vec<_> = (0..10).map(|t| row(t, 0, 0, 0)).collect();
        let c = mode_congestion(&traces, &config);
        assert!(c.iter().all(|(_, &v)| v == 0.0));
    }

    #[test]
    fn constant_half_occupancy() {
        let config = SimulationConfig::default();
        let traces: Vec<_> = (0..240).map(|t| row(t, 0, 1750, 0)).collect();
        assert_eq!(mode_congestion(&traces, &config)[ModeId::Metro], 0.5);
    }

    #[test]
    fn pending_counts_toward_congestion() {
        let config = SimulationConfig::default();
        let traces = [row(0, 0, 0, 0), row(1, 0, 3500, 0), row(2, 0, 3500, 3500)];
        let c = mode_congestion(&traces, &config);
        assert!((c[ModeId::Metro] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn congestion_is_order_free() {
        let config = SimulationConfig::default();
        let traces = [row(0, 100, 7, 1), row(1, 3000, 0, 0), row(2, 40, 600, 90)];
        let mut shuffled = traces;
        shuffled.swap(0, 2);
        let a = mode_congestion(&traces, &config);
        let b = mode_congestion(&shuffled, &config);
        assert_eq!(a, b);
    }

    #[test]
    fn demand_weighting_uses_entered_counts() {
        let mut congestion = ModeTable::default();
        congestion[ModeId::Metro] = 1.0;
        congestion[ModeId::Bus] = 0.0;
        let mut entered = ModeTable::default();
        entered[ModeId::Metro] = 3;
        entered[ModeId::Bus] = 1;
        assert_eq!(
            average_other(&congestion, CongestionWeighting::Demand, &entered),
            0.75
        );
        assert_eq!(
            average_other(&congestion, CongestionWeighting::Unweighted, &entered),
            0.2
        );
        let none = ModeTable::default();
        assert_eq!(
            average_other(&congestion, CongestionWeighting::Demand, &none),
            0.2
        );
    }

    #[test]
    fn header_has_fifteen_columns() {
        assert_eq!(RUN_CSV_HEADER.split(',').count(), 15);
    }
}
