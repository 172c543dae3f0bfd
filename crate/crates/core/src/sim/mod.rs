//! One simulation run: a sequence of one-minute steps over the segment.
//!
//! Each step applies, in order: arrivals, platform choices, the station
//! (train entry, boarding, alighting at the terminus), train movement along
//! the segment, and the alternative-mode queues.

mod trace;
mod train;

use std::collections::VecDeque;

use crate::indicators::{summarize, SimResult};
use crate::model::{
    choose_alternative, delta_utility, perceived_congestion, perceived_time, poisson_draw,
    ConfigError, ModeId, ModeTable, NestedShares, Rng, SimulationConfig,
};

pub use trace::{write_trace_csv, TraceRow, TRACE_CSV_HEADER};
pub use train::{Train, TrainLine, TrainPosition};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct User {
    pub id: u64,
    pub entry_time: u32,
    /// Mode the user entered the network on.
    pub origin: ModeId,
    pub current_mode: ModeId,
    pub shifted: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UserState {
    WaitingPlatform,
    Transferring { remaining: u32, target: ModeId },
    PendingQueue { target: ModeId },
    InQueue { remaining: u32 },
    InTrain { train_id: u64 },
    Arrived { arrival_time: u32 },
}

/// A completed trip.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Trip {
    pub user: User,
    pub arrival_time: u32,
}

impl Trip {
    pub fn travel_time(&self) -> u32 {
        self.arrival_time - self.user.entry_time
    }
}

#[derive(Debug, Clone, Copy)]
struct Transfer {
    user: User,
    target: ModeId,
    /// Step at which the user joins the target mode's pending line.
    due: u32,
}

#[derive(Debug, Clone, Copy)]
struct Queued {
    user: User,
    /// Step at which the user leaves the queue at the end of the segment.
    due: u32,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counters {
    pub created: u64,
    pub shifted: u64,
    pub reshifted: u64,
    pub boarded: u64,
    pub alighted: u64,
    /// Users who joined each mode: arrivals, plus shifted users for alternatives.
    pub entered: ModeTable<u64>,
}

/// Number of users in each location.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Census {
    pub platform: usize,
    pub transferring: usize,
    pub pending: usize,
    pub queued: usize,
    pub onboard: usize,
    pub arrived: usize,
}

impl Census {
    pub fn total(&self) -> usize {
        self.platform + self.transferring + self.pending + self.queued + self.onboard + self.arrived
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Arrivals,
    Choices,
    Station,
    Segment,
    Queues,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub clock: u32,
    pub phase: Phase,
    pub message: String,
}

/// Invariant checks recorded after every phase when auditing is on.
#[derive(Debug, Clone, Default)]
pub struct Audit {
    pub checks: u64,
    pub violations: Vec<Violation>,
}

#[derive(Debug, Clone)]
struct Streams {
    choices: Rng,
    arrivals: ModeTable<Rng>,
}

impl Streams {
    fn new(seed: u64) -> Self {
        Streams {
            choices: Rng::child(seed, 0),
            arrivals: ModeTable::from_fn(|m| Rng::child(seed, 1 + m.index() as u64)),
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct StepTally {
    rer_arrivals: usize,
    boarded: usize,
    boarding: bool,
}

#[derive(Debug, Clone)]
pub struct SimState {
    config: SimulationConfig,
    shares: NestedShares,
    pub clock: u32,
    pub platform: VecDeque<User>,
    transferring: VecDeque<Transfer>,
    pending: ModeTable<VecDeque<User>>,
    queues: ModeTable<VecDeque<Queued>>,
    pub line: TrainLine,
    pub arrived: Vec<Trip>,
    pub traces: Vec<TraceRow>,
    pub counters: Counters,
    audit: Option<Audit>,
    streams: Streams,
    tally: StepTally,
    next_user: u64,
}

/// Validates `config` and builds the initial state. Randomness is seeded from `seed`.
pub fn init_state(config: &SimulationConfig, seed: u64) -> Result<SimState, ConfigError> {
    config.validate()?;
    let shares = config.nested_shares()?;
    Ok(SimState {
        config: config.clone(),
        shares,
        clock: 0,
        platform: VecDeque::new(),
        transferring: VecDeque::new(),
        pending: ModeTable::default(),
        queues: ModeTable::default(),
        line: TrainLine::new(config.service.segment_slots),
        arrived: Vec::new(),
        traces: Vec::with_capacity(config.horizon as usize),
        counters: Counters::default(),
        audit: None,
        streams: Streams::new(seed),
        tally: StepTally::default(),
        next_user: 0,
    })
}

/// Runs `config` with its own seed to the horizon.
pub fn run(config: &SimulationConfig) -> Result<(SimResult, SimState), ConfigError> {
    run_with(config, false)
}

/// As [`run`], checking conservation and capacity invariants after every phase.
pub fn run_audited(config: &SimulationConfig) -> Result<(SimResult, SimState), ConfigError> {
    run_with(config, true)
}

fn run_with(config: &SimulationConfig, audit: bool) -> Result<(SimResult, SimState), ConfigError> {
    let mut state = init_state(config, config.seed)?;
    if audit {
        state.enable_audit();
    }
    while !state.finished() {
        state.step();
    }
    Ok((summarize(&state), state))
}

impl SimState {
    pub fn config(&self) -> &SimulationConfig {
        &self.config
    }

    pub fn enable_audit(&mut self) {
        self.audit = Some(Audit::default());
    }

    pub fn audit(&self) -> Option<&Audit> {
        self.audit.as_ref()
    }

    pub fn finished(&self) -> bool {
        self.clock >= self.config.horizon
    }

    pub fn census(&self) -> Census {
        Census {
            platform: self.platform.len(),
            transferring: self.transferring.len(),
            pending: self.pending.iter().map(|(_, q)| q.len()).sum(),
            queued: self.queues.iter().map(|(_, q)| q.len()).sum(),
            onboard: self.line.onboard(),
            arrived: self.arrived.len(),
        }
    }

    pub fn queue_len(&self, mode: ModeId) -> usize {
        self.queues[mode].len()
    }

    pub fn pending_len(&self, mode: ModeId) -> usize {
        self.pending[mode].len()
    }

    /// Every user not yet arrived together with their current state.
    pub fn active_users(&self) -> impl Iterator<Item = (User, UserState)> + '_ {
        let clock = self.clock;
        let platform = self.platform.iter().map(|u| (*u, UserState::WaitingPlatform));
        let transferring = self.transferring.iter().map(move |t| {
            (
                t.user,
                UserState::Transferring {
                    remaining: t.due.saturating_sub(clock),
                    target: t.target,
                },
            )
        });
        let pending = self.pending.iter().flat_map(|(m, q)| {
            q.iter().map(move |u| (*u, UserState::PendingQueue { target: m }))
        });
        let queued = self.queues.iter().flat_map(move |(_, q)| {
            q.iter().map(move |e| {
                (
                    e.user,
                    UserState::InQueue {
                        remaining: e.due.saturating_sub(clock),
                    },
                )
            })
        });
        let onboard = self.line.trains().flat_map(|(_, t)| {
            t.onboard
                .iter()
                .map(move |u| (*u, UserState::InTrain { train_id: t.id }))
        });
        platform
            .chain(transferring)
            .chain(pending)
            .chain(queued)
            .chain(onboard)
    }

    /// Advances the clock by one minute.
    pub fn step(&mut self) {
        assert!(!self.finished(), "step called past the horizon");
        self.tally = StepTally::default();
        self.spawn_arrivals();
        self.check(Phase::Arrivals);
        self.evaluate_choices();
        self.check(Phase::Choices);
        self.train_phase();
        self.check(Phase::Station);
        self.advance_trains();
        self.check(Phase::Segment);
        self.advance_mode_queues();
        self.check(Phase::Queues);
        self.check_end_of_step();
        self.record_trace();
        self.clock += 1;
    }

    fn new_user(&mut self, mode: ModeId) -> User {
        let user = User {
            id: self.next_user,
            entry_time: self.clock,
            origin: mode,
            current_mode: mode,
            shifted: false,
        };
        self.next_user += 1;
        user
    }

    /// Poisson arrivals on every mode, drawn in [`ModeId::ALL`] order.
    ///
    /// Each mode draws from its own stream, so demand on one mode never
    /// perturbs arrivals on another.
    pub fn spawn_arrivals(&mut self) {
        for mode in ModeId::ALL {
            let lambda = self.config.modes[mode].arrival_rate;
            let n = poisson_draw(lambda, &mut self.streams.arrivals[mode]);
            for _ in 0..n {
                let user = self.new_user(mode);
                if mode.is_main() {
                    self.platform.push_back(user);
                } else {
                    self.pending[mode].push_back(user);
                }
            }
            self.counters.created += n;
            self.counters.entered[mode] += n;
            if mode.is_main() {
                self.tally.rer_arrivals = n as usize;
            }
        }
    }

    /// Minutes until a train can be boarded at the station, capped at the interval.
    pub fn wait_to_next_train(&self) -> u32 {
        let interval = self.config.service.train_interval;
        let phase = self.clock % interval;
        let train_available = self.line.backlog > 0 || phase == 0;
        let until_scheduled = if phase == 0 { 0 } else { interval - phase };
        let wait = match self.line.station() {
            Some(t) if !t.departing => 0,
            Some(_) if train_available => 1,
            Some(_) => until_scheduled.max(1),
            None if train_available => 0,
            None => until_scheduled,
        };
        wait.min(interval)
    }

    /// Every waiting user decides whether to leave the platform.
    ///
    /// Perceived congestion is a snapshot taken at the start of the phase.
    pub fn evaluate_choices(&mut self) {
        let waiting = self.platform.len();
        if waiting == 0 {
            return;
        }
        let params = self.config.behavioural;
        let convention = self.config.shift_convention;
        let congestion = perceived_congestion(waiting, self.config.service.platform_capacity);
        let wait = self.wait_to_next_train();
        let due = self.clock + self.config.transfer_time;

        let mut staying = VecDeque::with_capacity(waiting);
        for mut user in std::mem::take(&mut self.platform) {
            let tau = perceived_time(self.clock - user.entry_time, wait);
            let p = convention.shift_probability(delta_utility(params, congestion, tau));
            if self.streams.choices.uniform() < p {
                let target = choose_alternative(&self.shares, &mut self.streams.choices);
                user.current_mode = target;
                user.shifted = true;
                self.transferring.push_back(Transfer { user, target, due });
                self.counters.shifted += 1;
            } else {
                staying.push_back(user);
            }
        }
        self.platform = staying;
    }

    /// Train entry, boarding at the station and alighting at the terminus.
    pub fn train_phase(&mut self) {
        let service = self.config.service;
        self.line
            .schedule_and_enter(self.clock.is_multiple_of(service.train_interval));

        if let Some(train) = self.line.station.as_mut().filter(|t| !t.departing) {
            let room = service.train_capacity as usize - train.onboard.len();
            let n = (service.boarding_rate as usize)
                .min(room)
                .min(self.platform.len());
            train.onboard.extend(self.platform.drain(..n));
            train.dwell_elapsed += 1;
            if train.onboard.len() == service.train_capacity as usize
                || train.dwell_elapsed >= service.max_dwell
            {
                train.departing = true;
            }
            self.tally.boarding = true;
            self.tally.boarded = n;
            self.counters.boarded += n as u64;
        }

        if let Some(train) = self.line.terminus.as_mut() {
            let clock = self.clock;
            let n = train.onboard.len();
            self.arrived.extend(train.onboard.drain(..).map(|user| Trip {
                user,
                arrival_time: clock,
            }));
            self.counters.alighted += n as u64;
        }
    }

    pub fn advance_trains(&mut self) {
        self.line.advance();
    }

    /// Transfers land, queues release arrived users, pending users are admitted.
    pub fn advance_mode_queues(&mut self) {
        let clock = self.clock;
        while self.transferring.front().is_some_and(|t| t.due <= clock) {
            let t = self.transferring.pop_front().unwrap();
            self.pending[t.target].push_back(t.user);
            self.counters.entered[t.target] += 1;
        }

        for mode in ModeId::ALTERNATIVES {
            let spec = self.config.modes[mode];
            let queue = &mut self.queues[mode];
            while queue.front().is_some_and(|e| e.due <= clock) {
                let e = queue.pop_front().unwrap();
                self.arrived.push(Trip {
                    user: e.user,
                    arrival_time: clock,
                });
            }
            let pending = &mut self.pending[mode];
            while queue.len() < spec.queue_capacity as usize {
                let Some(user) = pending.pop_front() else {
                    break;
                };
                queue.push_back(Queued {
                    user,
                    due: clock + spec.traversal_time,
                });
            }
        }

        if self.config.allow_reshift {
            self.reshift_pending();
        }
    }

    /// Shifted users stuck behind a full queue may pick another alternative.
    fn reshift_pending(&mut self) {
        let params = self.config.behavioural;
        let convention = self.config.shift_convention;
        let due = self.clock + self.config.transfer_time;
        for mode in ModeId::ALTERNATIVES {
            if self.pending[mode].is_empty() || !self.shares.has_alternative_to(mode) {
                continue;
            }
            let spec = self.config.modes[mode];
            let occupancy = self.queues[mode].len() + self.pending[mode].len();
            let congestion = occupancy as f64 / spec.queue_capacity as f64;
            let mut staying = VecDeque::with_capacity(self.pending[mode].len());
            for mut user in std::mem::take(&mut self.pending[mode]) {
                if !user.shifted {
                    staying.push_back(user);
                    continue;
                }
                let tau = perceived_time(self.clock - user.entry_time, 0);
                let p = convention.shift_probability(delta_utility(params, congestion, tau));
                if self.streams.choices.uniform() < p {
                    let target = self.shares.pick(self.streams.choices.uniform(), Some(mode));
                    user.current_mode = target;
                    self.transferring.push_back(Transfer { user, target, due });
                    self.counters.reshifted += 1;
                } else {
                    staying.push_back(user);
                }
            }
            self.pending[mode] = staying;
        }
    }

    fn check(&mut self, phase: Phase) {
        if self.audit.is_none() {
            return;
        }
        let census = self.census();
        let created = self.counters.created as usize;
        let clock = self.clock;
        let audit = self.audit.as_mut().unwrap();
        audit.checks += 1;
        if census.total() != created {
            audit.violations.push(Violation {
                clock,
                phase,
                message: format!(
                    "conservation: created {created} but located {} ({census:?})",
                    census.total()
                ),
            });
        }
    }

    fn check_end_of_step(&mut self) {
        if self.audit.is_none() {
            return;
        }
        let mut messages = Vec::new();
        for mode in ModeId::ALTERNATIVES {
            let cap = self.config.modes[mode].queue_capacity as usize;
            if self.queues[mode].len() > cap {
                messages.push(format!("{mode} queue holds {} > {cap}", self.queues[mode].len()));
            }
        }
        let capacity = self.config.service.train_capacity as usize;
        for (_, t) in self.line.trains() {
            if t.onboard.len() > capacity {
                messages.push(format!("train {} carries {} > {capacity}", t.id, t.onboard.len()));
            }
        }
        if self.tally.boarded > self.config.service.boarding_rate as usize {
            messages.push(format!("{} boarded in one minute", self.tally.boarded));
        }
        let clock = self.clock;
        let audit = self.audit.as_mut().unwrap();
        audit.violations.extend(messages.into_iter().map(|message| Violation {
            clock,
            phase: Phase::Queues,
            message,
        }));
    }

    fn record_trace(&mut self) {
        let row = TraceRow {
            t: self.clock,
            platform: self.platform.len(),
            rer_onboard: self.line.onboard(),
            queue: self.queues.map(|_, q| q.len()),
            pending: self.pending.map(|_, q| q.len()),
            transferring: self.transferring.len(),
            arrived: self.arrived.len(),
            rer_arrivals: self.tally.rer_arrivals,
            boarded: self.tally.boarded,
            boarding: self.tally.boarding,
        };
        self.traces.push(row);
    }
}
