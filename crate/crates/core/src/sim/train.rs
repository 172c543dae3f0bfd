use super::User;

#[derive(Debug, Clone)]
pub struct Train {
    pub id: u64,
    pub onboard: Vec<User>,
    /// Minutes spent boarding at the station.
    pub dwell_elapsed: u32,
    /// Doors closed; waiting for the first segment slot to free up.
    pub departing: bool,
}

impl Train {
    fn new(id: u64) -> Self {
        Train {
            id,
            onboard: Vec::new(),
            dwell_elapsed: 0,
            departing: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrainPosition {
    AtStation { dwell_elapsed: u32 },
    Segment { slot: u32 },
    Terminus,
}

/// The station, the single-track segment and the terminus.
///
/// Exclusion is structural: each location holds at most one train.
#[derive(Debug, Clone)]
pub struct TrainLine {
    pub(crate) station: Option<Train>,
    pub(crate) segment: Vec<Option<Train>>,
    pub(crate) terminus: Option<Train>,
    /// Trains whose scheduled entry was delayed by an occupied station.
    pub(crate) backlog: u32,
    next_id: u64,
}

impl TrainLine {
    pub fn new(segment_slots: u32) -> Self {
        TrainLine {
            station: None,
            segment: (0..segment_slots).map(|_| None).collect(),
            terminus: None,
            backlog: 0,
            next_id: 0,
        }
    }

    /// Queues one scheduled train and lets the oldest waiting one enter a free station.
    pub(crate) fn schedule_and_enter(&mut self, scheduled: bool) {
        if scheduled {
            self.backlog += 1;
        }
        if self.station.is_none() && self.backlog > 0 {
            self.station = Some(Train::new(self.next_id));
            self.next_id += 1;
            self.backlog -= 1;
        }
    }

    /// Moves trains one slot towards the terminus where the next slot is free.
    ///
    /// The terminus train, emptied earlier in the step, leaves the line first.
    pub(crate) fn advance(&mut self) {
        debug_assert!(self.terminus.as_ref().is_none_or(|t| t.onboard.is_empty()));
        self.terminus = None;
        let last = self.segment.len() - 1;
        if let Some(train) = self.segment[last].take() {
            self.terminus = Some(train);
        }
        for slot in (0..last).rev() {
            if self.segment[slot + 1].is_none() {
                self.segment[slot + 1] = self.segment[slot].take();
            }
        }
        if self.station.as_ref().is_some_and(|t| t.departing) && self.segment[0].is_none() {
            self.segment[0] = self.station.take();
        }
    }

    pub fn trains(&self) -> impl Iterator<Item = (TrainPosition, &Train)> {
        let station = self.station.iter().map(|t| {
            (
                TrainPosition::AtStation {
                    dwell_elapsed: t.dwell_elapsed,
                },
                t,
            )
        });
        let segment = self.segment.iter().enumerate().filter_map(|(slot, t)| {
            t.as_ref().map(|t| {
                (
                    TrainPosition::Segment {
                        slot: slot as u32,
                    },
                    t,
                )
            })
        });
        let terminus = self.terminus.iter().map(|t| (TrainPosition::Terminus, t));
        station.chain(segment).chain(terminus)
    }

    pub fn onboard(&self) -> usize {
        self.trains().map(|(_, t)| t.onboard.len()).sum()
    }

    pub fn station(&self) -> Option<&Train> {
        self.station.as_ref()
    }

    pub fn backlog(&self) -> u32 {
        self.backlog
    }
}
