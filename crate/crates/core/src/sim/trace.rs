use std::io::{self, Write};

use crate::model::{ModeId, ModeTable};

pub const TRACE_CSV_HEADER: &str = "t,platform,rer_onboard,metro,bus,taxi,bike,walk,arrived";

/// Occupancy snapshot taken at the end of a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceRow {
    pub t: u32,
    pub platform: usize,
    pub rer_onboard: usize,
    pub queue: ModeTable<usize>,
    pub pending: ModeTable<usize>,
    pub transferring: usize,
    /// Cumulative completed trips.
    pub arrived: usize,
    /// Users who entered the platform this step.
    pub rer_arrivals: usize,
    pub boarded: usize,
    /// A train was open for boarding this step.
    pub boarding: bool,
}

impl TraceRow {
    /// Users in the mode's queue plus those waiting to enter it.
    pub fn occupancy(&self, mode: ModeId) -> usize {
        self.queue[mode] + self.pending[mode]
    }
}

pub fn write_trace_csv<W: Write>(rows: &[TraceRow], mut out: W) -> io::Result<()> {
    writeln!(out, "{TRACE_CSV_HEADER}")?;
    for r in rows {
        write!(out, "{},{},{}", r.t, r.platform, r.rer_onboard)?;
        for m in ModeId::ALTERNATIVES {
            write!(out, ",{}", r.occupancy(m))?;
        }
        writeln!(out, ",{}", r.arrived)?;
    }
    Ok(())
}
