//! Command-line front end: configuration files, CSV output and plots.

pub mod config;
pub mod plot;

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use modalshift::indicators::{run_csv_row, RUN_CSV_HEADER};
use modalshift::model::SimulationConfig;
use modalshift::optimizer::{optimize, write_front_csv, write_log_csv};
use modalshift::output::write_atomic;
use modalshift::sim::{self, write_trace_csv};
use modalshift::sweep::{run_sweep, write_sweep_csv};

use plot::PlotKind;

#[derive(Debug, Parser)]
#[command(name = "modalshift", version, about = "Modal shift simulator on a disrupted rail segment")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate one run and write its indicator row.
    Run {
        /// Run configuration; defaults apply when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Overrides `run.seed`.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
        /// Also write the per-minute occupancy trace here.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Replicated grid over (beta_c, beta_tau, train capacity, train interval).
    Sweep {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Sweep file; the default grid when omitted.
        #[arg(long)]
        sweep: Option<PathBuf>,
        #[command(flatten)]
        workers: Workers,
        #[arg(long)]
        out: PathBuf,
    },
    /// NSGA-II search for the congestion trade-off over (beta_c, beta_tau).
    Optimize {
        /// Applied on top of the congested scenario (C = 500, I = 5).
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        opt: Option<PathBuf>,
        #[command(flatten)]
        workers: Workers,
        /// Front CSV.
        #[arg(long)]
        out: PathBuf,
        /// Per-generation convergence log.
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Render a sweep or front CSV as SVG.
    Plot {
        input: PathBuf,
        /// Guessed from the CSV header when omitted.
        #[arg(long, value_enum)]
        kind: Option<PlotKind>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct Workers {
    /// Worker threads; all available cores when neither this nor the
    /// environment variable is set.
    #[arg(long, env = "MODALSHIFT_THREADS", value_parser = clap::value_parser!(u64).range(1..))]
    parallelism: Option<u64>,
}

impl Workers {
    fn get(&self) -> usize {
        self.parallelism.map_or_else(
            || std::thread::available_parallelism().map_or(1, |n| n.get()),
            |n| n as usize,
        )
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_config(path: Option<&Path>, base: SimulationConfig) -> Result<SimulationConfig> {
    match path {
        Some(p) => config::parse_config_over(&read(p)?, base)
            .with_context(|| format!("in {}", p.display())),
        None => Ok(base),
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    write_atomic(path, |w| w.write_all(text.as_bytes()))
        .with_context(|| format!("writing {}", path.display()))
}

pub fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Run {
            config,
            seed,
            out,
            trace,
        } => {
            let mut config = load_config(config.as_deref(), SimulationConfig::default())?;
            if let Some(seed) = seed {
                config.seed = seed;
            }
            let (result, state) = sim::run(&config)?;
            if let Some(path) = trace {
                write_atomic(&path, |w| write_trace_csv(&state.traces, w))
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            write_text(
                &out,
                &format!("{RUN_CSV_HEADER}\n{}\n", run_csv_row(&config, &result)),
            )
        }
        Command::Sweep {
            config,
            sweep,
            workers,
            out,
        } => {
            let base = load_config(config.as_deref(), SimulationConfig::default())?;
            let text = sweep.as_deref().map(read).transpose()?.unwrap_or_default();
            let spec = config::parse_sweep(&text, base)?;
            let rows = run_sweep(&spec, workers.get())?;
            write_sweep_csv(&rows, &out)?;
            Ok(())
        }
        Command::Optimize {
            config,
            opt,
            workers,
            out,
            log,
        } => {
            let base = load_config(config.as_deref(), SimulationConfig::congested_scenario())?;
            let text = opt.as_deref().map(read).transpose()?.unwrap_or_default();
            let spec = config::parse_opt(&text, base)?;
            let result = optimize(&spec, workers.get())?;
            if let Some(path) = log {
                write_log_csv(&result.log, &path)?;
            }
            write_front_csv(&result.front, &out)?;
            Ok(())
        }
        Command::Plot { input, kind, out } => {
            let svg = plot::render(&read(&input)?, kind)
                .with_context(|| format!("plotting {}", input.display()))?;
            write_text(&out, &svg)
        }
    }
}
