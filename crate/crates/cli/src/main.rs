use clap::Parser;
use modalshift_cli::{dispatch, Cli};

fn main() -> anyhow::Result<()> {
    dispatch(Cli::parse().command)
}
