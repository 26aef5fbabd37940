//! `asrlab` command-line driver.

mod cmd;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};

use config::RunConfig;
use report::Invalid;

#[derive(Debug, Parser)]
#[command(name = "asrlab", version, about = "Speech recognition evaluation and data tooling")]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed; overrides the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: available cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Directory reports are written to.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Normalization rule file.
    #[arg(long, global = true)]
    rules: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Score hypotheses against references: WER and proper-noun scores.
    Evaluate(cmd::evaluate::Args),
    /// Proper-noun scores from gold and predicted entity files.
    PpnScore(cmd::ppn::Args),
    /// Filter and segment a training manifest.
    Curate(cmd::curate::Args),
    /// Measure WER at a list of signal-to-noise ratios.
    NoiseSweep(cmd::sweep::Args),
    /// Transcribe long audio in overlapping chunks and join the pieces.
    Stitch(cmd::stitch::Args),
    /// Check the transducer loss, gradients, decoder and stream masks.
    RnntCheck(cmd::rnnt::Args),
    /// Hours of speech for a model size.
    PlanData(cmd::plan::Args),
}

fn run(cli: Cli) -> Result<bool> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(j) = cli.jobs {
        cfg.jobs = Some(j);
    }
    if let Some(d) = cli.out_dir {
        cfg.out_dir = d;
    }
    if let Some(r) = cli.rules {
        cfg.rules = Some(r);
    }
    cfg.validate()?;
    match cli.command {
        Command::Evaluate(a) => cmd::evaluate::run(a, &cfg),
        Command::PpnScore(a) => cmd::ppn::run(a, &cfg),
        Command::Curate(a) => cmd::curate::run(a, &cfg),
        Command::NoiseSweep(a) => cmd::sweep::run(a, &cfg),
        Command::Stitch(a) => cmd::stitch::run(a, &cfg),
        Command::RnntCheck(a) => cmd::rnnt::run(a, &cfg),
        Command::PlanData(a) => cmd::plan::run(a, &cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<Invalid>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
