use anyhow::Result;
use asrlab::planner::{optimal_hours, parse_ratio, ScalingAssumptions};
use serde::Serialize;

use crate::config::RunConfig;
use crate::report::invalid;

#[derive(Debug, clap::Args, Serialize)]
pub struct Args {
    /// Model parameter count.
    #[arg(long)]
    params: u64,
    /// Words per minute of speech.
    #[arg(long)]
    wpm: Option<f64>,
    /// Tokens per word, as a decimal or a ratio such as `4/3`.
    #[arg(long)]
    tpw: Option<String>,
    /// Training tokens per parameter.
    #[arg(long)]
    tpp: Option<f64>,
}

pub fn run(args: Args, cfg: &RunConfig) -> Result<bool> {
    let a = ScalingAssumptions {
        wpm: args.wpm.unwrap_or(cfg.planner.wpm),
        tpw: match &args.tpw {
            Some(s) => parse_ratio(s).map_err(invalid)?,
            None => cfg.planner.tpw,
        },
        tpp: args.tpp.unwrap_or(cfg.planner.tpp),
    };
    let plan = optimal_hours(args.params, &a).map_err(invalid)?;
    println!("params: {}", plan.params);
    println!("wpm: {}", a.wpm);
    println!("tpw: {}", a.tpw);
    println!("tpp: {}", a.tpp);
    println!("hours: {:.6}", plan.hours);
    println!("rounded_hours: {}", plan.rounded_hours);
    Ok(true)
}
