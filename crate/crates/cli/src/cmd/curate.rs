use std::path::PathBuf;

use anyhow::Result;
use asrlab::curation::{parse_manifest, run_pipeline, write_manifest, write_outcomes_csv, Verdict};
use serde::Serialize;

use crate::config::RunConfig;
use crate::report::{header, invalid, read_input, write_report};

#[derive(Debug, clap::Args, Serialize)]
pub struct Args {
    /// JSONL manifest to filter.
    #[arg(long)]
    manifest: PathBuf,
}

pub fn run(args: Args, cfg: &RunConfig) -> Result<bool> {
    let text = read_input(&args.manifest)?;
    let lines = parse_manifest(&text);
    let pool = rayon_pool(cfg.jobs())?;
    let out = pool.install(|| run_pipeline(&lines, &cfg.curation)).map_err(invalid)?;
    write_report(&cfg.out_dir, "kept.jsonl", &write_manifest(&out.kept)?)?;
    let csv = header("curate", cfg, &args) + &write_outcomes_csv(&out.outcomes)?;
    write_report(&cfg.out_dir, "rejections.csv", &csv)?;
    let kept = out.outcomes.iter().filter(|o| o.verdict == Verdict::Kept).count();
    println!("records: {}", out.outcomes.len());
    println!("kept: {kept}");
    println!("rejected: {}", out.outcomes.len() - kept);
    println!("clips: {}", out.kept.len());
    Ok(true)
}

pub(crate) fn rayon_pool(jobs: usize) -> Result<rayon::ThreadPool> {
    Ok(rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?)
}
