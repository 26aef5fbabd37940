use std::path::PathBuf;

use anyhow::Result;
use asrlab::noiselab::{run_sweep, CommandTranscriber, NoiseKind, SweepItem, SweepSpec};
use asrlab::seed::substream_seed;
use serde::Serialize;

use super::load_manifest;
use crate::config::RunConfig;
use crate::report::{header, invalid, write_report};

#[derive(Debug, clap::Args, Serialize)]
pub struct Args {
    /// JSONL manifest; audio paths are relative to its directory.
    #[arg(long)]
    manifest: PathBuf,
    /// Program called as `<program> <wav>` that prints a transcript.
    #[arg(long)]
    transcriber: Option<PathBuf>,
    /// Comma-separated SNRs in dB, e.g. `-5,0,5,10,20` or `inf`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    snr: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    noise: Option<Kind>,
    /// Directory of ambient noise WAVs.
    #[arg(long)]
    noise_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Kind {
    Gaussian,
    Ambient,
}

pub fn run(args: Args, cfg: &RunConfig) -> Result<bool> {
    let program = args
        .transcriber
        .clone()
        .or_else(|| cfg.sweep.transcriber.clone())
        .ok_or_else(|| invalid("noise-sweep: no transcriber given"))?;
    let spec = SweepSpec {
        snr_list_db: args.snr.clone().unwrap_or_else(|| cfg.sweep.snr_list_db.clone()),
        noise_kind: match args.noise {
            Some(Kind::Gaussian) => NoiseKind::Gaussian,
            Some(Kind::Ambient) => NoiseKind::Ambient,
            None => cfg.sweep.noise_kind,
        },
        noise_corpus_dir: args.noise_dir.clone().or_else(|| cfg.sweep.noise_corpus_dir.clone()),
        seed: substream_seed(cfg.seed, "noise-sweep"),
    };
    spec.validate().map_err(invalid)?;
    let manifest = load_manifest(&args.manifest)?;
    if manifest.is_empty() {
        return Err(invalid("noise-sweep: manifest is empty"));
    }
    let base = args.manifest.parent().map(PathBuf::from).unwrap_or_default();
    let items: Vec<SweepItem> = manifest
        .into_iter()
        .map(|r| SweepItem {
            audio_path: base.join(&r.audio_path),
            file_id: r.id,
            reference: r.transcript,
            length_sec: r.duration_sec,
        })
        .collect();
    let rules = cfg.rule_set()?;
    let transcriber = CommandTranscriber::new(program);
    let work = cfg.out_dir.join("work");
    let report = run_sweep(&items, &spec, &transcriber, &rules, &work, cfg.jobs()).map_err(invalid)?;
    let _ = std::fs::remove_dir(&work);

    let h = header("noise-sweep", cfg, &args);
    write_report(&cfg.out_dir, "sweep.csv", &(h.clone() + &report.rows_csv()))?;
    write_report(&cfg.out_dir, "sweep_summary.csv", &(h.clone() + &report.summary_csv()))?;
    write_report(&cfg.out_dir, "mixes.csv", &(h + &report.mixes_csv()))?;
    print!("{}", report.summary_csv());
    Ok(true)
}
