use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use asrlab::noiselab::{AudioBuffer, CommandTranscriber, Transcribe};
use asrlab::stitch::{energy_vad, plan_chunks, stitch, strip_silence, Junction, PartialTranscript};
use asrlab::textnorm::{normalize, tokenize_words, NormRuleSet};
use serde::Serialize;

use crate::config::RunConfig;
use crate::report::{header, invalid, read_input, write_report};

#[derive(Debug, clap::Args, Serialize)]
#[command(group(clap::ArgGroup::new("input").required(true).args(["partials", "audio"])))]
pub struct Args {
    /// Directory of chunk transcripts named `<index>.txt`.
    #[arg(long)]
    partials: Option<PathBuf>,
    /// Long recording to chunk and transcribe.
    #[arg(long)]
    audio: Option<PathBuf>,
    /// Program called as `<program> <wav>` for each chunk.
    #[arg(long)]
    transcriber: Option<PathBuf>,
    #[arg(long)]
    chunk_len: Option<f64>,
    #[arg(long)]
    overlap: Option<f64>,
    /// Keep silences instead of stripping them before chunking.
    #[arg(long)]
    no_vad: bool,
}

fn words(text: &str, rules: &NormRuleSet) -> asrlab::textnorm::WordSeq {
    tokenize_words(&normalize(text, rules))
}

fn read_partials(dir: &Path, rules: &NormRuleSet) -> Result<Vec<PartialTranscript>> {
    let mut found = Vec::new();
    let entries = std::fs::read_dir(dir).map_err(|e| invalid(format!("stitch: {}: {e}", dir.display())))?;
    for entry in entries {
        let path = entry?.path();
        if path.extension().and_then(|e| e.to_str()) != Some("txt") {
            continue;
        }
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default();
        let index: usize =
            stem.parse().map_err(|_| invalid(format!("stitch: {} is not named <index>.txt", path.display())))?;
        found.push((index, path));
    }
    found.sort();
    for (expected, (index, _)) in found.iter().enumerate() {
        if *index != expected {
            return Err(invalid(format!("stitch: partial {expected} is missing from {}", dir.display())));
        }
    }
    found
        .into_iter()
        .map(|(index, path)| Ok(PartialTranscript::new(index, words(&read_input(&path)?, rules))))
        .collect()
}

fn transcribe_audio(path: &Path, program: PathBuf, args: &Args, cfg: &RunConfig, rules: &NormRuleSet) -> Result<Vec<PartialTranscript>> {
    let mut audio = AudioBuffer::read_wav(path).map_err(invalid)?;
    if cfg.stitch.vad && !args.no_vad {
        let segments = energy_vad(&audio, &cfg.stitch.vad_config);
        audio = strip_silence(&audio, &segments);
    }
    if audio.is_empty() {
        return Err(invalid(format!("stitch: {} has no speech", path.display())));
    }
    let plan = plan_chunks(
        audio.duration_sec(),
        args.chunk_len.unwrap_or(cfg.stitch.chunk_len_sec),
        args.overlap.unwrap_or(cfg.stitch.overlap_sec),
    )
    .map_err(invalid)?;
    let work = cfg.out_dir.join("work");
    std::fs::create_dir_all(&work).with_context(|| format!("cannot create {}", work.display()))?;
    let transcriber = CommandTranscriber::new(program);
    let mut partials = Vec::with_capacity(plan.chunks.len());
    for (i, &(start, end)) in plan.chunks.iter().enumerate() {
        let wav = work.join(format!("chunk_{i:04}.wav"));
        audio.slice_sec(start, end).write_wav(&wav)?;
        let text = transcriber.transcribe(&wav, &format!("chunk{i}")).map_err(|e| anyhow::anyhow!("stitch: chunk {i}: {e}"))?;
        std::fs::remove_file(&wav)?;
        let mut p = PartialTranscript::new(i, words(&text, rules));
        p.span = Some((start, end));
        partials.push(p);
    }
    let _ = std::fs::remove_dir(&work);
    Ok(partials)
}

pub fn run(args: Args, cfg: &RunConfig) -> Result<bool> {
    let rules = cfg.rule_set()?;
    let partials = match (&args.partials, &args.audio) {
        (Some(dir), _) => read_partials(dir, &rules)?,
        (None, Some(audio)) => {
            let program = args
                .transcriber
                .clone()
                .or_else(|| cfg.stitch.transcriber.clone())
                .ok_or_else(|| invalid("stitch: --audio needs a transcriber"))?;
            transcribe_audio(audio, program, &args, cfg, &rules)?
        }
        (None, None) => unreachable!("clap requires one input"),
    };
    let out = stitch(&partials, &cfg.stitch.join);
    let text = out.words.words().join(" ");

    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["junction", "kind", "offset", "len", "dropped_left", "dropped_right"])?;
    for (i, j) in out.junctions.iter().enumerate() {
        let (kind, a, b, c, d) = match *j {
            Junction::Match { offset, len } => ("match", offset, len, 0, 0),
            Junction::Midpoint { dropped_left, dropped_right } => ("midpoint", 0, 0, dropped_left, dropped_right),
            Junction::Halved { dropped_left, dropped_right } => ("halved", 0, 0, dropped_left, dropped_right),
        };
        w.write_record([i.to_string(), kind.into(), a.to_string(), b.to_string(), c.to_string(), d.to_string()])?;
    }
    let body = String::from_utf8(w.into_inner()?).expect("csv output is utf-8");
    write_report(&cfg.out_dir, "junctions.csv", &(header("stitch", cfg, &args) + &body))?;
    write_report(&cfg.out_dir, "stitched.txt", &format!("{text}\n"))?;
    println!("{text}");
    Ok(true)
}
