use std::path::{Path, PathBuf};
use std::process::Command;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::mix::{gaussian_noise, mix_at_snr};
use super::{AudioBuffer, NoiseError};
use crate::metrics::{weighted_average, wer};
use crate::seed::{substream_rng, substream_seed};
use crate::textnorm::{normalize, tokenize_words, NormRuleSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseKind {
    Gaussian,
    Ambient,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSpec {
    pub snr_list_db: Vec<f64>,
    pub noise_kind: NoiseKind,
    /// Directory of mono 16-bit WAV files; required for ambient noise.
    pub noise_corpus_dir: Option<PathBuf>,
    pub seed: u64,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            snr_list_db: vec![-5.0, 0.0, 5.0, 10.0, 20.0],
            noise_kind: NoiseKind::Gaussian,
            noise_corpus_dir: None,
            seed: 0,
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), NoiseError> {
        if self.snr_list_db.is_empty() {
            return Err(NoiseError::InvalidSpec("snr_list_db is empty".into()));
        }
        if self.snr_list_db.iter().any(|s| s.is_nan() || *s == f64::NEG_INFINITY) {
            return Err(NoiseError::InvalidSpec("SNR values must be numbers or +inf".into()));
        }
        if self.noise_kind == NoiseKind::Ambient && self.noise_corpus_dir.is_none() {
            return Err(NoiseError::InvalidSpec("ambient noise needs noise_corpus_dir".into()));
        }
        Ok(())
    }
}

/// Speech-to-text backend. `file_id` is passed for in-process backends;
/// external commands only see the WAV path.
pub trait Transcribe: Sync {
    fn transcribe(&self, wav: &Path, file_id: &str) -> Result<String, String>;
}

/// Runs `program [args..] <wav>` and reads the transcript from stdout.
#[derive(Debug, Clone)]
pub struct CommandTranscriber {
    pub program: PathBuf,
    pub args: Vec<String>,
}

impl CommandTranscriber {
    pub fn new(program: impl Into<PathBuf>) -> Self {
        CommandTranscriber { program: program.into(), args: Vec::new() }
    }
}

impl Transcribe for CommandTranscriber {
    fn transcribe(&self, wav: &Path, _file_id: &str) -> Result<String, String> {
        let out = Command::new(&self.program)
            .args(&self.args)
            .arg(wav)
            .output()
            .map_err(|e| format!("cannot run {}: {e}", self.program.display()))?;
        if !out.status.success() {
            let stderr = String::from_utf8_lossy(&out.stderr);
            return Err(format!("{} exited with {}: {}", self.program.display(), out.status, stderr.trim()));
        }
        String::from_utf8(out.stdout).map_err(|_| "transcript is not UTF-8".to_string())
    }
}

impl<F: Fn(&Path, &str) -> Result<String, String> + Sync> Transcribe for F {
    fn transcribe(&self, wav: &Path, file_id: &str) -> Result<String, String> {
        self(wav, file_id)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepItem {
    pub file_id: String,
    pub audio_path: PathBuf,
    pub reference: String,
    pub length_sec: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub snr_db: f64,
    pub file_id: String,
    pub length_sec: f64,
    /// `None` when mixing or transcription failed.
    pub wer: Option<f64>,
    pub error: Option<String>,
    pub noise_source: String,
    pub gain: f64,
    pub scale: f64,
    pub measured_snr_db: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSummary {
    pub snr_db: f64,
    pub files: usize,
    pub failed: usize,
    /// Length-weighted over the files that did not fail.
    pub wer: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    pub summary: Vec<SweepSummary>,
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_default()
}

impl SweepReport {
    /// `snr_db,file_id,wer`; failed files have an empty `wer`.
    pub fn rows_csv(&self) -> String {
        let mut s = String::from("snr_db,file_id,wer\n");
        for r in &self.rows {
            s.push_str(&format!("{},{},{}\n", r.snr_db, csv_field(&r.file_id), fmt_opt(r.wer)));
        }
        s
    }

    pub fn summary_csv(&self) -> String {
        let mut s = String::from("snr_db,files,failed,wer\n");
        for r in &self.summary {
            s.push_str(&format!("{},{},{},{}\n", r.snr_db, r.files, r.failed, fmt_opt(r.wer)));
        }
        s
    }

    /// Per-mix gains, rescale factors and measured SNRs.
    pub fn mixes_csv(&self) -> String {
        let mut s = String::from("snr_db,file_id,noise_source,gain,scale,measured_snr_db,error\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{},{},{},{:.9},{:.9},{:.6},{}\n",
                r.snr_db,
                csv_field(&r.file_id),
                csv_field(&r.noise_source),
                r.gain,
                r.scale,
                r.measured_snr_db,
                csv_field(r.error.as_deref().unwrap_or(""))
            ));
        }
        s
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// File-system-safe version of an id.
pub fn safe_name(id: &str) -> String {
    id.chars().map(|c| if c.is_ascii_alphanumeric() || "._-".contains(c) { c } else { '_' }).collect()
}

/// Loads every `*.wav` in `dir`, sorted by file name.
pub fn load_noise_corpus(dir: &Path) -> Result<Vec<(String, AudioBuffer)>, NoiseError> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x.eq_ignore_ascii_case("wav")))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(NoiseError::InvalidSpec(format!("no .wav files in {}", dir.display())));
    }
    paths
        .into_iter()
        .map(|p| {
            let name = p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
            AudioBuffer::read_wav(&p).map(|a| (name, a))
        })
        .collect()
}

struct Prepared {
    clean: AudioBuffer,
    noise: AudioBuffer,
    offset: usize,
    source: String,
}

fn prepare(
    item: &SweepItem,
    spec: &SweepSpec,
    corpus: &[(String, AudioBuffer)],
) -> Result<Prepared, NoiseError> {
    let clean = AudioBuffer::read_wav(&item.audio_path)?;
    match spec.noise_kind {
        NoiseKind::Gaussian => {
            let seed = substream_seed(spec.seed, &format!("noise/{}", item.file_id));
            let noise = gaussian_noise(clean.len().max(1), seed, clean.sample_rate_hz)?;
            Ok(Prepared { clean, noise, offset: 0, source: "gaussian".into() })
        }
        NoiseKind::Ambient => {
            let mut rng = substream_rng(spec.seed, &format!("ambient/{}", item.file_id));
            let (name, noise) = &corpus[rng.random_range(0..corpus.len())];
            let offset = rng.random_range(0..noise.len().max(1));
            Ok(Prepared { clean, noise: noise.clone(), offset, source: name.clone() })
        }
    }
}

/// Mixes every file at every SNR, transcribes the mix and scores it.
///
/// Each file gets one noise draw (Gaussian samples, or an ambient file and
/// start offset) from a substream named after its id, reused at every SNR,
/// so only the gain changes along the sweep. Rows come out ordered by SNR
/// then input order, whatever `jobs` is. Mixes are written to `work_dir`
/// as `<snr index>_<file id>.wav` and deleted after transcription.
pub fn run_sweep(
    items: &[SweepItem],
    spec: &SweepSpec,
    transcriber: &dyn Transcribe,
    rules: &NormRuleSet,
    work_dir: &Path,
    jobs: usize,
) -> Result<SweepReport, NoiseError> {
    spec.validate()?;
    let corpus = match (&spec.noise_kind, &spec.noise_corpus_dir) {
        (NoiseKind::Ambient, Some(dir)) => load_noise_corpus(dir)?,
        _ => Vec::new(),
    };
    std::fs::create_dir_all(work_dir)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| NoiseError::InvalidSpec(e.to_string()))?;

    let rows = pool.install(|| {
        let prepared: Vec<Result<Prepared, String>> =
            items.par_iter().map(|it| prepare(it, spec, &corpus).map_err(|e| e.to_string())).collect();
        let tasks: Vec<(usize, usize)> =
            (0..spec.snr_list_db.len()).flat_map(|s| (0..items.len()).map(move |f| (s, f))).collect();
        tasks
            .par_iter()
            .map(|&(s, f)| {
                let snr = spec.snr_list_db[s];
                let wav = work_dir.join(format!("{s:02}_{}.wav", safe_name(&items[f].file_id)));
                score_one(&items[f], &prepared[f], snr, &wav, transcriber, rules)
            })
            .collect::<Vec<SweepRow>>()
    });

    let summary = spec
        .snr_list_db
        .iter()
        .enumerate()
        .map(|(s, &snr)| {
            let block = &rows[s * items.len()..(s + 1) * items.len()];
            let (scores, lengths): (Vec<f64>, Vec<f64>) =
                block.iter().filter_map(|r| r.wer.map(|w| (w, r.length_sec))).unzip();
            SweepSummary {
                snr_db: snr,
                files: block.len(),
                failed: block.len() - scores.len(),
                wer: weighted_average(&scores, &lengths).ok(),
            }
        })
        .collect();
    Ok(SweepReport { rows, summary })
}

fn score_one(
    item: &SweepItem,
    prepared: &Result<Prepared, String>,
    snr_db: f64,
    wav: &Path,
    transcriber: &dyn Transcribe,
    rules: &NormRuleSet,
) -> SweepRow {
    let mut row = SweepRow {
        snr_db,
        file_id: item.file_id.clone(),
        length_sec: item.length_sec,
        wer: None,
        error: None,
        noise_source: String::new(),
        gain: 0.0,
        scale: 1.0,
        measured_snr_db: f64::NAN,
    };
    let p = match prepared {
        Ok(p) => p,
        Err(e) => {
            row.error = Some(e.clone());
            return row;
        }
    };
    row.noise_source = p.source.clone();
    let mix = match mix_at_snr(&p.clean, &p.noise, snr_db, p.offset) {
        Ok(m) => m,
        Err(e) => {
            row.error = Some(e.to_string());
            return row;
        }
    };
    row.gain = mix.gain;
    row.scale = mix.scale;
    row.measured_snr_db = mix.measured_snr_db();
    let result = mix
        .mixed
        .write_wav(wav)
        .map_err(|e| e.to_string())
        .and_then(|()| transcriber.transcribe(wav, &item.file_id));
    let _ = std::fs::remove_file(wav);
    match result {
        Ok(hyp) => {
            let r = tokenize_words(&normalize(&item.reference, rules));
            let h = tokenize_words(&normalize(&hyp, rules));
            match wer(&r, &h) {
                Ok(w) => row.wer = Some(w),
                Err(e) => row.error = Some(e.to_string()),
            }
        }
        Err(e) => row.error = Some(e),
    }
    row
}
