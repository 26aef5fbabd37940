//! Noise injection at exact signal-to-noise ratios and WER-vs-SNR sweeps.

mod audio;
mod mix;
mod sweep;
mod toy;

pub use audio::{tone, AudioBuffer, DEFAULT_SAMPLE_RATE};
pub use mix::{gaussian_noise, mix_at_snr, Mix};
pub use sweep::{
    load_noise_corpus, run_sweep, safe_name, CommandTranscriber, NoiseKind, SweepItem, SweepReport, SweepRow,
    SweepSpec, SweepSummary, Transcribe,
};
pub use toy::{ToneCode, ToneMatcher};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum NoiseError {
    #[error("noiselab: {0} buffer is empty")]
    EmptyBuffer(&'static str),
    #[error("noiselab: clean clip is silent, SNR is undefined")]
    SilentClean,
    #[error("noiselab: noise is silent, no gain reaches the target SNR")]
    SilentNoise,
    #[error("noiselab: sample rates differ (clean {clean} Hz, noise {noise} Hz)")]
    SampleRateMismatch { clean: u32, noise: u32 },
    #[error("noiselab: sample {0} is not finite")]
    NonFinite(usize),
    #[error("noiselab: sample {0} is outside [-1, 1]")]
    OutOfRange(usize),
    #[error("noiselab: {path}: expected mono 16-bit PCM, found {detail}")]
    UnsupportedWav { path: String, detail: String },
    #[error("noiselab: {0}: {1}")]
    Wav(String, hound::Error),
    #[error("noiselab: invalid sweep spec: {0}")]
    InvalidSpec(String),
    #[error("noiselab: {0}")]
    Io(#[from] std::io::Error),
}
