//! Long-form decoding support: silence stripping, overlapping chunk plans
//! and joining chunk transcripts back together.

mod chunks;
mod join;
mod vad;

pub use chunks::{plan_chunks, ChunkPlan};
pub use join::{stitch, Junction, PartialTranscript, StitchConfig, Stitched};
pub use vad::{energy_vad, max_silence, speech_ratio, strip_silence, SpeechSegment, VadConfig};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum StitchError {
    #[error("stitch: invalid chunk plan: {0}")]
    InvalidPlan(String),
    #[error("stitch: partial transcripts must be numbered 0..{expected}, missing {missing}")]
    MissingPartial { expected: usize, missing: usize },
}
