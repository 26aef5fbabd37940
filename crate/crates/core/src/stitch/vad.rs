use serde::{Deserialize, Serialize};

use crate::noiselab::AudioBuffer;

/// A stretch of detected speech, in seconds from the start of the audio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpeechSegment {
    pub start_sec: f64,
    pub end_sec: f64,
}

impl SpeechSegment {
    pub fn duration(&self) -> f64 {
        self.end_sec - self.start_sec
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VadConfig {
    pub frame_ms: f64,
    /// Frame energy threshold in dB relative to full scale (mean square 1).
    pub threshold_db: f64,
    /// Frames kept as speech after energy drops below the threshold.
    pub hangover_frames: usize,
}

impl Default for VadConfig {
    fn default() -> Self {
        VadConfig { frame_ms: 30.0, threshold_db: -40.0, hangover_frames: 3 }
    }
}

/// Energy detector: a frame is speech when its mean-square energy in dB is
/// above the threshold, or when it falls within the hangover of one that
/// is. Adjacent speech frames merge into one segment.
pub fn energy_vad(audio: &AudioBuffer, cfg: &VadConfig) -> Vec<SpeechSegment> {
    let sr = f64::from(audio.sample_rate_hz);
    let frame = ((cfg.frame_ms / 1000.0 * sr).round() as usize).max(1);
    let total = audio.duration_sec();
    let mut segments: Vec<SpeechSegment> = Vec::new();
    let mut hang = 0usize;
    for (i, chunk) in audio.samples.chunks(frame).enumerate() {
        let energy = chunk.iter().map(|&s| f64::from(s) * f64::from(s)).sum::<f64>() / chunk.len() as f64;
        let loud = energy > 0.0 && 10.0 * energy.log10() > cfg.threshold_db;
        let speech = if loud {
            hang = cfg.hangover_frames;
            true
        } else if hang > 0 {
            hang -= 1;
            true
        } else {
            false
        };
        if !speech {
            continue;
        }
        let start = (i * frame) as f64 / sr;
        let end = (((i + 1) * frame) as f64 / sr).min(total);
        match segments.last_mut() {
            Some(last) if (last.end_sec - start).abs() < 1e-12 => last.end_sec = end,
            _ => segments.push(SpeechSegment { start_sec: start, end_sec: end }),
        }
    }
    segments
}

/// Fraction of `duration_sec` covered by speech.
pub fn speech_ratio(segments: &[SpeechSegment], duration_sec: f64) -> f64 {
    if duration_sec <= 0.0 {
        return 0.0;
    }
    (segments.iter().map(SpeechSegment::duration).sum::<f64>() / duration_sec).clamp(0.0, 1.0)
}

/// Longest stretch without speech, including leading and trailing silence.
pub fn max_silence(segments: &[SpeechSegment], duration_sec: f64) -> f64 {
    let mut prev = 0.0;
    let mut longest: f64 = 0.0;
    for s in segments {
        longest = longest.max(s.start_sec - prev);
        prev = s.end_sec;
    }
    longest.max(duration_sec - prev)
}

/// Concatenates the speech segments, dropping everything else.
pub fn strip_silence(audio: &AudioBuffer, segments: &[SpeechSegment]) -> AudioBuffer {
    let mut samples = Vec::new();
    for s in segments {
        samples.extend(audio.slice_sec(s.start_sec, s.end_sec).samples);
    }
    AudioBuffer { samples, sample_rate_hz: audio.sample_rate_hz }
}
