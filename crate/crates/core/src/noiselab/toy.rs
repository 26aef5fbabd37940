use std::f64::consts::PI;
use std::path::Path;

use super::{AudioBuffer, NoiseError, Transcribe};

/// A two-word tone code: each word is a fixed-length sine burst at its own
/// frequency. Gives sweeps a transcriber whose behaviour is fully known.
#[derive(Debug, Clone, PartialEq)]
pub struct ToneCode {
    pub words: [(String, f64); 2],
    pub segment_sec: f64,
    pub amplitude: f32,
    pub sample_rate_hz: u32,
}

impl Default for ToneCode {
    fn default() -> Self {
        ToneCode {
            words: [("low".into(), 440.0), ("high".into(), 660.0)],
            segment_sec: 0.1,
            amplitude: 0.5,
            sample_rate_hz: super::DEFAULT_SAMPLE_RATE,
        }
    }
}

impl ToneCode {
    fn segment_len(&self) -> usize {
        (self.segment_sec * f64::from(self.sample_rate_hz)).round() as usize
    }

    fn reference(&self, freq: f64, n: usize) -> impl Iterator<Item = f64> + '_ {
        let sr = f64::from(self.sample_rate_hz);
        (0..n).map(move |i| (2.0 * PI * freq * i as f64 / sr).sin())
    }

    /// Audio for a space-separated word string; unknown words are an error.
    pub fn synthesize(&self, text: &str) -> Result<AudioBuffer, NoiseError> {
        let n = self.segment_len();
        let mut samples = Vec::new();
        for w in text.split_whitespace() {
            let freq = self
                .words
                .iter()
                .find(|(name, _)| name == w)
                .map(|(_, f)| *f)
                .ok_or_else(|| NoiseError::InvalidSpec(format!("word {w:?} has no tone")))?;
            samples.extend(self.reference(freq, n).map(|s| self.amplitude * s as f32));
        }
        AudioBuffer::new(samples, self.sample_rate_hz)
    }

    /// Picks, per segment, the word whose in-phase correlation is larger.
    /// The decision is linear in any additive noise, so a flipped segment
    /// stays flipped as the noise gain grows.
    pub fn decode(&self, audio: &AudioBuffer) -> String {
        let n = self.segment_len();
        let refs: Vec<Vec<f64>> = self.words.iter().map(|(_, f)| self.reference(*f, n).collect()).collect();
        audio
            .samples
            .chunks_exact(n)
            .map(|seg| {
                let corr = |r: &[f64]| seg.iter().zip(r).map(|(&x, y)| f64::from(x) * y).sum::<f64>();
                let pick = if corr(&refs[1]) > corr(&refs[0]) { 1 } else { 0 };
                self.words[pick].0.as_str()
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// In-process [`Transcribe`] backend decoding a [`ToneCode`].
#[derive(Debug, Clone, Default)]
pub struct ToneMatcher(pub ToneCode);

impl Transcribe for ToneMatcher {
    fn transcribe(&self, wav: &Path, _file_id: &str) -> Result<String, String> {
        let audio = AudioBuffer::read_wav(wav).map_err(|e| e.to_string())?;
        Ok(self.0.decode(&audio))
    }
}
