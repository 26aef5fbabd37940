use std::path::Path;

use super::NoiseError;

pub const DEFAULT_SAMPLE_RATE: u32 = 16_000;

/// Mono PCM samples. Audio read from or written to disk is in `[-1, 1]`;
/// intermediate buffers such as unit-variance noise may exceed it.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioBuffer {
    pub samples: Vec<f32>,
    pub sample_rate_hz: u32,
}

impl AudioBuffer {
    pub fn new(samples: Vec<f32>, sample_rate_hz: u32) -> Result<Self, NoiseError> {
        if sample_rate_hz == 0 {
            return Err(NoiseError::InvalidSpec("sample rate must be positive".into()));
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return Err(NoiseError::NonFinite(i));
        }
        Ok(AudioBuffer { samples, sample_rate_hz })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_sec(&self) -> f64 {
        self.samples.len() as f64 / f64::from(self.sample_rate_hz)
    }

    /// Mean square over the whole buffer.
    pub fn power(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        self.samples.iter().map(|&s| f64::from(s) * f64::from(s)).sum::<f64>() / self.samples.len() as f64
    }

    pub fn rms(&self) -> f64 {
        self.power().sqrt()
    }

    pub fn peak(&self) -> f32 {
        self.samples.iter().fold(0.0f32, |m, s| m.max(s.abs()))
    }

    /// Samples between two times, clamped to the buffer.
    pub fn slice_sec(&self, start: f64, end: f64) -> AudioBuffer {
        let sr = f64::from(self.sample_rate_hz);
        let a = ((start * sr).round().max(0.0) as usize).min(self.len());
        let b = ((end * sr).round().max(0.0) as usize).clamp(a, self.len());
        AudioBuffer { samples: self.samples[a..b].to_vec(), sample_rate_hz: self.sample_rate_hz }
    }

    /// Reads a mono 16-bit PCM WAV.
    pub fn read_wav(path: impl AsRef<Path>) -> Result<Self, NoiseError> {
        let path = path.as_ref();
        let reader = hound::WavReader::open(path).map_err(|e| NoiseError::Wav(path.display().to_string(), e))?;
        let spec = reader.spec();
        if spec.channels != 1 || spec.bits_per_sample != 16 || spec.sample_format != hound::SampleFormat::Int {
            return Err(NoiseError::UnsupportedWav {
                path: path.display().to_string(),
                detail: format!("{} channel(s), {}-bit {:?}", spec.channels, spec.bits_per_sample, spec.sample_format),
            });
        }
        let samples = reader
            .into_samples::<i16>()
            .map(|s| s.map(|v| f32::from(v) / f32::from(i16::MAX)))
            .collect::<Result<Vec<f32>, _>>()
            .map_err(|e| NoiseError::Wav(path.display().to_string(), e))?;
        Ok(AudioBuffer { samples, sample_rate_hz: spec.sample_rate })
    }

    /// Writes mono 16-bit PCM. Samples outside `[-1, 1]` are an error
    /// rather than being clipped.
    pub fn write_wav(&self, path: impl AsRef<Path>) -> Result<(), NoiseError> {
        let path = path.as_ref();
        if let Some(i) = self.samples.iter().position(|s| s.abs() > 1.0) {
            return Err(NoiseError::OutOfRange(i));
        }
        let spec = hound::WavSpec {
            channels: 1,
            sample_rate: self.sample_rate_hz,
            bits_per_sample: 16,
            sample_format: hound::SampleFormat::Int,
        };
        let wav = |e| NoiseError::Wav(path.display().to_string(), e);
        let mut w = hound::WavWriter::create(path, spec).map_err(wav)?;
        for &s in &self.samples {
            w.write_sample((s * f32::from(i16::MAX)).round() as i16).map_err(wav)?;
        }
        w.finalize().map_err(wav)
    }
}

/// Sine tone, handy for fixtures.
pub fn tone(freq_hz: f64, amplitude: f32, duration_sec: f64, sample_rate_hz: u32) -> AudioBuffer {
    let n = (duration_sec * f64::from(sample_rate_hz)).round() as usize;
    let sr = f64::from(sample_rate_hz);
    let samples =
        (0..n).map(|i| amplitude * (2.0 * std::f64::consts::PI * freq_hz * i as f64 / sr).sin() as f32).collect();
    AudioBuffer { samples, sample_rate_hz }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wav_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.wav");
        let a = tone(440.0, 0.5, 0.1, DEFAULT_SAMPLE_RATE);
        a.write_wav(&p).unwrap();
        let b = AudioBuffer::read_wav(&p).unwrap();
        assert_eq!(b.sample_rate_hz, 16_000);
        assert_eq!(b.len(), a.len());
        for (x, y) in a.samples.iter().zip(&b.samples) {
            assert!((x - y).abs() <= 0.5 / 32767.0 + 1e-7);
        }
        let bytes = std::fs::read(&p).unwrap();
        assert_eq!(&bytes[..4], b"RIFF");
        assert_eq!(bytes.len(), 44 + 2 * a.len());
    }

    #[test]
    fn rejects_out_of_range_and_stereo() {
        let dir = tempfile::tempdir().unwrap();
        let loud = AudioBuffer::new(vec![0.0, 1.5], 16_000).unwrap();
        assert!(matches!(loud.write_wav(dir.path().join("x.wav")), Err(NoiseError::OutOfRange(1))));
        let p = dir.path().join("s.wav");
        let spec = hound::WavSpec { channels: 2, sample_rate: 16_000, bits_per_sample: 16, sample_format: hound::SampleFormat::Int };
        let mut w = hound::WavWriter::create(&p, spec).unwrap();
        w.write_sample(0i16).unwrap();
        w.write_sample(0i16).unwrap();
        w.finalize().unwrap();
        assert!(matches!(AudioBuffer::read_wav(&p), Err(NoiseError::UnsupportedWav { .. })));
        assert!(matches!(AudioBuffer::new(vec![f32::NAN], 16_000), Err(NoiseError::NonFinite(0))));
    }

    #[test]
    fn power_and_slice() {
        let a = AudioBuffer::new(vec![1.0, -1.0, 0.0, 0.0], 4).unwrap();
        assert_eq!(a.power(), 0.5);
        assert_eq!(a.peak(), 1.0);
        assert_eq!(a.slice_sec(0.25, 0.75).samples, vec![-1.0, 0.0]);
        assert_eq!(a.slice_sec(0.5, 9.0).len(), 2);
        assert_eq!(a.duration_sec(), 1.0);
    }
}
