use rand::Rng;
use rand_distr::StandardNormal;

use super::{AudioBuffer, NoiseError};
use crate::seed::substream_rng;

/// `n` i.i.d. standard normal samples from the named seed.
pub fn gaussian_noise(n: usize, seed: u64, sample_rate_hz: u32) -> Result<AudioBuffer, NoiseError> {
    if n == 0 {
        return Err(NoiseError::EmptyBuffer("noise"));
    }
    let mut rng = substream_rng(seed, "gaussian");
    let samples = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal) as f32).collect();
    Ok(AudioBuffer { samples, sample_rate_hz })
}

/// A mix and the two components it was summed from, after any joint
/// rescale.
#[derive(Debug, Clone, PartialEq)]
pub struct Mix {
    pub mixed: AudioBuffer,
    pub clean: AudioBuffer,
    pub noise: AudioBuffer,
    /// Gain applied to the raw noise before rescaling.
    pub gain: f64,
    /// Joint factor applied to both components to keep the peak within
    /// `[-1, 1]`; 1 when no rescale was needed.
    pub scale: f64,
    pub target_snr_db: f64,
}

impl Mix {
    /// `10·log10(P_clean / P_noise)` over the stored components.
    pub fn measured_snr_db(&self) -> f64 {
        10.0 * (self.clean.power() / self.noise.power()).log10()
    }
}

/// Adds `g·noise` to `clean` with `g = sqrt(P_clean / (P_noise · 10^(snr/10)))`.
///
/// Noise shorter than the clip is looped from `noise_offset`; longer noise is
/// truncated. Powers are mean squares over the whole clip. An infinite SNR
/// gives `g = 0`. If the sum would leave `[-1, 1]`, both components are
/// scaled by the same factor, which leaves the SNR unchanged.
pub fn mix_at_snr(
    clean: &AudioBuffer,
    noise: &AudioBuffer,
    target_snr_db: f64,
    noise_offset: usize,
) -> Result<Mix, NoiseError> {
    if clean.is_empty() {
        return Err(NoiseError::EmptyBuffer("clean"));
    }
    if noise.is_empty() {
        return Err(NoiseError::EmptyBuffer("noise"));
    }
    if clean.sample_rate_hz != noise.sample_rate_hz {
        return Err(NoiseError::SampleRateMismatch { clean: clean.sample_rate_hz, noise: noise.sample_rate_hz });
    }
    if target_snr_db.is_nan() || target_snr_db == f64::NEG_INFINITY {
        return Err(NoiseError::InvalidSpec(format!("target SNR {target_snr_db} dB")));
    }
    let n = clean.len();
    let looped: Vec<f64> = (0..n).map(|i| f64::from(noise.samples[(noise_offset + i) % noise.len()])).collect();
    let p_clean = clean.power();
    let p_noise = looped.iter().map(|x| x * x).sum::<f64>() / n as f64;
    if p_clean == 0.0 {
        return Err(NoiseError::SilentClean);
    }
    if p_noise == 0.0 {
        return Err(NoiseError::SilentNoise);
    }
    let gain =
        if target_snr_db == f64::INFINITY { 0.0 } else { (p_clean / (p_noise * 10f64.powf(target_snr_db / 10.0))).sqrt() };
    let sum: Vec<f64> = clean.samples.iter().zip(&looped).map(|(&c, &z)| f64::from(c) + gain * z).collect();
    let peak = sum.iter().fold(0.0f64, |m, s| m.max(s.abs()));
    let scale = if peak > 1.0 { 1.0 / peak } else { 1.0 };
    let sr = clean.sample_rate_hz;
    let buf = |v: Vec<f32>| AudioBuffer { samples: v, sample_rate_hz: sr };
    Ok(Mix {
        mixed: buf(sum.iter().map(|s| (s * scale) as f32).collect()),
        clean: buf(clean.samples.iter().map(|&c| (f64::from(c) * scale) as f32).collect()),
        noise: buf(looped.iter().map(|z| (gain * z * scale) as f32).collect()),
        gain,
        scale,
        target_snr_db,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noiselab::audio::tone;

    #[test]
    fn gaussian_is_deterministic_and_standard() {
        let a = gaussian_noise(100_000, 5, 16_000).unwrap();
        assert_eq!(a, gaussian_noise(100_000, 5, 16_000).unwrap());
        assert_ne!(a, gaussian_noise(100_000, 6, 16_000).unwrap());
        let n = a.len() as f64;
        let mean = a.samples.iter().map(|&x| f64::from(x)).sum::<f64>() / n;
        let var = a.samples.iter().map(|&x| (f64::from(x) - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!(mean.abs() < 3.0 / n.sqrt(), "mean {mean}");
        // standard error of the sample variance is sqrt(2/n)
        assert!((var - 1.0).abs() < 5.0 * (2.0 / n).sqrt(), "var {var}");
        assert!(gaussian_noise(0, 1, 16_000).is_err());
    }

    #[test]
    fn hits_target_snr() {
        let clean = tone(300.0, 0.3, 1.0, 16_000);
        let noise = gaussian_noise(7_000, 1, 16_000).unwrap();
        for snr in [-5.0, 0.0, 5.0, 10.0, 20.0] {
            let m = mix_at_snr(&clean, &noise, snr, 123).unwrap();
            assert!((m.measured_snr_db() - snr).abs() < 0.1, "{snr}: {}", m.measured_snr_db());
            assert!(m.mixed.peak() <= 1.0);
        }
    }

    #[test]
    fn zero_db_powers_equal_and_rescale_recorded() {
        let clean = tone(300.0, 0.9, 0.5, 16_000);
        let noise = gaussian_noise(8_000, 2, 16_000).unwrap();
        let m = mix_at_snr(&clean, &noise, 0.0, 0).unwrap();
        let db = 10.0 * (m.clean.power() / m.noise.power()).log10();
        assert!(db.abs() < 0.1);
        assert!(m.scale < 1.0);
        assert!((m.mixed.peak() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn infinite_and_high_snr() {
        let clean = tone(300.0, 0.3, 0.2, 16_000);
        let noise = gaussian_noise(100, 3, 16_000).unwrap();
        let m = mix_at_snr(&clean, &noise, f64::INFINITY, 0).unwrap();
        assert_eq!(m.gain, 0.0);
        assert_eq!(m.mixed, clean);
        let m = mix_at_snr(&clean, &noise, 120.0, 0).unwrap();
        let diff = m.mixed.samples.iter().zip(&clean.samples).map(|(a, b)| (a - b).abs()).fold(0.0f32, f32::max);
        assert!(diff < 1e-4);
    }

    #[test]
    fn errors() {
        let clean = tone(300.0, 0.3, 0.1, 16_000);
        let silent = AudioBuffer { samples: vec![0.0; 10], sample_rate_hz: 16_000 };
        assert!(matches!(mix_at_snr(&silent, &clean, 0.0, 0), Err(NoiseError::SilentClean)));
        assert!(matches!(mix_at_snr(&clean, &silent, 0.0, 0), Err(NoiseError::SilentNoise)));
        let other = AudioBuffer { samples: vec![0.1; 10], sample_rate_hz: 8_000 };
        assert!(matches!(mix_at_snr(&clean, &other, 0.0, 0), Err(NoiseError::SampleRateMismatch { .. })));
        assert!(mix_at_snr(&clean, &clean, f64::NAN, 0).is_err());
    }

    #[test]
    fn linear_in_clean() {
        let clean = tone(200.0, 0.2, 0.25, 16_000);
        let noise = gaussian_noise(999, 4, 16_000).unwrap();
        let c = 0.5f32;
        let scaled = AudioBuffer { samples: clean.samples.iter().map(|s| s * c).collect(), sample_rate_hz: 16_000 };
        let a = mix_at_snr(&clean, &noise, 5.0, 0).unwrap();
        let b = mix_at_snr(&scaled, &noise, 5.0, 0).unwrap();
        for (x, y) in a.mixed.samples.iter().zip(&b.mixed.samples) {
            assert!((x * c - y).abs() < 1e-6);
        }
        assert!((a.measured_snr_db() - b.measured_snr_db()).abs() < 1e-6);
    }
}
