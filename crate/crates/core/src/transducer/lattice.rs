use std::fmt::Write as _;

use rand::Rng;
use rand_distr::StandardNormal;

use super::TransducerError;

/// Maximum `|logsumexp - 0|` accepted for a lattice slice.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

/// `ln(eᵃ + eᵇ)` without overflow; two `-inf` inputs give `-inf`.
pub fn logaddexp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

pub fn logsumexp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

pub fn log_softmax(xs: &[f64]) -> Vec<f64> {
    let lse = logsumexp(xs);
    xs.iter().map(|x| x - lse).collect()
}

/// Joint-network log-probabilities over a `T × (U+1)` grid, each node a
/// distribution over `V` labels plus blank (id `V`).
#[derive(Debug, Clone, PartialEq)]
pub struct RnntLattice {
    frames: usize,
    vocab: usize,
    targets: Vec<usize>,
    logits: Vec<f64>,
}

impl RnntLattice {
    /// `logits` is row-major `(T, U+1, V+1)`; every slice must be normalized.
    pub fn new(frames: usize, vocab: usize, targets: Vec<usize>, logits: Vec<f64>) -> Result<Self, TransducerError> {
        let lat = Self::new_unchecked(frames, vocab, targets, logits)?;
        for t in 0..lat.frames {
            for u in 0..=lat.target_len() {
                let lse = logsumexp(lat.slice(t, u));
                if !((lse).abs() <= NORMALIZATION_TOLERANCE) {
                    return Err(TransducerError::NotNormalized { t, u, lse });
                }
            }
        }
        Ok(lat)
    }

    /// Shape and label checks only. Used for finite-difference probes that
    /// deliberately break normalization.
    pub(crate) fn new_unchecked(
        frames: usize,
        vocab: usize,
        targets: Vec<usize>,
        logits: Vec<f64>,
    ) -> Result<Self, TransducerError> {
        if frames == 0 {
            return Err(TransducerError::NoFrames);
        }
        let expected = frames * (targets.len() + 1) * (vocab + 1);
        if logits.len() != expected {
            return Err(TransducerError::ShapeMismatch { expected, found: logits.len() });
        }
        if let Some((position, &label)) = targets.iter().enumerate().find(|(_, &l)| l >= vocab) {
            return Err(TransducerError::InvalidLabel { label, position, vocab });
        }
        Ok(RnntLattice { frames, vocab, targets, logits })
    }

    /// Builds a lattice by log-softmaxing arbitrary activations per slice.
    pub fn from_activations(
        frames: usize,
        vocab: usize,
        targets: Vec<usize>,
        activations: &[f64],
    ) -> Result<Self, TransducerError> {
        let width = vocab + 1;
        if activations.len() % width != 0 {
            return Err(TransducerError::ShapeMismatch {
                expected: frames * (targets.len() + 1) * width,
                found: activations.len(),
            });
        }
        let logits = activations.chunks(width).flat_map(log_softmax).collect();
        Self::new(frames, vocab, targets, logits)
    }

    /// Standard-normal activations and uniformly random targets.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, frames: usize, target_len: usize, vocab: usize) -> Self {
        let targets: Vec<usize> = (0..target_len).map(|_| rng.random_range(0..vocab)).collect();
        let n = frames * (target_len + 1) * (vocab + 1);
        let acts: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        Self::from_activations(frames, vocab, targets, &acts).expect("random lattice is well formed")
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn target_len(&self) -> usize {
        self.targets.len()
    }

    pub fn vocab(&self) -> usize {
        self.vocab
    }

    pub fn blank(&self) -> usize {
        self.vocab
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn logits(&self) -> &[f64] {
        &self.logits
    }

    pub(crate) fn logits_mut(&mut self) -> &mut [f64] {
        &mut self.logits
    }

    pub fn index(&self, t: usize, u: usize, k: usize) -> usize {
        (t * (self.targets.len() + 1) + u) * (self.vocab + 1) + k
    }

    pub fn logit(&self, t: usize, u: usize, k: usize) -> f64 {
        self.logits[self.index(t, u, k)]
    }

    pub fn slice(&self, t: usize, u: usize) -> &[f64] {
        let start = self.index(t, u, 0);
        &self.logits[start..start + self.vocab + 1]
    }

    /// Log-probability of the blank transition out of node `(t, u)`.
    pub fn blank_logit(&self, t: usize, u: usize) -> f64 {
        self.logit(t, u, self.vocab)
    }

    /// Log-probability of emitting target `u + 1` (1-based) at node `(t, u)`.
    pub fn emit_logit(&self, t: usize, u: usize) -> f64 {
        self.logit(t, u, self.targets[u])
    }

    /// Parses the plain-text fixture: header `T U V`, then `T·(U+1)·(V+1)`
    /// row-major log-probabilities, then `U` target labels, all
    /// whitespace-separated.
    pub fn parse_fixture(text: &str) -> Result<Self, TransducerError> {
        let mut tokens = text.split_whitespace();
        let mut next_usize = |what: &str| -> Result<usize, TransducerError> {
            let tok = tokens.next().ok_or_else(|| TransducerError::Fixture(format!("missing {what}")))?;
            tok.parse().map_err(|_| TransducerError::Fixture(format!("bad {what} {tok:?}")))
        };
        let frames = next_usize("T")?;
        let target_len = next_usize("U")?;
        let vocab = next_usize("V")?;
        let n = frames * (target_len + 1) * (vocab + 1);
        let mut logits = Vec::with_capacity(n);
        for i in 0..n {
            let tok = tokens.next().ok_or_else(|| TransducerError::Fixture(format!("missing log-probability {i}")))?;
            logits.push(tok.parse().map_err(|_| TransducerError::Fixture(format!("bad log-probability {tok:?}")))?);
        }
        let mut targets = Vec::with_capacity(target_len);
        for i in 0..target_len {
            let tok = tokens.next().ok_or_else(|| TransducerError::Fixture(format!("missing label {i}")))?;
            targets.push(tok.parse().map_err(|_| TransducerError::Fixture(format!("bad label {tok:?}")))?);
        }
        if let Some(extra) = tokens.next() {
            return Err(TransducerError::Fixture(format!("trailing token {extra:?}")));
        }
        Self::new(frames, vocab, targets, logits)
    }

    pub fn to_fixture(&self) -> String {
        let mut s = format!("{} {} {}\n", self.frames, self.target_len(), self.vocab);
        for row in self.logits.chunks(self.vocab + 1) {
            let line: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
        let labels: Vec<String> = self.targets.iter().map(|l| l.to_string()).collect();
        let _ = writeln!(s, "{}", labels.join(" "));
        s
    }
}
