//! Greedy and beam decoding against a joint-network callback.
//!
//! Within a frame a hypothesis may emit up to `max_symbols_per_frame` labels.
//! It leaves the frame either by taking blank (paying its log-probability)
//! or, once the cap is reached, by a forced advance that costs nothing. The
//! greedy decoder and the beam search share these semantics, which is what
//! makes a width-1 beam without LM fusion identical to greedy decoding.

use std::hash::{Hash, Hasher};

use super::lattice::log_softmax;
use super::lm::NgramLm;
use super::TransducerError;

/// Log-probabilities over `num_labels()` labels plus blank (last index) at
/// frame `t`, given the labels emitted so far.
pub trait JointScorer {
    fn num_labels(&self) -> usize;
    fn log_probs(&self, t: usize, prefix: &[usize]) -> Vec<f64>;

    fn blank(&self) -> usize {
        self.num_labels()
    }
}

/// Wraps a closure as a [`JointScorer`].
pub struct FnScorer<F> {
    pub num_labels: usize,
    pub f: F,
}

impl<F: Fn(usize, &[usize]) -> Vec<f64>> JointScorer for FnScorer<F> {
    fn num_labels(&self) -> usize {
        self.num_labels
    }

    fn log_probs(&self, t: usize, prefix: &[usize]) -> Vec<f64> {
        (self.f)(t, prefix)
    }
}

/// Deterministic pseudo-random scorer: each `(t, prefix)` gets its own
/// normalized distribution derived from a seed. A stand-in for a joint
/// network when exercising decoders.
#[derive(Debug, Clone)]
pub struct RandomTableScorer {
    pub seed: u64,
    pub num_labels: usize,
    /// Added to the blank activation; positive values favour blank.
    pub blank_bias: f64,
    /// Multiplies all activations; larger values sharpen the distributions.
    pub temperature: f64,
}

impl RandomTableScorer {
    pub fn new(seed: u64, num_labels: usize) -> Self {
        RandomTableScorer { seed, num_labels, blank_bias: 0.0, temperature: 2.0 }
    }
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

impl JointScorer for RandomTableScorer {
    fn num_labels(&self) -> usize {
        self.num_labels
    }

    fn log_probs(&self, t: usize, prefix: &[usize]) -> Vec<f64> {
        // FNV-1a over the key keeps the table stable across platforms.
        struct Fnv(u64);
        impl Hasher for Fnv {
            fn finish(&self) -> u64 {
                self.0
            }
            fn write(&mut self, bytes: &[u8]) {
                for b in bytes {
                    self.0 = (self.0 ^ u64::from(*b)).wrapping_mul(0x100_0000_01b3);
                }
            }
        }
        let mut h = Fnv(0xcbf2_9ce4_8422_2325);
        self.seed.hash(&mut h);
        (t as u64).hash(&mut h);
        for &p in prefix {
            (p as u64).hash(&mut h);
        }
        let mut state = h.finish();
        let acts: Vec<f64> = (0..=self.num_labels)
            .map(|k| {
                state = splitmix(state);
                let unit = (state >> 11) as f64 / (1u64 << 53) as f64;
                let bias = if k == self.num_labels { self.blank_bias } else { 0.0 };
                self.temperature * (unit * 2.0 - 1.0) + bias
            })
            .collect();
        log_softmax(&acts)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decoded {
    pub labels: Vec<usize>,
    /// Probability of each emitted label at the moment it was chosen.
    pub confidences: Vec<f64>,
    /// Model log-probability plus `λ · log P_LM` along the chosen path.
    pub score: f64,
}

fn argmax(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate() {
        if x > xs[best] {
            best = i;
        }
    }
    best
}

/// Emit the most probable symbol while it is not blank, up to
/// `max_symbols_per_frame` per frame, then advance. Ties go to the lower
/// index.
pub fn greedy_decode<S: JointScorer + ?Sized>(scorer: &S, frames: usize, max_symbols_per_frame: usize) -> Decoded {
    let blank = scorer.blank();
    let mut out = Decoded { labels: Vec::new(), confidences: Vec::new(), score: 0.0 };
    for t in 0..frames {
        let mut emitted = 0;
        while emitted < max_symbols_per_frame {
            let lp = scorer.log_probs(t, &out.labels);
            let k = argmax(&lp);
            out.score += lp[k];
            if k == blank {
                break;
            }
            out.labels.push(k);
            out.confidences.push(lp[k].exp());
            emitted += 1;
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct BeamConfig {
    pub beam_size: usize,
    /// Shallow-fusion weight on the external LM.
    pub lm_weight: f64,
    pub max_symbols_per_frame: usize,
}

impl Default for BeamConfig {
    fn default() -> Self {
        BeamConfig { beam_size: 3, lm_weight: 0.0, max_symbols_per_frame: 10 }
    }
}

#[derive(Debug, Clone)]
struct Hyp {
    labels: Vec<usize>,
    confidences: Vec<f64>,
    score: f64,
    emitted: usize,
}

/// Frame-synchronous beam search with optional n-gram shallow fusion.
///
/// Each expansion step scores every continuation of every open hypothesis
/// (labels in index order, then blank), and the pool is cut to `beam_size`
/// jointly across finished and open candidates. The LM term
/// `λ · log P_LM(label | history)` is added at every label expansion.
pub fn beam_decode<S: JointScorer + ?Sized>(
    scorer: &S,
    lm: Option<&NgramLm>,
    frames: usize,
    cfg: &BeamConfig,
) -> Result<Decoded, TransducerError> {
    if cfg.beam_size == 0 {
        return Err(TransducerError::InvalidParameter("beam_size must be >= 1".into()));
    }
    if !(cfg.lm_weight >= 0.0) {
        return Err(TransducerError::InvalidParameter("lm_weight must be >= 0".into()));
    }
    if let Some(lm) = lm {
        if lm.vocab_size() != scorer.num_labels() {
            return Err(TransducerError::DimensionMismatch { expected: scorer.num_labels(), found: lm.vocab_size() });
        }
    }
    let blank = scorer.blank();
    let lm_term = |history: &[usize], k: usize| -> f64 {
        match lm {
            Some(lm) if cfg.lm_weight > 0.0 => cfg.lm_weight * lm.log_cond_labels(history, k),
            _ => 0.0,
        }
    };

    let mut beam = vec![Hyp { labels: Vec::new(), confidences: Vec::new(), score: 0.0, emitted: 0 }];
    for t in 0..frames {
        let mut open: Vec<Hyp> = beam.into_iter().map(|h| Hyp { emitted: 0, ..h }).collect();
        let mut finished: Vec<Hyp> = Vec::new();
        while !open.is_empty() {
            // (hypothesis, leaves the frame)
            let mut pool: Vec<(Hyp, bool)> = Vec::new();
            for h in &open {
                if h.emitted >= cfg.max_symbols_per_frame {
                    pool.push((h.clone(), true));
                    continue;
                }
                let lp = scorer.log_probs(t, &h.labels);
                for (k, &lpk) in lp.iter().enumerate().take(blank) {
                    let mut labels = h.labels.clone();
                    labels.push(k);
                    let mut confidences = h.confidences.clone();
                    confidences.push(lpk.exp());
                    let emitted = h.emitted + 1;
                    let score = h.score + lpk + lm_term(&h.labels, k);
                    pool.push((Hyp { labels, confidences, score, emitted }, emitted >= cfg.max_symbols_per_frame));
                }
                pool.push((Hyp { score: h.score + lp[blank], ..h.clone() }, true));
            }
            pool.sort_by(|a, b| b.0.score.total_cmp(&a.0.score));
            pool.truncate(cfg.beam_size);
            open.clear();
            for (h, leaves) in pool {
                if leaves {
                    finished.push(h);
                } else {
                    open.push(h);
                }
            }
        }
        finished.sort_by(|a, b| b.score.total_cmp(&a.score));
        finished.truncate(cfg.beam_size);
        beam = finished;
    }
    let best = beam.into_iter().next().expect("beam is never empty");
    Ok(Decoded { labels: best.labels, confidences: best.confidences, score: best.score })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(rows: Vec<(usize, Vec<usize>, Vec<f64>)>, num_labels: usize) -> impl JointScorer {
        FnScorer {
            num_labels,
            f: move |t: usize, prefix: &[usize]| {
                rows.iter()
                    .find(|(rt, rp, _)| *rt == t && rp.as_slice() == prefix)
                    .map(|(_, _, p)| p.iter().map(|x| x.ln()).collect())
                    .unwrap_or_else(|| {
                        let mut v = vec![f64::NEG_INFINITY; num_labels + 1];
                        v[num_labels] = 0.0;
                        v
                    })
            },
        }
    }

    #[test]
    fn always_blank_gives_empty() {
        let s = FnScorer { num_labels: 3, f: |_: usize, _: &[usize]| log_softmax(&[0.0, 0.0, 0.0, 5.0]) };
        let d = greedy_decode(&s, 5, 10);
        assert!(d.labels.is_empty());
    }

    #[test]
    fn spells_table_sequence() {
        // frame 0: emit 2 then 0; frame 1: emit 1; blanks elsewhere.
        let s = table(
            vec![
                (0, vec![], vec![0.1, 0.1, 0.7, 0.1]),
                (0, vec![2], vec![0.6, 0.1, 0.1, 0.2]),
                (0, vec![2, 0], vec![0.1, 0.1, 0.1, 0.7]),
                (1, vec![2, 0], vec![0.1, 0.8, 0.0, 0.1]),
                (1, vec![2, 0, 1], vec![0.1, 0.1, 0.1, 0.7]),
            ],
            3,
        );
        let d = greedy_decode(&s, 3, 10);
        assert_eq!(d.labels, vec![2, 0, 1]);
        let expected = [0.7, 0.6, 0.8];
        for (c, e) in d.confidences.iter().zip(expected) {
            assert!((c - e).abs() < 1e-12);
        }
    }

    #[test]
    fn symbol_cap_binds() {
        let s = FnScorer { num_labels: 2, f: |_: usize, _: &[usize]| log_softmax(&[3.0, 1.0, 0.0]) };
        let d = greedy_decode(&s, 7, 1);
        assert_eq!(d.labels, vec![0; 7]);
        let d = greedy_decode(&s, 2, 4);
        assert_eq!(d.labels.len(), 8);
    }

    #[test]
    fn beam_width_one_is_greedy() {
        for seed in 0..200 {
            let mut s = RandomTableScorer::new(seed, 3);
            s.blank_bias = 0.8;
            let g = greedy_decode(&s, 6, 3);
            let b = beam_decode(&s, None, 6, &BeamConfig { beam_size: 1, lm_weight: 0.0, max_symbols_per_frame: 3 })
                .unwrap();
            assert_eq!(g.labels, b.labels, "seed {seed}");
            assert!((g.score - b.score).abs() < 1e-12);
        }
    }

    #[test]
    fn wider_beam_never_scores_worse_on_two_frames() {
        for seed in 0..50 {
            let s = RandomTableScorer::new(seed, 2);
            let cfg = |b| BeamConfig { beam_size: b, lm_weight: 0.0, max_symbols_per_frame: 1 };
            let narrow = beam_decode(&s, None, 2, &cfg(1)).unwrap();
            let wide = beam_decode(&s, None, 2, &cfg(3)).unwrap();
            assert!(wide.score >= narrow.score - 1e-12);
        }
    }

    #[test]
    fn rejects_bad_config() {
        let s = RandomTableScorer::new(0, 2);
        assert!(beam_decode(&s, None, 2, &BeamConfig { beam_size: 0, ..Default::default() }).is_err());
        assert!(beam_decode(&s, None, 2, &BeamConfig { lm_weight: -1.0, ..Default::default() }).is_err());
        let lm = NgramLm::uniform(1, 0.01, 5).unwrap();
        assert!(matches!(
            beam_decode(&s, Some(&lm), 2, &BeamConfig::default()),
            Err(TransducerError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn random_scorer_is_normalized_and_stable() {
        let s = RandomTableScorer::new(42, 4);
        let a = s.log_probs(3, &[1, 2]);
        assert_eq!(a, s.log_probs(3, &[1, 2]));
        assert_ne!(a, s.log_probs(3, &[2, 1]));
        assert!((a.iter().map(|x| x.exp()).sum::<f64>() - 1.0).abs() < 1e-12);
    }
}
