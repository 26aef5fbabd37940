//! Exact transducer likelihood by dynamic programming, its gradients, and a
//! brute-force alignment enumerator for checking both.
//!
//! Lattice node `(t, u)` means "at frame `t`, `u` labels emitted". Blank
//! moves to `(t+1, u)`; emitting the next target moves to `(t, u+1)`. Every
//! alignment ends with the blank out of `(T-1, U)`.

use super::lattice::{logaddexp, logsumexp, RnntLattice};
use super::TransducerError;

pub const BRUTE_FORCE_MAX_T: usize = 6;
pub const BRUTE_FORCE_MAX_U: usize = 4;

/// Forward and backward variables over the `T × (U+1)` grid.
#[derive(Debug, Clone)]
pub struct ForwardBackward {
    width: usize,
    /// `alpha[t][u]`: log-mass of all prefixes reaching `(t, u)`.
    pub alpha: Vec<f64>,
    /// `beta[t][u]`: log-mass of all suffixes from `(t, u)` to the end.
    pub beta: Vec<f64>,
    pub log_prob: f64,
}

impl ForwardBackward {
    pub fn compute(lat: &RnntLattice) -> Self {
        let (frames, target_len) = (lat.frames(), lat.target_len());
        let width = target_len + 1;
        let mut alpha = vec![f64::NEG_INFINITY; frames * width];
        alpha[0] = 0.0;
        for t in 0..frames {
            for u in 0..width {
                if t == 0 && u == 0 {
                    continue;
                }
                let from_blank =
                    if t > 0 { alpha[(t - 1) * width + u] + lat.blank_logit(t - 1, u) } else { f64::NEG_INFINITY };
                let from_emit =
                    if u > 0 { alpha[t * width + u - 1] + lat.emit_logit(t, u - 1) } else { f64::NEG_INFINITY };
                alpha[t * width + u] = logaddexp(from_blank, from_emit);
            }
        }
        let log_prob = alpha[(frames - 1) * width + target_len] + lat.blank_logit(frames - 1, target_len);

        let mut beta = vec![f64::NEG_INFINITY; frames * width];
        for t in (0..frames).rev() {
            for u in (0..width).rev() {
                let blank_next = if t + 1 < frames {
                    beta[(t + 1) * width + u]
                } else if u == target_len {
                    0.0
                } else {
                    f64::NEG_INFINITY
                };
                let via_blank = lat.blank_logit(t, u) + blank_next;
                let via_emit =
                    if u < target_len { lat.emit_logit(t, u) + beta[t * width + u + 1] } else { f64::NEG_INFINITY };
                beta[t * width + u] = logaddexp(via_blank, via_emit);
            }
        }
        ForwardBackward { width, alpha, beta, log_prob }
    }

    pub fn alpha_at(&self, t: usize, u: usize) -> f64 {
        self.alpha[t * self.width + u]
    }

    pub fn beta_at(&self, t: usize, u: usize) -> f64 {
        self.beta[t * self.width + u]
    }
}

/// `log P(y | x)` by the forward recursion.
pub fn rnnt_logprob(lat: &RnntLattice) -> Result<f64, TransducerError> {
    if lat.frames() == 0 {
        return Err(TransducerError::NoFrames);
    }
    Ok(ForwardBackward::compute(lat).log_prob)
}

/// `log P(y | x)` by listing every alignment and multiplying its factors.
pub fn brute_force_logprob(lat: &RnntLattice) -> Result<f64, TransducerError> {
    let (frames, target_len) = (lat.frames(), lat.target_len());
    if frames > BRUTE_FORCE_MAX_T || target_len > BRUTE_FORCE_MAX_U {
        return Err(TransducerError::TooLarge {
            t: frames,
            u: target_len,
            max_t: BRUTE_FORCE_MAX_T,
            max_u: BRUTE_FORCE_MAX_U,
        });
    }
    if frames == 0 {
        return Err(TransducerError::NoFrames);
    }
    let mut path_scores = Vec::new();
    // An alignment is T+U symbols, T of them blank, the last one blank.
    // Choose which of the first T+U-1 positions carry the U labels.
    let len = frames + target_len;
    for mask in 0u32..(1 << (len - 1)) {
        if mask.count_ones() as usize != target_len {
            continue;
        }
        let (mut t, mut u, mut score) = (0usize, 0usize, 0.0f64);
        for pos in 0..len {
            let is_label = pos < len - 1 && mask & (1 << pos) != 0;
            if is_label {
                score += lat.logit(t, u, lat.targets()[u]);
                u += 1;
            } else {
                score += lat.logit(t, u, lat.blank());
                t += 1;
            }
        }
        debug_assert_eq!((t, u), (frames, target_len));
        path_scores.push(score);
    }
    Ok(logsumexp(&path_scores))
}

/// `∂(-log P) / ∂ logit(t, u, k)`, treating each stored log-probability as an
/// independent input. Only blank and the next target label at each node get
/// non-zero entries.
pub fn rnnt_grad(lat: &RnntLattice) -> Result<Vec<f64>, TransducerError> {
    if lat.frames() == 0 {
        return Err(TransducerError::NoFrames);
    }
    let fb = ForwardBackward::compute(lat);
    Ok(logprob_grad(lat, &fb))
}

fn logprob_grad(lat: &RnntLattice, fb: &ForwardBackward) -> Vec<f64> {
    let (frames, target_len) = (lat.frames(), lat.target_len());
    let mut grad = vec![0.0; lat.logits().len()];
    if fb.log_prob == f64::NEG_INFINITY {
        return grad;
    }
    for t in 0..frames {
        for u in 0..=target_len {
            let a = fb.alpha_at(t, u);
            if a == f64::NEG_INFINITY {
                continue;
            }
            let blank_next = if t + 1 < frames {
                fb.beta_at(t + 1, u)
            } else if u == target_len {
                0.0
            } else {
                f64::NEG_INFINITY
            };
            grad[lat.index(t, u, lat.blank())] = -(a + lat.blank_logit(t, u) + blank_next - fb.log_prob).exp();
            if u < target_len {
                let k = lat.targets()[u];
                grad[lat.index(t, u, k)] = -(a + lat.emit_logit(t, u) + fb.beta_at(t, u + 1) - fb.log_prob).exp();
            }
        }
    }
    grad
}

/// `∂(-log P) / ∂ z(t, u, k)` where each slice is `log_softmax(z)`.
///
/// Equals `occupancy(t, u) · p(t, u, k)` minus the posterior of the
/// transition actually taken through `k`, so every slice sums to zero.
pub fn rnnt_grad_activations(lat: &RnntLattice) -> Result<Vec<f64>, TransducerError> {
    if lat.frames() == 0 {
        return Err(TransducerError::NoFrames);
    }
    let fb = ForwardBackward::compute(lat);
    let mut grad = logprob_grad(lat, &fb);
    if fb.log_prob == f64::NEG_INFINITY {
        return Ok(grad);
    }
    let width = lat.vocab() + 1;
    for t in 0..lat.frames() {
        for u in 0..=lat.target_len() {
            let occupancy = (fb.alpha_at(t, u) + fb.beta_at(t, u) - fb.log_prob).exp();
            if occupancy == 0.0 {
                continue;
            }
            let base = lat.index(t, u, 0);
            for k in 0..width {
                grad[base + k] += occupancy * lat.logits()[base + k].exp();
            }
        }
    }
    Ok(grad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transducer::check::{finite_difference, relative_error};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn uniform(frames: usize, target_len: usize, vocab: usize, targets: Vec<usize>) -> RnntLattice {
        let p = -((vocab + 1) as f64).ln();
        RnntLattice::new(frames, vocab, targets, vec![p; frames * (target_len + 1) * (vocab + 1)]).unwrap()
    }

    #[test]
    fn single_forced_alignment() {
        let lat = RnntLattice::new(1, 2, vec![], vec![0.2f64.ln(), 0.3f64.ln(), 0.5f64.ln()]).unwrap();
        assert!((rnnt_logprob(&lat).unwrap() - 0.5f64.ln()).abs() < 1e-15);
        assert!((brute_force_logprob(&lat).unwrap() - 0.5f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn uniform_two_frames_one_label() {
        // Alignments: [y, ∅, ∅] and [∅, y, ∅], each (1/2)^3.
        let lat = uniform(2, 1, 1, vec![0]);
        let expected = (2.0 * 0.125f64).ln();
        assert!((rnnt_logprob(&lat).unwrap() - expected).abs() < 1e-12);
        assert!((brute_force_logprob(&lat).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn alignment_count_matches_binomial() {
        // Uniform lattice: P = C(T+U-1, U) · (V+1)^-(T+U).
        for (t, u) in [(1, 0), (1, 3), (3, 2), (4, 3), (6, 4)] {
            let lat = uniform(t, u, 2, vec![1; u]);
            let count = binomial(t + u - 1, u) as f64;
            let expected = count.ln() - ((t + u) as f64) * 3f64.ln();
            assert!((brute_force_logprob(&lat).unwrap() - expected).abs() < 1e-12, "T={t} U={u}");
            assert!((rnnt_logprob(&lat).unwrap() - expected).abs() < 1e-12, "T={t} U={u}");
        }
    }

    fn binomial(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn forward_equals_backward() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let lat = RnntLattice::random(&mut rng, 5, 3, 4);
            let fb = ForwardBackward::compute(&lat);
            assert!((fb.beta_at(0, 0) - fb.log_prob).abs() < 1e-12);
            assert!(fb.log_prob <= 0.0);
        }
    }

    #[test]
    fn brute_force_guard() {
        let lat = uniform(7, 0, 1, vec![]);
        assert!(matches!(brute_force_logprob(&lat), Err(TransducerError::TooLarge { .. })));
        let lat = uniform(1, 5, 1, vec![0; 5]);
        assert!(matches!(brute_force_logprob(&lat), Err(TransducerError::TooLarge { .. })));
    }

    #[test]
    fn deterministic_single_path_has_zero_logprob() {
        // T=2, U=1: label at frame 0 with certainty, then blanks.
        let ni = f64::NEG_INFINITY;
        let logits = vec![
            0.0, ni, // (0,0): emit label 0
            ni, 0.0, // (0,1): blank
            ni, 0.0, // (1,0): unreachable in practice
            ni, 0.0, // (1,1): blank
        ];
        let lat = RnntLattice::new(2, 1, vec![0], logits).unwrap();
        assert_eq!(rnnt_logprob(&lat).unwrap(), 0.0);
        assert_eq!(brute_force_logprob(&lat).unwrap(), 0.0);
    }

    #[test]
    fn unreachable_cells_have_zero_gradient() {
        // Label emission at frame 0 is impossible, so (0, 1) is never visited.
        let ni = f64::NEG_INFINITY;
        let h = 0.5f64.ln();
        let logits = vec![
            ni, 0.0, // (0,0)
            h, h, // (0,1): unreachable
            h, h, // (1,0)
            h, h, // (1,1)
        ];
        let lat = RnntLattice::new(2, 1, vec![0], logits).unwrap();
        let g = rnnt_grad(&lat).unwrap();
        let ga = rnnt_grad_activations(&lat).unwrap();
        for k in 0..2 {
            assert_eq!(g[lat.index(0, 1, k)], 0.0);
            assert_eq!(ga[lat.index(0, 1, k)], 0.0);
        }
        assert!((rnnt_logprob(&lat).unwrap() - (0.5f64 * 0.5).ln()).abs() < 1e-15);
    }

    #[test]
    fn gradients_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let lat = RnntLattice::random(&mut rng, 3, 2, 3);
            let g = rnnt_grad(&lat).unwrap();
            let ga = rnnt_grad_activations(&lat).unwrap();
            for i in 0..g.len() {
                let fd = finite_difference(&lat, i, 1e-5, false);
                let fda = finite_difference(&lat, i, 1e-5, true);
                assert!(relative_error(g[i], fd) <= 1e-4, "logprob grad {i}: {} vs {fd}", g[i]);
                assert!(relative_error(ga[i], fda) <= 1e-4, "act grad {i}: {} vs {fda}", ga[i]);
            }
        }
    }

    #[test]
    fn activation_gradient_slices_sum_to_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let lat = RnntLattice::random(&mut rng, 4, 3, 3);
        let ga = rnnt_grad_activations(&lat).unwrap();
        for row in ga.chunks(lat.vocab() + 1) {
            assert!(row.iter().sum::<f64>().abs() < 1e-12);
        }
    }
}
