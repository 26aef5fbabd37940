//! Self-check suite: forward DP against alignment enumeration, analytic
//! gradients against finite differences, decoder and mask identities.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::decode::{beam_decode, greedy_decode, BeamConfig, RandomTableScorer};
use super::lattice::{log_softmax, RnntLattice};
use super::loss::{brute_force_logprob, rnnt_grad, rnnt_grad_activations, ForwardBackward};
use super::mask::MaskSpec;

/// `|a − b| / max(|a|, |b|, 1e-6)`
pub fn relative_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-6)
}

/// Central difference of `−log P` with respect to stored entry `i`. With
/// `renormalize` the perturbed slice is pushed back through log-softmax,
/// which probes the activation-space gradient instead.
pub fn finite_difference(lat: &RnntLattice, i: usize, eps: f64, renormalize: bool) -> f64 {
    let width = lat.vocab() + 1;
    let eval = |delta: f64| {
        let mut l = lat.clone();
        l.logits_mut()[i] += delta;
        if renormalize {
            let base = i - i % width;
            let s = log_softmax(&l.logits()[base..base + width]);
            l.logits_mut()[base..base + width].copy_from_slice(&s);
        }
        -ForwardBackward::compute(&l).log_prob
    };
    (eval(eps) - eval(-eps)) / (2.0 * eps)
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleSuite {
    pub seed: u64,
    pub lattices: usize,
    pub max_frames: usize,
    pub max_targets: usize,
    pub max_vocab: usize,
    pub logprob_tolerance: f64,
    pub gradient_lattices: usize,
    pub fd_epsilon: f64,
    pub gradient_tolerance: f64,
    pub decoder_cases: usize,
    pub mask_max_frames: usize,
}

impl Default for OracleSuite {
    fn default() -> Self {
        OracleSuite {
            seed: 0,
            lattices: 1000,
            max_frames: 4,
            max_targets: 3,
            max_vocab: 3,
            logprob_tolerance: 1e-9,
            gradient_lattices: 20,
            fd_epsilon: 1e-5,
            gradient_tolerance: 1e-4,
            decoder_cases: 100,
            mask_max_frames: 64,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub cases: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: max deviation {:.3e} (tolerance {:.0e}, {} cases)",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.max_deviation,
            self.tolerance,
            self.cases
        )
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub checks: Vec<CheckResult>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for OracleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

fn result(name: &'static str, cases: usize, max_deviation: f64, tolerance: f64) -> CheckResult {
    CheckResult { name, cases, max_deviation, tolerance, passed: max_deviation <= tolerance }
}

impl OracleSuite {
    fn rng(&self, stream: u64, case: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream((stream << 32) | case as u64);
        rng
    }

    pub fn run(&self) -> OracleReport {
        OracleReport {
            checks: vec![
                self.check_logprob(),
                self.check_gradient(false),
                self.check_gradient(true),
                self.check_slice_sums(),
                self.check_beam_reduction(),
                self.check_mask(),
            ],
        }
    }

    fn random_lattice(&self, rng: &mut ChaCha8Rng) -> RnntLattice {
        let t = rng.random_range(1..=self.max_frames);
        let u = rng.random_range(0..=self.max_targets);
        let v = rng.random_range(1..=self.max_vocab);
        RnntLattice::random(rng, t, u, v)
    }

    /// Forward DP against brute-force enumeration, absolute log-space error.
    pub fn check_logprob(&self) -> CheckResult {
        let worst = (0..self.lattices)
            .into_par_iter()
            .map(|i| {
                let lat = self.random_lattice(&mut self.rng(1, i));
                let dp = ForwardBackward::compute(&lat).log_prob;
                match brute_force_logprob(&lat) {
                    Ok(bf) if dp <= 0.0 => (dp - bf).abs(),
                    _ => f64::INFINITY,
                }
            })
            .reduce(|| 0.0, f64::max);
        result("logprob-vs-brute-force", self.lattices, worst, self.logprob_tolerance)
    }

    /// Analytic gradient against central differences on `T=3, U=2, V=3`
    /// lattices, worst relative error.
    pub fn check_gradient(&self, activations: bool) -> CheckResult {
        let worst = (0..self.gradient_lattices)
            .into_par_iter()
            .map(|i| {
                let mut rng = self.rng(2, i);
                let lat = RnntLattice::random(&mut rng, 3, 2, 3);
                let g = if activations { rnnt_grad_activations(&lat) } else { rnnt_grad(&lat) };
                let Ok(g) = g else { return f64::INFINITY };
                (0..g.len())
                    .map(|k| relative_error(g[k], finite_difference(&lat, k, self.fd_epsilon, activations)))
                    .fold(0.0, f64::max)
            })
            .reduce(|| 0.0, f64::max);
        let name = if activations { "gradient-activations-vs-fd" } else { "gradient-logprobs-vs-fd" };
        result(name, self.gradient_lattices, worst, self.gradient_tolerance)
    }

    /// Activation-space gradient slices sum to zero.
    pub fn check_slice_sums(&self) -> CheckResult {
        let worst = (0..self.lattices)
            .into_par_iter()
            .map(|i| {
                let lat = self.random_lattice(&mut self.rng(3, i));
                let Ok(g) = rnnt_grad_activations(&lat) else { return f64::INFINITY };
                g.chunks(lat.vocab() + 1).map(|s| s.iter().sum::<f64>().abs()).fold(0.0, f64::max)
            })
            .reduce(|| 0.0, f64::max);
        result("activation-slice-sums", self.lattices, worst, 1e-12)
    }

    /// Width-1 beam with no LM against greedy decoding; deviation counts
    /// mismatching cases.
    pub fn check_beam_reduction(&self) -> CheckResult {
        let cfg = BeamConfig { beam_size: 1, lm_weight: 0.0, max_symbols_per_frame: 3 };
        let mismatches = (0..self.decoder_cases)
            .into_par_iter()
            .filter(|&i| {
                let mut rng = self.rng(4, i);
                let mut scorer = RandomTableScorer::new(rng.random(), rng.random_range(1..=4));
                scorer.blank_bias = rng.random_range(0.0..2.0);
                let frames = rng.random_range(1..=8);
                let g = greedy_decode(&scorer, frames, cfg.max_symbols_per_frame);
                match beam_decode(&scorer, None, frames, &cfg) {
                    Ok(b) => b.labels != g.labels,
                    Err(_) => true,
                }
            })
            .count();
        result("beam1-equals-greedy", self.decoder_cases, mismatches as f64, 0.0)
    }

    /// Exhaustive causality over frame counts up to `mask_max_frames`, plus
    /// the 11-frame receptive field arithmetic. Deviation counts failures.
    pub fn check_mask(&self) -> CheckResult {
        let mut failures = 0usize;
        let mut cases = 0usize;
        for n in 1..=self.mask_max_frames {
            for chunk in 1..=6 {
                for lc in 0..=2 {
                    cases += 1;
                    let ok = MaskSpec::uniform(n, chunk, 2, lc)
                        .build()
                        .map(|m| m.layers.iter().all(|l| l.is_causal()))
                        .unwrap_or(false);
                    failures += usize::from(!ok);
                }
            }
        }
        let rf = MaskSpec::uniform(self.mask_max_frames, 1, 10, 1).receptive_field(10);
        failures += usize::from(rf.frames != 11 || rf.ms != 880);
        result("stream-mask", cases + 1, failures as f64, 0.0)
    }
}
