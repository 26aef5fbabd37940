//! Reference RNN-T math.
//!
//! A transducer scores an alignment `z` between `T` acoustic frames and `U`
//! target labels as a product of per-step joint-network outputs, each
//! conditioned on the current frame and on the labels emitted so far:
//!
//! ```text
//! P(y | x) = Σ_{z ∈ align(y)} Π_i P(z_i | x, t_i, labels(z_1..z_{i-1}))
//! ```
//!
//! The joint network itself is out of scope here. [`RnntLattice`] holds its
//! log-softmax outputs for every `(t, u)` lattice node, and everything else
//! (loss, gradients, decoding) works on top of that table or on a
//! [`JointScorer`] callback.

mod check;
mod decode;
mod ema;
mod lattice;
mod lm;
mod loss;
mod mask;

pub use check::{finite_difference, relative_error, CheckResult, OracleReport, OracleSuite};
pub use decode::{beam_decode, greedy_decode, BeamConfig, Decoded, FnScorer, JointScorer, RandomTableScorer};
pub use ema::{EmaState, DEFAULT_EMA_DECAY};
pub use lattice::{log_softmax, logaddexp, logsumexp, RnntLattice, NORMALIZATION_TOLERANCE};
pub use lm::{NgramLm, Vocab};
pub use loss::{
    brute_force_logprob, rnnt_grad, rnnt_grad_activations, rnnt_logprob, ForwardBackward, BRUTE_FORCE_MAX_T,
    BRUTE_FORCE_MAX_U,
};
pub use mask::{AttentionMask, MaskSpec, ReceptiveField, StreamMask};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum TransducerError {
    #[error("transducer: lattice has no frames")]
    NoFrames,
    #[error("transducer: expected {expected} log-probabilities, found {found}")]
    ShapeMismatch { expected: usize, found: usize },
    #[error("transducer: slice (t={t}, u={u}) is not normalized (logsumexp = {lse})")]
    NotNormalized { t: usize, u: usize, lse: f64 },
    #[error("transducer: label {label} at position {position} is outside vocabulary of size {vocab}")]
    InvalidLabel { label: usize, position: usize, vocab: usize },
    #[error("transducer: brute force limited to T <= {max_t}, U <= {max_u} (got T={t}, U={u})")]
    TooLarge { t: usize, u: usize, max_t: usize, max_u: usize },
    #[error("transducer: dimension mismatch ({expected} vs {found})")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("transducer: invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("transducer: fixture: {0}")]
    Fixture(String),
}
