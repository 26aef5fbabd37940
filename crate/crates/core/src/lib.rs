//! Tools for building and evaluating speech recognizers.
//!
//! The pieces are independent and can be used on their own:
//!
//! * [`textnorm`] normalizes transcripts before scoring.
//! * [`metrics`] computes WER, string similarities, proper-noun scores and
//!   length-weighted aggregates.
//! * [`curation`] filters and segments pseudo-labelled training manifests.
//! * [`noiselab`] mixes noise at exact SNRs and sweeps WER against SNR.
//! * [`stitch`] chunks long audio and joins the chunk transcripts.
//! * [`transducer`] has the RNN-T loss and gradients, greedy and beam
//!   decoding with n-gram fusion, and streaming attention masks.
//! * [`planner`] sizes a training set for a parameter count.
//!
//! ```
//! use asrlab::metrics::wer;
//! use asrlab::textnorm::{normalize, tokenize_words, NormRuleSet};
//!
//! let rules = NormRuleSet::default();
//! let r = tokenize_words(&normalize("There's a cat.", &rules));
//! let h = tokenize_words(&normalize("there is a hat", &rules));
//! assert_eq!(wer(&r, &h).unwrap(), 0.25);
//! ```

pub mod curation;
pub mod metrics;
pub mod noiselab;
pub mod planner;
pub mod seed;
pub mod stitch;
pub mod textnorm;
pub mod transducer;
