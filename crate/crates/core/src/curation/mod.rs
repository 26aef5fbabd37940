//! Pseudo-label filtering over JSON Lines manifests.
//!
//! Records pass through the stages in a fixed order: optional duration
//! bounds, language match, speech activity and silence, segmentation into
//! 7-20 s clips, then per-clip words-per-minute, confidence and blocklist
//! checks. The first stage that fails decides the rejection; all failures
//! inside that stage are reported.

mod filters;
mod pipeline;
mod segment;

pub use filters::{
    compute_wpm, filter_blocklist, filter_confidence, filter_duration, filter_language, filter_speech_and_silence,
    filter_wpm, mean_confidence,
};
pub use pipeline::{parse_manifest, run_pipeline, write_manifest, write_outcomes_csv, ManifestLine, PipelineOutput};
pub use segment::segment;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CurationError {
    #[error("curation: invalid config: {0}")]
    InvalidConfig(String),
    #[error("curation: record {id}: {msg}")]
    InvalidRecord { id: String, msg: String },
    #[error("curation: duration must be positive, got {0}")]
    NonPositiveDuration(f64),
    #[error("curation: blocklist pattern {pattern:?}: {source}")]
    Pattern { pattern: String, source: regex::Error },
    #[error("curation: {0}")]
    Csv(#[from] csv::Error),
    #[error("curation: {0}")]
    Json(#[from] serde_json::Error),
    #[error("curation: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectedLang {
    pub tag: String,
    pub confidence: f64,
}

/// One audio clip and its pseudo-label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestRecord {
    pub id: String,
    pub audio_path: String,
    pub duration_sec: f64,
    pub transcript: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub word_confidences: Option<Vec<f64>>,
    /// `(start, end)` in seconds from the start of this record's audio.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub word_times: Option<Vec<(f64, f64)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_lang: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detected_lang: Option<DetectedLang>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub speech_ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_silence_sec: Option<f64>,
    /// Set on clips cut out of a longer record.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offset_sec: Option<f64>,
}

impl ManifestRecord {
    pub fn new(id: impl Into<String>, audio_path: impl Into<String>, duration_sec: f64, transcript: impl Into<String>) -> Self {
        ManifestRecord {
            id: id.into(),
            audio_path: audio_path.into(),
            duration_sec,
            transcript: transcript.into(),
            word_confidences: None,
            word_times: None,
            source_lang: None,
            detected_lang: None,
            speech_ratio: None,
            max_silence_sec: None,
            parent_id: None,
            offset_sec: None,
        }
    }

    pub fn words(&self) -> Vec<&str> {
        self.transcript.split_whitespace().collect()
    }

    /// Checks the structural invariants: positive duration, per-word lists
    /// aligned with the transcript, values in range.
    pub fn validate(&self) -> Result<(), CurationError> {
        let bad = |msg: String| Err(CurationError::InvalidRecord { id: self.id.clone(), msg });
        if !(self.duration_sec > 0.0 && self.duration_sec.is_finite()) {
            return bad(format!("duration_sec must be positive, got {}", self.duration_sec));
        }
        let n = self.words().len();
        if let Some(c) = &self.word_confidences {
            if c.len() != n {
                return bad(format!("{} confidences for {n} words", c.len()));
            }
            if c.iter().any(|x| !(0.0..=1.0).contains(x)) {
                return bad("confidence outside [0, 1]".into());
            }
        }
        if let Some(t) = &self.word_times {
            if t.len() != n {
                return bad(format!("{} word times for {n} words", t.len()));
            }
            if t.iter().any(|&(s, e)| !(s.is_finite() && e.is_finite() && 0.0 <= s && s <= e)) {
                return bad("word time with start > end or negative start".into());
            }
            if t.windows(2).any(|w| w[1].0 < w[0].0) {
                return bad("word times are not in order".into());
            }
        }
        if let Some(d) = &self.detected_lang {
            if !(0.0..=1.0).contains(&d.confidence) {
                return bad("detected language confidence outside [0, 1]".into());
            }
        }
        if let Some(r) = self.speech_ratio {
            if !(0.0..=1.0).contains(&r) {
                return bad("speech_ratio outside [0, 1]".into());
            }
        }
        if let Some(s) = self.max_silence_sec {
            if !(s >= 0.0) {
                return bad("max_silence_sec is negative".into());
            }
        }
        Ok(())
    }
}

/// Filter thresholds. Boundary conventions: WpM bounds are inclusive,
/// confidence and speech ratio reject strictly below their minimum, silence
/// rejects strictly above its maximum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub wpm_min: f64,
    pub wpm_max: f64,
    pub conf_threshold: f64,
    pub min_speech_ratio: f64,
    pub max_silence_sec: f64,
    pub seg_min_sec: f64,
    pub seg_max_sec: f64,
    pub required_lang: String,
    pub lang_conf_min: f64,
    pub min_duration_sec: Option<f64>,
    pub max_duration_sec: Option<f64>,
    /// Regular expressions; a clip whose transcript matches any is rejected.
    pub blocklist: Vec<String>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            wpm_min: 50.0,
            wpm_max: 250.0,
            conf_threshold: 0.8,
            min_speech_ratio: 0.70,
            max_silence_sec: 5.0,
            seg_min_sec: 7.0,
            seg_max_sec: 20.0,
            required_lang: "en".into(),
            lang_conf_min: 0.5,
            min_duration_sec: None,
            max_duration_sec: None,
            blocklist: Vec::new(),
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<(), CurationError> {
        let bad = |m: &str| Err(CurationError::InvalidConfig(m.into()));
        if !(self.wpm_min >= 0.0 && self.wpm_min < self.wpm_max) {
            return bad("need 0 <= wpm_min < wpm_max");
        }
        if !(0.0..=1.0).contains(&self.conf_threshold) {
            return bad("conf_threshold must lie in [0, 1]");
        }
        if !(0.0..=1.0).contains(&self.min_speech_ratio) {
            return bad("min_speech_ratio must lie in [0, 1]");
        }
        if !(self.max_silence_sec >= 0.0) {
            return bad("max_silence_sec must be >= 0");
        }
        if !(self.seg_min_sec > 0.0 && self.seg_min_sec < self.seg_max_sec) {
            return bad("need 0 < seg_min_sec < seg_max_sec");
        }
        if !(0.0..=1.0).contains(&self.lang_conf_min) {
            return bad("lang_conf_min must lie in [0, 1]");
        }
        if let (Some(lo), Some(hi)) = (self.min_duration_sec, self.max_duration_sec) {
            if lo > hi {
                return bad("min_duration_sec exceeds max_duration_sec");
            }
        }
        for p in &self.blocklist {
            regex::Regex::new(p).map_err(|source| CurationError::Pattern { pattern: p.clone(), source })?;
        }
        Ok(())
    }
}

/// A failed check and the value that failed it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reason {
    pub filter: String,
    pub measured: String,
}

impl Reason {
    pub fn new(filter: &str, measured: impl Into<String>) -> Self {
        Reason { filter: filter.into(), measured: measured.into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Kept,
    Rejected,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Kept => "kept",
            Verdict::Rejected => "rejected",
        }
    }
}

/// Outcome of one input record. Kept records carry no reasons.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterOutcome {
    pub id: String,
    pub verdict: Verdict,
    pub reasons: Vec<Reason>,
}

impl FilterOutcome {
    pub fn kept(id: impl Into<String>) -> Self {
        FilterOutcome { id: id.into(), verdict: Verdict::Kept, reasons: Vec::new() }
    }

    pub fn rejected(id: impl Into<String>, reasons: Vec<Reason>) -> Self {
        debug_assert!(!reasons.is_empty());
        FilterOutcome { id: id.into(), verdict: Verdict::Rejected, reasons }
    }

    pub fn reason_ids(&self) -> Vec<&str> {
        self.reasons.iter().map(|r| r.filter.as_str()).collect()
    }
}

/// Result of a single check.
#[derive(Debug, Clone, PartialEq)]
pub enum Check {
    Pass,
    Fail(Vec<Reason>),
}

impl Check {
    pub fn passed(&self) -> bool {
        matches!(self, Check::Pass)
    }

    fn from_reasons(reasons: Vec<Reason>) -> Self {
        if reasons.is_empty() {
            Check::Pass
        } else {
            Check::Fail(reasons)
        }
    }
}
