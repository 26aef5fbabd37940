use regex::Regex;

use super::{Check, CurationError, ManifestRecord, PipelineConfig, Reason};

// Slack for values that sit exactly on a threshold but pick up rounding
// error on the way (a mean of n copies of 0.8, 10 words over 12 s).
const EPS: f64 = 1e-9;

/// Words per minute: `word_count / (duration_sec / 60)`.
pub fn compute_wpm(transcript: &str, duration_sec: f64) -> Result<f64, CurationError> {
    if !(duration_sec > 0.0 && duration_sec.is_finite()) {
        return Err(CurationError::NonPositiveDuration(duration_sec));
    }
    let words = transcript.split_whitespace().count();
    Ok(words as f64 * 60.0 / duration_sec)
}

pub fn filter_wpm(rec: &ManifestRecord, cfg: &PipelineConfig) -> Result<Check, CurationError> {
    let wpm = compute_wpm(&rec.transcript, rec.duration_sec)?;
    let ok = wpm >= cfg.wpm_min - EPS && wpm <= cfg.wpm_max + EPS;
    Ok(Check::from_reasons(if ok { vec![] } else { vec![Reason::new("wpm", format!("{wpm:.3}"))] }))
}

pub fn mean_confidence(confidences: &[f64]) -> Option<f64> {
    if confidences.is_empty() {
        return None;
    }
    Some(confidences.iter().sum::<f64>() / confidences.len() as f64)
}

/// Passes when the mean word confidence is at least `conf_threshold`.
/// Missing (or empty) confidences reject with `missing-confidence`.
pub fn filter_confidence(rec: &ManifestRecord, cfg: &PipelineConfig) -> Check {
    match rec.word_confidences.as_deref().and_then(mean_confidence) {
        None => Check::Fail(vec![Reason::new("missing-confidence", "word_confidences")]),
        Some(m) if m < cfg.conf_threshold - EPS => Check::Fail(vec![Reason::new("confidence", format!("{m:.4}"))]),
        Some(_) => Check::Pass,
    }
}

/// Both conditions are evaluated so a record failing both reports both.
pub fn filter_speech_and_silence(rec: &ManifestRecord, cfg: &PipelineConfig) -> Check {
    let (Some(ratio), Some(silence)) = (rec.speech_ratio, rec.max_silence_sec) else {
        let mut missing = Vec::new();
        if rec.speech_ratio.is_none() {
            missing.push("speech_ratio");
        }
        if rec.max_silence_sec.is_none() {
            missing.push("max_silence_sec");
        }
        return Check::Fail(vec![Reason::new("not-evaluable", missing.join("+"))]);
    };
    let mut reasons = Vec::new();
    if ratio < cfg.min_speech_ratio - EPS {
        reasons.push(Reason::new("speech-ratio", format!("{ratio:.4}")));
    }
    if silence > cfg.max_silence_sec + EPS {
        reasons.push(Reason::new("silence", format!("{silence:.3}")));
    }
    Check::from_reasons(reasons)
}

pub fn filter_language(rec: &ManifestRecord, cfg: &PipelineConfig) -> Check {
    let Some(det) = &rec.detected_lang else {
        return Check::Fail(vec![Reason::new("not-evaluable", "detected_lang")]);
    };
    let source_ok = rec.source_lang.as_deref().is_none_or(|s| s == det.tag);
    if det.tag == cfg.required_lang && det.confidence >= cfg.lang_conf_min - EPS && source_ok {
        return Check::Pass;
    }
    let mut measured = format!("detected={}:{:.3}", det.tag, det.confidence);
    if let Some(s) = &rec.source_lang {
        measured.push_str(&format!(" source={s}"));
    }
    Check::Fail(vec![Reason::new("language", measured)])
}

pub fn filter_duration(rec: &ManifestRecord, cfg: &PipelineConfig) -> Check {
    let d = rec.duration_sec;
    let low = cfg.min_duration_sec.is_some_and(|m| d < m);
    let high = cfg.max_duration_sec.is_some_and(|m| d > m);
    Check::from_reasons(if low || high { vec![Reason::new("duration", format!("{d:.3}"))] } else { vec![] })
}

pub fn filter_blocklist(rec: &ManifestRecord, patterns: &[Regex]) -> Check {
    match patterns.iter().find(|p| p.is_match(&rec.transcript)) {
        Some(p) => Check::Fail(vec![Reason::new("blocklist", p.as_str())]),
        None => Check::Pass,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curation::DetectedLang;

    fn rec(words: usize, dur: f64) -> ManifestRecord {
        ManifestRecord::new("r", "r.wav", dur, vec!["w"; words].join(" "))
    }

    #[test]
    fn wpm_values() {
        assert_eq!(compute_wpm(&vec!["w"; 120].join(" "), 60.0).unwrap(), 120.0);
        assert_eq!(compute_wpm(&vec!["w"; 25].join(" "), 60.0).unwrap(), 25.0);
        assert_eq!(compute_wpm("", 60.0).unwrap(), 0.0);
        assert!(compute_wpm("a", 0.0).is_err());
        assert!(compute_wpm("a", -1.0).is_err());
    }

    #[test]
    fn wpm_bounds_inclusive() {
        let cfg = PipelineConfig::default();
        assert!(filter_wpm(&rec(10, 12.0), &cfg).unwrap().passed()); // exactly 50
        assert!(filter_wpm(&rec(50, 12.0), &cfg).unwrap().passed()); // exactly 250
        assert!(!filter_wpm(&rec(9, 12.0), &cfg).unwrap().passed());
        assert!(!filter_wpm(&rec(51, 12.0), &cfg).unwrap().passed());
        assert!(!filter_wpm(&rec(0, 12.0), &cfg).unwrap().passed());
    }

    #[test]
    fn confidence_cases() {
        let cfg = PipelineConfig::default();
        let mut r = rec(3, 10.0);
        r.word_confidences = Some(vec![0.9; 3]);
        assert!(filter_confidence(&r, &cfg).passed());
        r.word_confidences = Some(vec![0.79; 3]);
        assert_eq!(filter_confidence(&r, &cfg), Check::Fail(vec![Reason::new("confidence", "0.7900")]));
        r.word_confidences = Some(vec![1.0]);
        assert!(filter_confidence(&r, &cfg).passed());
        r.word_confidences = None;
        assert_eq!(
            filter_confidence(&r, &cfg),
            Check::Fail(vec![Reason::new("missing-confidence", "word_confidences")])
        );
        for n in 1..200 {
            r.word_confidences = Some(vec![0.8; n]);
            assert!(filter_confidence(&r, &cfg).passed(), "n={n}");
        }
    }

    #[test]
    fn speech_and_silence_cases() {
        let cfg = PipelineConfig::default();
        let mut r = rec(3, 10.0);
        assert!(!filter_speech_and_silence(&r, &cfg).passed());
        r.speech_ratio = Some(0.69);
        r.max_silence_sec = Some(0.0);
        assert!(!filter_speech_and_silence(&r, &cfg).passed());
        r.speech_ratio = Some(0.70);
        assert!(filter_speech_and_silence(&r, &cfg).passed());
        r.max_silence_sec = Some(5.1);
        assert!(!filter_speech_and_silence(&r, &cfg).passed());
        r.max_silence_sec = Some(5.0);
        assert!(filter_speech_and_silence(&r, &cfg).passed());
        r.speech_ratio = Some(0.5);
        r.max_silence_sec = Some(9.0);
        let Check::Fail(reasons) = filter_speech_and_silence(&r, &cfg) else { panic!() };
        assert_eq!(reasons.len(), 2);
    }

    #[test]
    fn language_cases() {
        let mut cfg = PipelineConfig::default();
        let mut r = rec(3, 10.0);
        assert!(!filter_language(&r, &cfg).passed());
        r.detected_lang = Some(DetectedLang { tag: "en".into(), confidence: 0.99 });
        r.source_lang = Some("en".into());
        assert!(filter_language(&r, &cfg).passed());
        r.detected_lang = Some(DetectedLang { tag: "es".into(), confidence: 0.9 });
        r.source_lang = None;
        assert!(!filter_language(&r, &cfg).passed());
        cfg.lang_conf_min = 0.5;
        r.detected_lang = Some(DetectedLang { tag: "en".into(), confidence: 0.3 });
        assert!(!filter_language(&r, &cfg).passed());
        r.detected_lang = Some(DetectedLang { tag: "en".into(), confidence: 0.9 });
        r.source_lang = Some("es".into());
        assert!(!filter_language(&r, &cfg).passed());
    }

    #[test]
    fn blocklist_and_duration() {
        let r = ManifestRecord::new("r", "r.wav", 10.0, "thanks for watching");
        let pats = vec![Regex::new("(?i)thanks for watching").unwrap()];
        assert!(!filter_blocklist(&r, &pats).passed());
        assert!(filter_blocklist(&r, &[]).passed());
        let cfg = PipelineConfig { max_duration_sec: Some(5.0), ..Default::default() };
        assert!(!filter_duration(&r, &cfg).passed());
        assert!(filter_duration(&r, &PipelineConfig::default()).passed());
    }
}
