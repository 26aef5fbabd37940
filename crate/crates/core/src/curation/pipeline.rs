use rayon::prelude::*;
use regex::Regex;

use super::filters::{
    filter_blocklist, filter_confidence, filter_duration, filter_language, filter_speech_and_silence, filter_wpm,
};
use super::segment::segment;
use super::{Check, CurationError, FilterOutcome, ManifestRecord, PipelineConfig, Reason};

/// One manifest line: a record, or the reason it could not be read.
#[derive(Debug, Clone, PartialEq)]
pub enum ManifestLine {
    Record(ManifestRecord),
    Invalid { id: String, error: String },
}

/// Parses JSON Lines. Blank lines are skipped; malformed lines become
/// [`ManifestLine::Invalid`] keyed by their `id` field when one can be
/// recovered, otherwise by `line:<n>`.
pub fn parse_manifest(text: &str) -> Vec<ManifestLine> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(n, line)| match serde_json::from_str::<ManifestRecord>(line) {
            Ok(r) => ManifestLine::Record(r),
            Err(e) => {
                let id = serde_json::from_str::<serde_json::Value>(line)
                    .ok()
                    .and_then(|v| v.get("id").and_then(|x| x.as_str()).map(str::to_owned))
                    .unwrap_or_else(|| format!("line:{}", n + 1));
                ManifestLine::Invalid { id, error: e.to_string() }
            }
        })
        .collect()
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PipelineOutput {
    /// Surviving clips, in input order.
    pub kept: Vec<ManifestRecord>,
    /// One outcome per input line, in input order.
    pub outcomes: Vec<FilterOutcome>,
}

pub fn run_pipeline(manifest: &[ManifestLine], cfg: &PipelineConfig) -> Result<PipelineOutput, CurationError> {
    cfg.validate()?;
    let patterns: Vec<Regex> = cfg.blocklist.iter().map(|p| Regex::new(p).expect("validated")).collect();
    let results: Vec<(Vec<ManifestRecord>, FilterOutcome)> =
        manifest.par_iter().map(|line| process(line, cfg, &patterns)).collect();
    let mut out = PipelineOutput::default();
    for (kept, outcome) in results {
        out.kept.extend(kept);
        out.outcomes.push(outcome);
    }
    Ok(out)
}

fn process(line: &ManifestLine, cfg: &PipelineConfig, patterns: &[Regex]) -> (Vec<ManifestRecord>, FilterOutcome) {
    let rec = match line {
        ManifestLine::Record(r) => r,
        ManifestLine::Invalid { id, error } => {
            return (vec![], FilterOutcome::rejected(id.clone(), vec![Reason::new("parse-error", error.clone())]));
        }
    };
    let reject = |reasons: Vec<Reason>| (vec![], FilterOutcome::rejected(rec.id.clone(), reasons));
    if let Err(e) = rec.validate() {
        let msg = match e {
            CurationError::InvalidRecord { msg, .. } => msg,
            other => other.to_string(),
        };
        return reject(vec![Reason::new("parse-error", msg)]);
    }
    for stage in [filter_duration, filter_language, filter_speech_and_silence] {
        if let Check::Fail(reasons) = stage(rec, cfg) {
            return reject(reasons);
        }
    }
    let children = match segment(rec, cfg) {
        Ok(c) => c,
        Err(reason) => return reject(vec![reason]),
    };
    let mut kept = Vec::new();
    let mut reasons = Vec::new();
    for child in children {
        let mut failed = Vec::new();
        match filter_wpm(&child, cfg) {
            Ok(Check::Fail(r)) => failed.extend(r),
            Ok(Check::Pass) => {}
            Err(e) => failed.push(Reason::new("parse-error", e.to_string())),
        }
        for check in [filter_confidence(&child, cfg), filter_blocklist(&child, patterns)] {
            if let Check::Fail(r) = check {
                failed.extend(r);
            }
        }
        if failed.is_empty() {
            kept.push(child);
        } else {
            if child.id != rec.id {
                for r in &mut failed {
                    r.measured = format!("{}:{}", child.id, r.measured);
                }
            }
            reasons.extend(failed);
        }
    }
    if kept.is_empty() {
        reject(reasons)
    } else {
        (kept, FilterOutcome::kept(rec.id.clone()))
    }
}

/// `id,verdict,reasons,measured_values`; multiple reasons are joined with
/// `;` and measured values are written as `filter=value`.
pub fn write_outcomes_csv(outcomes: &[FilterOutcome]) -> Result<String, CurationError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["id", "verdict", "reasons", "measured_values"])?;
    for o in outcomes {
        let reasons = o.reason_ids().join(";");
        let measured: Vec<String> = o.reasons.iter().map(|r| format!("{}={}", r.filter, r.measured)).collect();
        w.write_record([o.id.as_str(), o.verdict.as_str(), &reasons, &measured.join(";")])?;
    }
    let bytes = w.into_inner().map_err(|e| CurationError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn write_manifest(records: &[ManifestRecord]) -> Result<String, CurationError> {
    let mut s = String::new();
    for r in records {
        s.push_str(&serde_json::to_string(r)?);
        s.push('\n');
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curation::segment::synthetic_times;
    use crate::curation::{DetectedLang, Verdict};

    fn good(id: &str, words: usize, dur: f64) -> ManifestRecord {
        let mut r = ManifestRecord::new(id, format!("{id}.wav"), dur, vec!["word"; words].join(" "));
        r.word_confidences = Some(vec![0.9; words]);
        r.source_lang = Some("en".into());
        r.detected_lang = Some(DetectedLang { tag: "en".into(), confidence: 0.99 });
        r.speech_ratio = Some(0.9);
        r.max_silence_sec = Some(1.0);
        r
    }

    fn run(recs: Vec<ManifestRecord>) -> PipelineOutput {
        let lines: Vec<ManifestLine> = recs.into_iter().map(ManifestLine::Record).collect();
        run_pipeline(&lines, &PipelineConfig::default()).unwrap()
    }

    #[test]
    fn empty_manifest() {
        assert_eq!(run(vec![]), PipelineOutput::default());
    }

    #[test]
    fn all_passing_kept_unchanged() {
        let recs = vec![good("a", 24, 12.0), good("b", 30, 15.0)];
        let out = run(recs.clone());
        assert_eq!(out.kept, recs);
        assert!(out.outcomes.iter().all(|o| o.verdict == Verdict::Kept && o.reasons.is_empty()));
    }

    #[test]
    fn stage_order_decides_reason() {
        let mut r = good("x", 5, 12.0); // wpm 25
        r.speech_ratio = Some(0.5);
        let out = run(vec![r]);
        assert_eq!(out.outcomes[0].reason_ids(), vec!["speech-ratio"]);
    }

    #[test]
    fn child_reasons_are_prefixed() {
        let times = synthetic_times(57, 2.0, Some((28, 1.0)));
        let mut r = good("long", 57, 29.5);
        r.word_times = Some(times);
        let mut conf = vec![0.5; 57];
        conf[28..].iter_mut().for_each(|c| *c = 0.95);
        r.word_confidences = Some(conf);
        let out = run(vec![r.clone()]);
        assert_eq!(out.kept.len(), 1);
        assert_eq!(out.kept[0].id, "long#1");
        r.word_confidences = Some(vec![0.5; 57]);
        let out = run(vec![r]);
        assert_eq!(out.outcomes[0].reason_ids(), vec!["confidence", "confidence"]);
        assert!(out.outcomes[0].reasons[1].measured.starts_with("long#1:"));
    }

    #[test]
    fn parse_errors_continue() {
        let text = format!(
            "{}\nnot json\n{{\"id\": \"half\"}}\n\n{}\n",
            serde_json::to_string(&good("a", 24, 12.0)).unwrap(),
            serde_json::to_string(&good("b", 24, 0.0)).unwrap()
        );
        let lines = parse_manifest(&text);
        assert_eq!(lines.len(), 4);
        let out = run_pipeline(&lines, &PipelineConfig::default()).unwrap();
        let ids: Vec<&str> = out.outcomes.iter().map(|o| o.id.as_str()).collect();
        assert_eq!(ids, vec!["a", "line:2", "half", "b"]);
        assert_eq!(out.outcomes[1].reason_ids(), vec!["parse-error"]);
        assert_eq!(out.outcomes[3].reason_ids(), vec!["parse-error"]);
        assert_eq!(out.kept.len(), 1);
    }

    #[test]
    fn csv_and_jsonl_shapes() {
        let mut bad = good("z", 5, 12.0);
        bad.word_confidences = Some(vec![0.1; 5]);
        let out = run(vec![good("a", 24, 12.0), bad]);
        let csv = write_outcomes_csv(&out.outcomes).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "id,verdict,reasons,measured_values");
        assert_eq!(lines[1], "a,kept,,");
        assert_eq!(lines[2], "z,rejected,wpm;confidence,wpm=25.000;confidence=0.1000");
        let jsonl = write_manifest(&out.kept).unwrap();
        let back = parse_manifest(&jsonl);
        assert_eq!(back, vec![ManifestLine::Record(out.kept[0].clone())]);
    }

    #[test]
    fn blocklist_stage() {
        let mut r = good("a", 24, 12.0);
        r.transcript = format!("subscribe {}", vec!["word"; 23].join(" "));
        let cfg = PipelineConfig { blocklist: vec!["^subscribe".into()], ..Default::default() };
        let out = run_pipeline(&[ManifestLine::Record(r)], &cfg).unwrap();
        assert_eq!(out.outcomes[0].reason_ids(), vec!["blocklist"]);
        let cfg = PipelineConfig { blocklist: vec!["(".into()], ..Default::default() };
        assert!(matches!(run_pipeline(&[], &cfg), Err(CurationError::Pattern { .. })));
    }
}
