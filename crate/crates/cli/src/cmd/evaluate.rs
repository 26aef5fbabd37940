use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{Context, Result};
use asrlab::metrics::{
    align_entities, parse_entity_records, pn_score, wer, EntityRecord, EntitySpan, EvalReport, EvalRow, ExternalTagger,
    LexicalMetric,
};
use asrlab::textnorm::{normalize, tokenize_words, NormRuleSet};
use serde::Serialize;

use super::{load_manifest, load_tsv};
use crate::config::RunConfig;
use crate::report::{header, invalid, read_input, write_report};

#[derive(Debug, clap::Args, Serialize)]
pub struct Args {
    /// JSONL manifest; supplies ids, lengths and default references.
    #[arg(long)]
    manifest: PathBuf,
    /// Hypotheses as `id<TAB>text` lines.
    #[arg(long)]
    hyps: PathBuf,
    /// References as `id<TAB>text` lines, replacing the manifest transcripts.
    #[arg(long)]
    refs: Option<PathBuf>,
    /// Gold entity records.
    #[arg(long, requires = "pred_entities")]
    gold_entities: Option<PathBuf>,
    /// Predicted entity records.
    #[arg(long, requires = "gold_entities")]
    pred_entities: Option<PathBuf>,
    /// NER program run on each reference and hypothesis.
    #[arg(long, conflicts_with_all = ["gold_entities", "pred_entities"])]
    tagger: Option<PathBuf>,
    /// Score raw text, skipping normalization.
    #[arg(long)]
    raw: bool,
}

pub(crate) fn group(records: Vec<EntityRecord>) -> BTreeMap<String, Vec<EntitySpan>> {
    let mut map: BTreeMap<String, Vec<EntitySpan>> = BTreeMap::new();
    for r in records {
        map.entry(r.file_id).or_default().push(r.span);
    }
    map
}

pub(crate) fn load_entities(path: &std::path::Path) -> Result<BTreeMap<String, Vec<EntitySpan>>> {
    let text = read_input(path)?;
    let recs = parse_entity_records(&text).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    Ok(group(recs))
}

pub(crate) fn pn_pair(gold: &[EntitySpan], pred: &[EntitySpan], threshold: f64) -> (Option<f64>, Option<f64>) {
    let a = align_entities(gold, pred, threshold);
    (pn_score(&a, LexicalMetric::JaroDistance).value(), pn_score(&a, LexicalMetric::PairWer).value())
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "n/a".to_string(), |v| format!("{v:.6}"))
}

pub fn run(args: Args, cfg: &RunConfig) -> Result<bool> {
    let manifest = load_manifest(&args.manifest)?;
    let hyps = load_tsv(&args.hyps)?;
    let refs = match &args.refs {
        Some(p) => Some(load_tsv(p)?),
        None => None,
    };
    let rules = if args.raw || cfg.metrics.raw {
        NormRuleSet::new(Vec::<(String, String)>::new(), Vec::<String>::new(), false, false).expect("empty rule set is valid")
    } else {
        cfg.rule_set()?
    };
    let entities = match (&args.gold_entities, &args.pred_entities) {
        (Some(g), Some(p)) => Some((load_entities(g)?, load_entities(p)?)),
        _ => None,
    };
    let tagger = args.tagger.as_ref().map(ExternalTagger::new);

    let mut rows = Vec::with_capacity(manifest.len());
    for rec in &manifest {
        let reference = match &refs {
            Some(m) => m.get(&rec.id).ok_or_else(|| invalid(format!("evaluate: no reference for {}", rec.id)))?,
            None => &rec.transcript,
        };
        let hyp = hyps.get(&rec.id).ok_or_else(|| invalid(format!("evaluate: no hypothesis for {}", rec.id)))?;
        let r = tokenize_words(&normalize(reference, &rules));
        let h = tokenize_words(&normalize(hyp, &rules));
        let w = wer(&r, &h).map_err(|e| invalid(format!("evaluate: {}: {e}", rec.id)))?;
        let (pn_jaro, pn_wer) = if let Some((gold, pred)) = &entities {
            let empty = Vec::new();
            pn_pair(
                gold.get(&rec.id).unwrap_or(&empty),
                pred.get(&rec.id).unwrap_or(&empty),
                cfg.metrics.sim_threshold,
            )
        } else if let Some(t) = &tagger {
            let spans = |text: &str| -> Result<Vec<EntitySpan>> {
                Ok(t.tag(text).with_context(|| format!("evaluate: tagging {}", rec.id))?.into_iter().map(|r| r.span).collect())
            };
            pn_pair(&spans(reference)?, &spans(hyp)?, cfg.metrics.sim_threshold)
        } else {
            (None, None)
        };
        rows.push(EvalRow { file_id: rec.id.clone(), length_sec: rec.duration_sec, wer: w, pn_jaro, pn_wer });
    }
    if rows.is_empty() {
        return Err(invalid("evaluate: manifest is empty"));
    }
    let report = EvalReport::from_rows(rows).map_err(invalid)?;
    let mut out = header("evaluate", cfg, &args);
    out.push_str(&report.to_csv()?);
    write_report(&cfg.out_dir, "eval.csv", &out)?;

    let a = &report.aggregates;
    let mut s = String::new();
    let _ = writeln!(s, "files: {}", report.rows.len());
    let _ = writeln!(s, "total_length_sec: {:.3}", a.total_length_sec);
    let _ = writeln!(s, "wer: {}", fmt_opt(a.wer));
    let _ = writeln!(s, "pn_jaro: {}", fmt_opt(a.pn_jaro));
    let _ = writeln!(s, "pn_wer: {}", fmt_opt(a.pn_wer));
    print!("{s}");
    Ok(true)
}
