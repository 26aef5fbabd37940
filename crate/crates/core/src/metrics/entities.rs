//! Proper-noun scoring over named entities extracted from the reference and
//! the hypothesis.
//!
//! Alignment runs in two stages. The first is an order-preserving match of
//! the casefolded filler sequences (Ratcliff-Obershelp); equal runs pair
//! positionally and so do the two sides of each replaced run. The second
//! stage keeps a candidate pair only when the entity types agree and the
//! fillers are at least `sim_threshold` similar under Jaro-Winkler. Anything
//! left over is an insertion or deletion.

use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Stdio};
use std::str::FromStr;

use super::matcher::{opcodes, OpcodeTag};
use super::{jaro_winkler, wer, MetricsError};
use crate::textnorm::WordSeq;

pub const DEFAULT_SIM_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EntityType {
    Person,
    Organization,
    Gpe,
    Loc,
}

impl EntityType {
    /// Maps common tagger labels onto the four scored types. Other labels
    /// (DATE, NORP, ...) return `None` and are dropped before alignment.
    pub fn from_label(label: &str) -> Option<Self> {
        match label.trim().to_ascii_lowercase().as_str() {
            "person" | "per" => Some(EntityType::Person),
            "organization" | "org" => Some(EntityType::Organization),
            "gpe" => Some(EntityType::Gpe),
            "loc" | "location" => Some(EntityType::Loc),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EntityType::Person => "PERSON",
            EntityType::Organization => "ORG",
            EntityType::Gpe => "GPE",
            EntityType::Loc => "LOC",
        }
    }
}

impl fmt::Display for EntityType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EntityType {
    type Err = MetricsError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::from_label(s).ok_or_else(|| MetricsError::InvalidSpan(format!("unsupported entity type {s:?}")))
    }
}

/// A typed mention; `start..end` are character offsets into the source text.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EntitySpan {
    pub filler: String,
    pub entity_type: EntityType,
    pub start: usize,
    pub end: usize,
}

impl EntitySpan {
    pub fn new(filler: impl Into<String>, entity_type: EntityType, start: usize, end: usize) -> Result<Self, MetricsError> {
        let filler = filler.into();
        if start >= end {
            return Err(MetricsError::InvalidSpan(format!("start {start} must be < end {end}")));
        }
        if filler.chars().count() != end - start {
            return Err(MetricsError::InvalidSpan(format!(
                "filler {filler:?} has {} characters but span is {}..{}",
                filler.chars().count(),
                start,
                end
            )));
        }
        if filler.trim().is_empty() {
            return Err(MetricsError::InvalidSpan("filler is blank".into()));
        }
        Ok(EntitySpan { filler, entity_type, start, end })
    }

    /// Cuts the filler out of `source` by character offsets.
    pub fn from_source(source: &str, start: usize, end: usize, entity_type: EntityType) -> Result<Self, MetricsError> {
        let filler: String = source.chars().skip(start).take(end.saturating_sub(start)).collect();
        Self::new(filler, entity_type, start, end)
    }

    /// Convenience for tests and examples where offsets do not matter.
    pub fn untethered(filler: &str, entity_type: EntityType) -> Self {
        let len = filler.chars().count().max(1);
        EntitySpan { filler: filler.to_string(), entity_type, start: 0, end: len }
    }

    fn key(&self) -> String {
        self.filler.to_lowercase()
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EntityAlignment {
    pub matched: Vec<(EntitySpan, EntitySpan)>,
    pub unmatched_gold: Vec<EntitySpan>,
    pub unmatched_pred: Vec<EntitySpan>,
}

impl EntityAlignment {
    pub fn gold_len(&self) -> usize {
        self.matched.len() + self.unmatched_gold.len()
    }

    pub fn pred_len(&self) -> usize {
        self.matched.len() + self.unmatched_pred.len()
    }
}

pub fn align_entities(gold: &[EntitySpan], pred: &[EntitySpan], sim_threshold: f64) -> EntityAlignment {
    let gold_keys: Vec<String> = gold.iter().map(EntitySpan::key).collect();
    let pred_keys: Vec<String> = pred.iter().map(EntitySpan::key).collect();

    let mut candidates: Vec<(usize, usize)> = Vec::new();
    let mut gold_left: Vec<usize> = Vec::new();
    let mut pred_left: Vec<usize> = Vec::new();
    for op in opcodes(&gold_keys, &pred_keys) {
        let gs = op.a.0..op.a.1;
        let ps = op.b.0..op.b.1;
        match op.tag {
            OpcodeTag::Equal | OpcodeTag::Replace => {
                let n = gs.len().min(ps.len());
                candidates.extend(gs.clone().zip(ps.clone()));
                gold_left.extend(gs.skip(n));
                pred_left.extend(ps.skip(n));
            }
            OpcodeTag::Delete => gold_left.extend(gs),
            OpcodeTag::Insert => pred_left.extend(ps),
        }
    }

    let mut out = EntityAlignment::default();
    for (g, p) in candidates {
        let accept = gold[g].entity_type == pred[p].entity_type
            && jaro_winkler(&gold_keys[g], &pred_keys[p]) >= sim_threshold;
        if accept {
            out.matched.push((gold[g].clone(), pred[p].clone()));
        } else {
            gold_left.push(g);
            pred_left.push(p);
        }
    }
    gold_left.sort_unstable();
    pred_left.sort_unstable();
    out.unmatched_gold = gold_left.into_iter().map(|i| gold[i].clone()).collect();
    out.unmatched_pred = pred_left.into_iter().map(|i| pred[i].clone()).collect();
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LexicalMetric {
    /// `1 - jaro_winkler` on casefolded fillers.
    JaroDistance,
    /// Word error rate of the predicted filler against the gold filler.
    PairWer,
}

impl LexicalMetric {
    pub fn distance(self, gold: &str, pred: &str) -> f64 {
        let (g, p) = (gold.to_lowercase(), pred.to_lowercase());
        match self {
            LexicalMetric::JaroDistance => 1.0 - jaro_winkler(&g, &p),
            LexicalMetric::PairWer => {
                let gw: WordSeq = std::iter::once(g.as_str()).collect();
                let pw: WordSeq = std::iter::once(p.as_str()).collect();
                // spans are validated non-blank, so the reference is never empty
                wer(&gw, &pw).unwrap_or(1.0)
            }
        }
    }
}

/// Outcome of [`pn_score`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PnScore {
    /// Mean distance ×100 over `max(n, m)` slots.
    Scored(f64),
    /// Neither side has entities; excluded from aggregation.
    NoEntities,
}

impl PnScore {
    pub fn value(self) -> Option<f64> {
        match self {
            PnScore::Scored(v) => Some(v),
            PnScore::NoEntities => None,
        }
    }
}

/// Averages per-pair distances over `max(n, m)` slots; each unpaired span
/// adds a distance of 1. Reported ×100.
///
/// When both sides carry unpaired spans the total can exceed 100, the same
/// way WER can exceed 1.
pub fn pn_score(align: &EntityAlignment, metric: LexicalMetric) -> PnScore {
    let slots = align.gold_len().max(align.pred_len());
    if slots == 0 {
        return PnScore::NoEntities;
    }
    let paired: f64 = align.matched.iter().map(|(g, p)| metric.distance(&g.filler, &p.filler)).sum();
    let unpaired = (align.unmatched_gold.len() + align.unmatched_pred.len()) as f64;
    PnScore::Scored(100.0 * (paired + unpaired) / slots as f64)
}

/// One line of an entity annotation file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntityRecord {
    pub file_id: String,
    pub span: EntitySpan,
}

/// Parses `file_id<TAB>start<TAB>end<TAB>type<TAB>filler` lines. Records with
/// a type outside the four scored ones are dropped. Blank lines are skipped.
pub fn parse_entity_records(text: &str) -> Result<Vec<EntityRecord>, MetricsError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let err = |msg: String| MetricsError::EntitySyntax { line: i + 1, msg };
        let fields: Vec<&str> = line.splitn(5, '\t').collect();
        if fields.len() != 5 {
            return Err(err(format!("expected 5 tab-separated fields, found {}", fields.len())));
        }
        let start: usize = fields[1].trim().parse().map_err(|_| err(format!("bad start {:?}", fields[1])))?;
        let end: usize = fields[2].trim().parse().map_err(|_| err(format!("bad end {:?}", fields[2])))?;
        let Some(entity_type) = EntityType::from_label(fields[3]) else {
            continue;
        };
        let span = EntitySpan::new(fields[4], entity_type, start, end).map_err(|e| err(e.to_string()))?;
        out.push(EntityRecord { file_id: fields[0].to_string(), span });
    }
    Ok(out)
}

pub fn write_entity_records(records: &[EntityRecord]) -> String {
    let mut s = String::new();
    for r in records {
        s.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\n",
            r.file_id, r.span.start, r.span.end, r.span.entity_type, r.span.filler
        ));
    }
    s
}

/// An NER process: reads one UTF-8 document on stdin and writes five-field
/// entity records on stdout, exiting 0.
#[derive(Debug, Clone)]
pub struct ExternalTagger {
    pub program: PathBuf,
    pub args: Vec<String>,
}

impl ExternalTagger {
    pub fn new(program: impl Into<PathBuf>) -> Self {
        ExternalTagger { program: program.into(), args: Vec::new() }
    }

    pub fn tag(&self, text: &str) -> Result<Vec<EntityRecord>, MetricsError> {
        let mut child = Command::new(&self.program)
            .args(&self.args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()
            .map_err(|e| MetricsError::Tagger(format!("{}: {e}", self.program.display())))?;
        {
            let mut stdin = child.stdin.take().expect("stdin is piped");
            // A tagger may exit without draining stdin; that surfaces via its status.
            let _ = stdin.write_all(text.as_bytes());
        }
        let output = child.wait_with_output()?;
        if !output.status.success() {
            return Err(MetricsError::Tagger(format!(
                "{} exited with {}: {}",
                self.program.display(),
                output.status,
                String::from_utf8_lossy(&output.stderr).trim()
            )));
        }
        let stdout = String::from_utf8(output.stdout).map_err(|e| MetricsError::Tagger(e.to_string()))?;
        parse_entity_records(&stdout)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use EntityType::*;

    fn e(f: &str, t: EntityType) -> EntitySpan {
        EntitySpan::untethered(f, t)
    }

    #[test]
    fn ridiculous_cage_is_matched() {
        // JW("nicolas cage", "ridiculous cage") by hand: no common prefix, so
        // the Winkler boost is zero and the Jaro value alone must clear 0.5.
        let j = jaro_winkler("nicolas cage", "ridiculous cage");
        assert!(j >= 0.5, "{j}");
        let a = align_entities(&[e("Nicolas Cage", Person)], &[e("Ridiculous Cage", Person)], 0.5);
        assert_eq!(a.matched.len(), 1);
        assert!(a.unmatched_gold.is_empty() && a.unmatched_pred.is_empty());
        assert_eq!(pn_score(&a, LexicalMetric::PairWer), PnScore::Scored(50.0));
    }

    #[test]
    fn deletion_only() {
        let a = align_entities(&[e("Paris", Gpe)], &[], 0.5);
        assert_eq!(a.unmatched_gold, vec![e("Paris", Gpe)]);
        assert_eq!(pn_score(&a, LexicalMetric::JaroDistance), PnScore::Scored(100.0));
    }

    #[test]
    fn type_mismatch_unpairs_both() {
        let a = align_entities(&[e("Paris", Gpe)], &[e("Paris", Person)], 0.5);
        assert!(a.matched.is_empty());
        assert_eq!(a.unmatched_gold.len(), 1);
        assert_eq!(a.unmatched_pred.len(), 1);
        // two unpaired spans over one slot
        assert_eq!(pn_score(&a, LexicalMetric::JaroDistance), PnScore::Scored(200.0));
    }

    #[test]
    fn below_threshold_unpairs() {
        let a = align_entities(&[e("Paris", Gpe)], &[e("Tokyo", Gpe)], 0.5);
        assert!(a.matched.is_empty());
    }

    #[test]
    fn identical_pairs_score_zero() {
        let gold = vec![e("Alice", Person), e("Acme Corp", Organization), e("Ohio", Gpe)];
        let a = align_entities(&gold, &gold, 0.5);
        assert_eq!(a.matched.len(), 3);
        assert_eq!(pn_score(&a, LexicalMetric::JaroDistance), PnScore::Scored(0.0));
        assert_eq!(pn_score(&a, LexicalMetric::PairWer), PnScore::Scored(0.0));
    }

    #[test]
    fn casefolded_comparison() {
        let a = align_entities(&[e("NASA", Organization)], &[e("nasa", Organization)], 0.99);
        assert_eq!(a.matched.len(), 1);
        assert_eq!(pn_score(&a, LexicalMetric::JaroDistance), PnScore::Scored(0.0));
    }

    #[test]
    fn no_entities() {
        let a = align_entities(&[], &[], 0.5);
        assert_eq!(pn_score(&a, LexicalMetric::PairWer), PnScore::NoEntities);
    }

    #[test]
    fn order_preserving_with_insertion() {
        let gold = vec![e("Alice", Person), e("Berlin", Gpe)];
        let pred = vec![e("Alice", Person), e("Google", Organization), e("Berlin", Gpe)];
        let a = align_entities(&gold, &pred, 0.5);
        assert_eq!(a.matched.len(), 2);
        assert_eq!(a.unmatched_pred, vec![e("Google", Organization)]);
        assert!((pn_score(&a, LexicalMetric::JaroDistance).value().unwrap() - 100.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn span_validation() {
        assert!(EntitySpan::new("Paris", Gpe, 3, 3).is_err());
        assert!(EntitySpan::new("Paris", Gpe, 0, 4).is_err());
        let s = EntitySpan::from_source("I met Nicolas Cage today", 6, 18, Person).unwrap();
        assert_eq!(s.filler, "Nicolas Cage");
    }

    #[test]
    fn annotation_round_trip_and_type_filter() {
        let text = "f1\t6\t18\tPERSON\tNicolas Cage\nf1\t0\t5\tDATE\ttoday\n\nf2\t0\t5\tgpe\tParis\n";
        let recs = parse_entity_records(text).unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[1].span.entity_type, Gpe);
        let again = parse_entity_records(&write_entity_records(&recs)).unwrap();
        assert_eq!(again, recs);
    }

    #[test]
    fn annotation_errors() {
        assert!(matches!(parse_entity_records("f1\t0\t5\tGPE"), Err(MetricsError::EntitySyntax { line: 1, .. })));
        assert!(matches!(
            parse_entity_records("\nf1\tx\t5\tGPE\tParis"),
            Err(MetricsError::EntitySyntax { line: 2, .. })
        ));
        assert!(parse_entity_records("f1\t0\t9\tGPE\tParis").is_err());
    }

    fn entity_strategy() -> impl Strategy<Value = EntitySpan> {
        (
            prop_oneof![Just("Alice"), Just("alice"), Just("Alyce"), Just("Bob"), Just("Paris"), Just("Acme Inc")],
            prop_oneof![Just(Person), Just(Organization), Just(Gpe), Just(Loc)],
        )
            .prop_map(|(f, t)| e(f, t))
    }

    proptest! {
        #[test]
        fn buckets_partition_inputs(
            gold in proptest::collection::vec(entity_strategy(), 0..6),
            pred in proptest::collection::vec(entity_strategy(), 0..6),
            threshold in 0.0f64..1.0,
        ) {
            let a = align_entities(&gold, &pred, threshold);
            let mut g: Vec<_> = a.matched.iter().map(|(g, _)| g.clone()).chain(a.unmatched_gold.clone()).collect();
            let mut p: Vec<_> = a.matched.iter().map(|(_, p)| p.clone()).chain(a.unmatched_pred.clone()).collect();
            let key = |s: &EntitySpan| (s.filler.clone(), s.entity_type);
            let (mut g0, mut p0) = (gold.clone(), pred.clone());
            g.sort_by_key(key); g0.sort_by_key(key); p.sort_by_key(key); p0.sort_by_key(key);
            prop_assert_eq!(g, g0);
            prop_assert_eq!(p, p0);
            for (x, y) in &a.matched {
                prop_assert_eq!(x.entity_type, y.entity_type);
                prop_assert!(jaro_winkler(&x.filler.to_lowercase(), &y.filler.to_lowercase()) >= threshold);
            }
        }
    }
}
