use serde::{Deserialize, Serialize};

use crate::textnorm::WordSeq;

/// Decoded text of one chunk.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PartialTranscript {
    pub index: usize,
    pub words: WordSeq,
    pub confidences: Option<Vec<f64>>,
    /// Absolute start time of every word, when the decoder reports them.
    pub word_times: Option<Vec<f64>>,
    /// Chunk `(start, end)` in the source audio.
    pub span: Option<(f64, f64)>,
}

impl PartialTranscript {
    pub fn new(index: usize, words: WordSeq) -> Self {
        PartialTranscript { index, words, ..Default::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StitchConfig {
    /// Shortest exact overlap accepted as a junction.
    pub min_match_tokens: usize,
    /// The match may start this far into the right transcript, as a
    /// fraction of its length.
    pub max_offset_fraction: f64,
    /// Share of each transcript assumed to lie in the overlap when neither
    /// timing nor chunk spans are known.
    pub default_overlap_fraction: f64,
}

impl Default for StitchConfig {
    fn default() -> Self {
        StitchConfig { min_match_tokens: 3, max_offset_fraction: 0.5, default_overlap_fraction: 0.2 }
    }
}

/// How one pair of neighbours was joined.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Junction {
    /// `len` tokens ending the left text equal the right text from `offset`.
    Match { offset: usize, len: usize },
    /// Cut at the overlap's time midpoint.
    Midpoint { dropped_left: usize, dropped_right: usize },
    /// Halved the estimated overlap on both sides.
    Halved { dropped_left: usize, dropped_right: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stitched {
    pub words: WordSeq,
    pub junctions: Vec<Junction>,
}

/// Longest `k` with `left[len-k..] == right[p..p+k]` for some
/// `p <= max_offset`, smallest `p` on ties.
fn longest_overlap(left: &[String], right: &[String], max_offset: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for p in 0..=max_offset.min(right.len()) {
        let cap = left.len().min(right.len() - p);
        for k in (1..=cap).rev() {
            if best.is_some_and(|(_, bk)| k <= bk) {
                break;
            }
            if left[left.len() - k..] == right[p..p + k] {
                best = Some((p, k));
                break;
            }
        }
    }
    best
}

/// Joins chunk transcripts left to right.
///
/// At each junction the longest suffix of the text so far that reappears
/// near the start of the next transcript is kept once. Without a match of
/// at least `min_match_tokens`, both sides are cut at the time midpoint of
/// the chunk overlap if word times are known, otherwise the estimated
/// overlap is halved: its first half kept from the left, its second half
/// from the right.
pub fn stitch(partials: &[PartialTranscript], cfg: &StitchConfig) -> Stitched {
    let mut out: Vec<String> = Vec::new();
    let mut junctions = Vec::new();
    let Some(first) = partials.first() else {
        return Stitched { words: WordSeq::default(), junctions };
    };
    out.extend(first.words.words().iter().cloned());
    // trailing words of `out` that came from the previous partial
    let mut from_prev = out.len();
    for pair in partials.windows(2) {
        let (left, right) = (&pair[0], &pair[1]);
        let r = right.words.words();
        let max_offset = (r.len() as f64 * cfg.max_offset_fraction).floor() as usize;
        if let Some((p, k)) = longest_overlap(&out, r, max_offset).filter(|&(_, k)| k >= cfg.min_match_tokens.max(1)) {
            out.extend(r[p + k..].iter().cloned());
            from_prev = r.len() - p;
            junctions.push(Junction::Match { offset: p, len: k });
            continue;
        }
        let (drop_l, drop_r, timed) = fallback_cut(left, right, cfg);
        let drop_l = drop_l.min(from_prev);
        out.truncate(out.len() - drop_l);
        out.extend(r[drop_r..].iter().cloned());
        from_prev = r.len() - drop_r;
        junctions.push(if timed {
            Junction::Midpoint { dropped_left: drop_l, dropped_right: drop_r }
        } else {
            Junction::Halved { dropped_left: drop_l, dropped_right: drop_r }
        });
    }
    let words = WordSeq::new(out).expect("words come from WordSeqs");
    Stitched { words, junctions }
}

fn fallback_cut(left: &PartialTranscript, right: &PartialTranscript, cfg: &StitchConfig) -> (usize, usize, bool) {
    let (nl, nr) = (left.words.len(), right.words.len());
    if let (Some(lt), Some(rt), Some(ls), Some(rs)) = (&left.word_times, &right.word_times, left.span, right.span) {
        if lt.len() == nl && rt.len() == nr && rs.0 < ls.1 {
            let mid = (rs.0 + ls.1) / 2.0;
            let drop_l = lt.iter().filter(|&&t| t >= mid).count();
            let drop_r = rt.iter().filter(|&&t| t < mid).count();
            return (drop_l, drop_r, true);
        }
    }
    let (fl, fr) = match (left.span, right.span) {
        (Some(ls), Some(rs)) if rs.0 < ls.1 => {
            let ov = ls.1 - rs.0;
            (ov / (ls.1 - ls.0), ov / (rs.1 - rs.0))
        }
        _ => (cfg.default_overlap_fraction, cfg.default_overlap_fraction),
    };
    let est_l = (nl as f64 * fl).round() as usize;
    let est_r = (nr as f64 * fr).round() as usize;
    (est_l.div_ceil(2).min(nl), (est_r / 2).min(nr), false)
}
