use super::MetricsError;
use crate::textnorm::WordSeq;

/// One column of a word alignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AlignOp {
    Hit(String),
    Substitution { reference: String, hypothesis: String },
    Insertion(String),
    Deletion(String),
}

impl AlignOp {
    pub fn reference(&self) -> Option<&str> {
        match self {
            AlignOp::Hit(w) | AlignOp::Deletion(w) => Some(w),
            AlignOp::Substitution { reference, .. } => Some(reference),
            AlignOp::Insertion(_) => None,
        }
    }

    pub fn hypothesis(&self) -> Option<&str> {
        match self {
            AlignOp::Hit(w) | AlignOp::Insertion(w) => Some(w),
            AlignOp::Substitution { hypothesis, .. } => Some(hypothesis),
            AlignOp::Deletion(_) => None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EditAlignment {
    pub substitutions: usize,
    pub insertions: usize,
    pub deletions: usize,
    pub hits: usize,
    pub pairs: Vec<AlignOp>,
}

impl EditAlignment {
    pub fn errors(&self) -> usize {
        self.substitutions + self.insertions + self.deletions
    }
}

/// Minimum-cost word alignment with unit costs.
///
/// Backtrace prefers the diagonal (hit or substitution), then insertion, then
/// deletion when several moves are optimal.
pub fn word_align(reference: &WordSeq, hypothesis: &WordSeq) -> EditAlignment {
    let r = reference.words();
    let h = hypothesis.words();
    let (n, m) = (r.len(), h.len());
    let width = m + 1;
    let mut cost = vec![0usize; (n + 1) * width];
    for j in 0..=m {
        cost[j] = j;
    }
    for i in 1..=n {
        cost[i * width] = i;
        for j in 1..=m {
            let diag = cost[(i - 1) * width + j - 1] + usize::from(r[i - 1] != h[j - 1]);
            let ins = cost[i * width + j - 1] + 1;
            let del = cost[(i - 1) * width + j] + 1;
            cost[i * width + j] = diag.min(ins).min(del);
        }
    }

    let mut out = EditAlignment::default();
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        let here = cost[i * width + j];
        if i > 0 && j > 0 {
            let same = r[i - 1] == h[j - 1];
            if cost[(i - 1) * width + j - 1] + usize::from(!same) == here {
                if same {
                    out.hits += 1;
                    out.pairs.push(AlignOp::Hit(r[i - 1].clone()));
                } else {
                    out.substitutions += 1;
                    out.pairs.push(AlignOp::Substitution {
                        reference: r[i - 1].clone(),
                        hypothesis: h[j - 1].clone(),
                    });
                }
                i -= 1;
                j -= 1;
                continue;
            }
        }
        if j > 0 && cost[i * width + j - 1] + 1 == here {
            out.insertions += 1;
            out.pairs.push(AlignOp::Insertion(h[j - 1].clone()));
            j -= 1;
        } else {
            out.deletions += 1;
            out.pairs.push(AlignOp::Deletion(r[i - 1].clone()));
            i -= 1;
        }
    }
    out.pairs.reverse();
    out
}

/// `(S + I + D) / |reference|`. May exceed 1.
pub fn wer(reference: &WordSeq, hypothesis: &WordSeq) -> Result<f64, MetricsError> {
    if reference.is_empty() {
        return Err(MetricsError::EmptyReference);
    }
    let a = word_align(reference, hypothesis);
    Ok(a.errors() as f64 / reference.len() as f64)
}
