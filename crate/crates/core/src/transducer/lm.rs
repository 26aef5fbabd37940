use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::TransducerError;

const BOS: u32 = u32::MAX;

/// Word ↔ id table for an LM corpus. Ids are assigned in sorted word order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocab {
    words: Vec<String>,
    ids: HashMap<String, usize>,
}

impl Vocab {
    pub fn from_words<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let set: BTreeSet<String> = words.into_iter().map(Into::into).collect();
        let words: Vec<String> = set.into_iter().collect();
        let ids = words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        Vocab { words, ids }
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn id(&self, word: &str) -> Option<usize> {
        self.ids.get(word).copied()
    }

    pub fn word(&self, id: usize) -> Option<&str> {
        self.words.get(id).map(String::as_str)
    }

    pub fn encode(&self, sentence: &str) -> Option<Vec<usize>> {
        sentence.split_whitespace().map(|w| self.id(w)).collect()
    }
}

/// Add-k smoothed n-gram model over label ids `0..vocab_size`.
///
/// `P(w | h) = (c(h, w) + k) / (c(h) + k·V)`, where `h` is the previous
/// `n - 1` labels padded on the left with a sentence-start marker. A
/// history never seen in training therefore gets the uniform distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct NgramLm {
    order: usize,
    k: f64,
    vocab_size: usize,
    counts: BTreeMap<Vec<u32>, (BTreeMap<u32, u64>, u64)>,
}

impl NgramLm {
    pub fn uniform(order: usize, k: f64, vocab_size: usize) -> Result<Self, TransducerError> {
        Self::build::<Vec<usize>>(&[], order, k, vocab_size)
    }

    pub fn build<S: AsRef<[usize]>>(
        corpus: &[S],
        order: usize,
        k: f64,
        vocab_size: usize,
    ) -> Result<Self, TransducerError> {
        if order == 0 {
            return Err(TransducerError::InvalidParameter("n-gram order must be >= 1".into()));
        }
        if !(k > 0.0 && k.is_finite()) {
            return Err(TransducerError::InvalidParameter(format!("smoothing k must be > 0, got {k}")));
        }
        if vocab_size == 0 {
            return Err(TransducerError::InvalidParameter("vocabulary is empty".into()));
        }
        let mut lm = NgramLm { order, k, vocab_size, counts: BTreeMap::new() };
        for sentence in corpus {
            let sentence = sentence.as_ref();
            for (position, &w) in sentence.iter().enumerate() {
                if w >= vocab_size {
                    return Err(TransducerError::InvalidLabel { label: w, position, vocab: vocab_size });
                }
                let h = lm.history(&sentence[..position]);
                let entry = lm.counts.entry(h).or_default();
                *entry.0.entry(w as u32).or_default() += 1;
                entry.1 += 1;
            }
        }
        Ok(lm)
    }

    /// Builds a model and its vocabulary from whitespace-tokenized lines.
    pub fn from_text(text: &str, order: usize, k: f64) -> Result<(Self, Vocab), TransducerError> {
        let vocab = Vocab::from_words(text.split_whitespace());
        let corpus: Vec<Vec<usize>> =
            text.lines().map(|l| vocab.encode(l).expect("every corpus word is in the vocabulary")).collect();
        Ok((Self::build(&corpus, order, k, vocab.len().max(1))?, vocab))
    }

    fn history(&self, prefix: &[usize]) -> Vec<u32> {
        let need = self.order - 1;
        let take = prefix.len().min(need);
        let mut h = vec![BOS; need - take];
        h.extend(prefix[prefix.len() - take..].iter().map(|&x| x as u32));
        h
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn smoothing(&self) -> f64 {
        self.k
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    /// `ln P(label | prefix)`; only the last `n - 1` prefix labels matter.
    pub fn log_cond_labels(&self, prefix: &[usize], label: usize) -> f64 {
        let kv = self.k * self.vocab_size as f64;
        let (c, total) = match self.counts.get(&self.history(prefix)) {
            Some((row, total)) => (row.get(&(label as u32)).copied().unwrap_or(0), *total),
            None => (0, 0),
        };
        ((c as f64 + self.k) / (total as f64 + kv)).ln()
    }

    pub fn probs(&self, prefix: &[usize]) -> Vec<f64> {
        (0..self.vocab_size).map(|w| self.log_cond_labels(prefix, w).exp()).collect()
    }

    /// Sum of conditional log-probabilities. No end-of-sentence term, so
    /// extending a sequence never raises its score.
    pub fn logprob(&self, seq: &[usize]) -> f64 {
        (0..seq.len()).map(|i| self.log_cond_labels(&seq[..i], seq[i])).sum()
    }
}
