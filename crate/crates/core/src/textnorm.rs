//! English text normalization applied to references and hypotheses before
//! scoring.
//!
//! The default [`NormRuleSet`] folds ASCII case, removes punctuation (keeping
//! apostrophes inside words so contractions can still be looked up), expands
//! a fixed contraction table and drops filler words. Numerals are left alone.
//!
//! Normalization is idempotent: every word it emits is lowercase (under
//! casefolding), contains only alphanumerics, intra-word apostrophes and
//! digit-group separators, and is neither a filler nor a contraction key.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum TextNormError {
    #[error("textnorm: rule file line {line}: {msg}")]
    RuleSyntax { line: usize, msg: String },
    #[error("textnorm: invalid rule set: {0}")]
    InvalidRules(String),
    #[error("textnorm: word sequence element {index} is empty or contains whitespace")]
    InvalidWord { index: usize },
    #[error("textnorm: {0}")]
    Io(#[from] std::io::Error),
}

const DEFAULT_FILLERS: &[&str] = &["um", "umm", "ummm", "uh", "uhh", "er", "ah", "mhm", "mm-hmm"];

const DEFAULT_CONTRACTIONS: &[(&str, &str)] = &[
    ("ain't", "is not"),
    ("aren't", "are not"),
    ("can't", "can not"),
    ("cannot", "can not"),
    ("could've", "could have"),
    ("couldn't", "could not"),
    ("couldn't've", "could not have"),
    ("didn't", "did not"),
    ("doesn't", "does not"),
    ("don't", "do not"),
    ("gonna", "going to"),
    ("gotta", "got to"),
    ("hadn't", "had not"),
    ("hasn't", "has not"),
    ("haven't", "have not"),
    ("he'd", "he would"),
    ("he'll", "he will"),
    ("he's", "he is"),
    ("here's", "here is"),
    ("how'd", "how did"),
    ("how'll", "how will"),
    ("how's", "how is"),
    ("i'd", "i would"),
    ("i'll", "i will"),
    ("i'm", "i am"),
    ("i've", "i have"),
    ("isn't", "is not"),
    ("it'd", "it would"),
    ("it'll", "it will"),
    ("it's", "it is"),
    ("let's", "let us"),
    ("ma'am", "madam"),
    ("mightn't", "might not"),
    ("might've", "might have"),
    ("mustn't", "must not"),
    ("must've", "must have"),
    ("needn't", "need not"),
    ("o'clock", "of the clock"),
    ("shan't", "shall not"),
    ("she'd", "she would"),
    ("she'll", "she will"),
    ("she's", "she is"),
    ("should've", "should have"),
    ("shouldn't", "should not"),
    ("that'd", "that would"),
    ("that'll", "that will"),
    ("that's", "that is"),
    ("there'd", "there would"),
    ("there'll", "there will"),
    ("there're", "there are"),
    ("there's", "there is"),
    ("these're", "these are"),
    ("they'd", "they would"),
    ("they'll", "they will"),
    ("they're", "they are"),
    ("they've", "they have"),
    ("this's", "this is"),
    ("those're", "those are"),
    ("wanna", "want to"),
    ("wasn't", "was not"),
    ("we'd", "we would"),
    ("we'll", "we will"),
    ("we're", "we are"),
    ("we've", "we have"),
    ("weren't", "were not"),
    ("what'd", "what did"),
    ("what'll", "what will"),
    ("what're", "what are"),
    ("what's", "what is"),
    ("what've", "what have"),
    ("when's", "when is"),
    ("where'd", "where did"),
    ("where're", "where are"),
    ("where's", "where is"),
    ("where've", "where have"),
    ("who'd", "who would"),
    ("who'll", "who will"),
    ("who're", "who are"),
    ("who's", "who is"),
    ("who've", "who have"),
    ("why'd", "why did"),
    ("why's", "why is"),
    ("won't", "will not"),
    ("would've", "would have"),
    ("wouldn't", "would not"),
    ("y'all", "you all"),
    ("you'd", "you would"),
    ("you'll", "you will"),
    ("you're", "you are"),
    ("you've", "you have"),
];

/// Contraction table, filler list and the two switches that drive
/// [`normalize`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormRuleSet {
    contractions: BTreeMap<String, Vec<String>>,
    fillers: BTreeSet<String>,
    pub casefold: bool,
    pub strip_punct: bool,
}

impl Default for NormRuleSet {
    fn default() -> Self {
        let contractions = DEFAULT_CONTRACTIONS
            .iter()
            .map(|(k, v)| (k.to_string(), v.split(' ').map(str::to_string).collect()))
            .collect();
        let fillers = DEFAULT_FILLERS.iter().map(|s| s.to_string()).collect();
        NormRuleSet { contractions, fillers, casefold: true, strip_punct: true }
    }
}

impl NormRuleSet {
    /// Builds a rule set from explicit tables, validating them.
    pub fn new<C, F>(contractions: C, fillers: F, casefold: bool, strip_punct: bool) -> Result<Self, TextNormError>
    where
        C: IntoIterator<Item = (String, String)>,
        F: IntoIterator<Item = String>,
    {
        let contractions = contractions
            .into_iter()
            .map(|(k, v)| (k, v.split_whitespace().map(str::to_string).collect()))
            .collect();
        let rules = NormRuleSet {
            contractions,
            fillers: fillers.into_iter().collect(),
            casefold,
            strip_punct,
        };
        rules.validate()?;
        Ok(rules)
    }

    /// Parses a rule file with `[contractions]` (`key<TAB>value`) and
    /// `[fillers]` (one word per line) sections. Blank lines and lines
    /// starting with `#` are skipped.
    pub fn parse(text: &str) -> Result<Self, TextNormError> {
        #[derive(PartialEq)]
        enum Section {
            None,
            Contractions,
            Fillers,
        }
        let mut section = Section::None;
        let mut contractions = Vec::new();
        let mut fillers = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            match line.trim() {
                "[contractions]" => {
                    section = Section::Contractions;
                    continue;
                }
                "[fillers]" => {
                    section = Section::Fillers;
                    continue;
                }
                s if s.starts_with('[') => {
                    return Err(TextNormError::RuleSyntax { line: line_no, msg: format!("unknown section {s}") })
                }
                _ => {}
            }
            match section {
                Section::None => {
                    return Err(TextNormError::RuleSyntax {
                        line: line_no,
                        msg: "entry outside of a section".into(),
                    })
                }
                Section::Contractions => {
                    let (k, v) = line.split_once('\t').ok_or_else(|| TextNormError::RuleSyntax {
                        line: line_no,
                        msg: "expected key<TAB>value".into(),
                    })?;
                    contractions.push((k.trim().to_string(), v.trim().to_string()));
                }
                Section::Fillers => fillers.push(line.trim().to_string()),
            }
        }
        Self::new(contractions, fillers, true, true)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, TextNormError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn contractions(&self) -> impl Iterator<Item = (&str, String)> {
        self.contractions.iter().map(|(k, v)| (k.as_str(), v.join(" ")))
    }

    pub fn fillers(&self) -> impl Iterator<Item = &str> {
        self.fillers.iter().map(String::as_str)
    }

    fn validate(&self) -> Result<(), TextNormError> {
        for f in &self.fillers {
            if f.is_empty() || f.chars().any(char::is_whitespace) {
                return Err(TextNormError::InvalidRules(format!("filler {f:?} must be a single word")));
            }
            if f.chars().any(char::is_uppercase) {
                return Err(TextNormError::InvalidRules(format!("filler {f:?} must be lowercase")));
            }
        }
        for (key, expansion) in &self.contractions {
            if key.is_empty() || key.chars().any(char::is_whitespace) {
                return Err(TextNormError::InvalidRules(format!("contraction key {key:?} must be a single word")));
            }
            if key.chars().any(char::is_uppercase) {
                return Err(TextNormError::InvalidRules(format!("contraction key {key:?} must be lowercase")));
            }
            if expansion.is_empty() {
                return Err(TextNormError::InvalidRules(format!("contraction {key:?} has an empty expansion")));
            }
            // Expansion words are emitted verbatim, so they must already be
            // in normal form for the output to be a fixed point.
            for w in expansion {
                let clean = w.chars().all(|c| c.is_alphanumeric() || c == '\'')
                    && !w.starts_with('\'')
                    && !w.ends_with('\'')
                    && !w.chars().any(char::is_uppercase);
                if !clean || self.fillers.contains(w) || self.contractions.contains_key(w) {
                    return Err(TextNormError::InvalidRules(format!(
                        "expansion word {w:?} of {key:?} is not in normal form"
                    )));
                }
            }
        }
        Ok(())
    }

    fn emit(&self, word: &str, out: &mut Vec<String>) {
        if self.fillers.contains(word) {
            return;
        }
        match self.contractions.get(word) {
            Some(expansion) => out.extend(expansion.iter().cloned()),
            None => out.push(word.to_string()),
        }
    }
}

/// A tokenized transcript: non-empty words without internal whitespace.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct WordSeq(Vec<String>);

impl WordSeq {
    pub fn new(words: Vec<String>) -> Result<Self, TextNormError> {
        if let Some(index) = words.iter().position(|w| w.is_empty() || w.chars().any(char::is_whitespace)) {
            return Err(TextNormError::InvalidWord { index });
        }
        Ok(WordSeq(words))
    }

    pub fn words(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<String> {
        self.0
    }
}

impl fmt::Display for WordSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.join(" "))
    }
}

impl<'a> FromIterator<&'a str> for WordSeq {
    /// Splits every item on whitespace, so the invariants always hold.
    fn from_iter<I: IntoIterator<Item = &'a str>>(iter: I) -> Self {
        WordSeq(iter.into_iter().flat_map(str::split_whitespace).map(str::to_string).collect())
    }
}

fn is_apostrophe(c: char) -> bool {
    matches!(c, '\'' | '\u{2019}' | '\u{2018}' | '\u{02bc}')
}

/// Splits one whitespace-free token into its punctuation-free pieces.
///
/// Kept characters: alphanumerics, apostrophes with alphanumerics on both
/// sides, and `.`/`,` with ASCII digits on both sides (so "3.5" and "1,000"
/// survive).
fn split_on_punct(token: &str) -> Vec<String> {
    let chars: Vec<char> = token.chars().collect();
    let mut pieces = Vec::new();
    let mut cur = String::new();
    for (i, &c) in chars.iter().enumerate() {
        let prev = i.checked_sub(1).map(|j| chars[j]);
        let next = chars.get(i + 1).copied();
        let keep = if c.is_alphanumeric() {
            true
        } else if c == '\'' {
            prev.is_some_and(char::is_alphanumeric) && next.is_some_and(char::is_alphanumeric)
        } else if c == '.' || c == ',' {
            prev.is_some_and(|p| p.is_ascii_digit()) && next.is_some_and(|n| n.is_ascii_digit())
        } else {
            false
        };
        if keep {
            cur.push(c);
        } else if !cur.is_empty() {
            pieces.push(std::mem::take(&mut cur));
        }
    }
    if !cur.is_empty() {
        pieces.push(cur);
    }
    pieces
}

/// Normalizes `text` under `rules`. Empty input gives empty output.
pub fn normalize(text: &str, rules: &NormRuleSet) -> String {
    let mut out: Vec<String> = Vec::new();
    for raw in text.split_whitespace() {
        let mut token: String = raw.chars().map(|c| if is_apostrophe(c) { '\'' } else { c }).collect();
        if rules.casefold {
            token.make_ascii_lowercase();
        }
        if !rules.strip_punct {
            rules.emit(&token, &mut out);
            continue;
        }
        // Whole-token lookup first so hyphenated fillers like "mm-hmm" match.
        let core = token.trim_matches(|c: char| !c.is_alphanumeric());
        if rules.fillers.contains(core) || rules.contractions.contains_key(core) {
            rules.emit(core, &mut out);
            continue;
        }
        for piece in split_on_punct(&token) {
            rules.emit(&piece, &mut out);
        }
    }
    out.join(" ")
}

/// Splits normalized text on runs of whitespace.
pub fn tokenize_words(text: &str) -> WordSeq {
    std::iter::once(text).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn norm(s: &str) -> String {
        normalize(s, &NormRuleSet::default())
    }

    #[test]
    fn contraction_and_punctuation() {
        assert_eq!(norm("There's a cat."), "there is a cat");
    }

    #[test]
    fn empty_input() {
        assert_eq!(norm(""), "");
        assert_eq!(norm("   \t\n"), "");
    }

    #[test]
    fn fillers_removed() {
        assert_eq!(norm("ummm there is"), "there is");
        assert_eq!(norm("Mm-hmm, uh, yes."), "yes");
    }

    #[test]
    fn curly_apostrophe_is_unified() {
        assert_eq!(norm("Don\u{2019}t go"), "do not go");
    }

    #[test]
    fn numerals_left_as_is() {
        assert_eq!(norm("It costs $3.50, or 1,000 yen!"), "it costs 3.50 or 1,000 yen");
        assert_eq!(norm("call 911"), "call 911");
    }

    #[test]
    fn possessive_apostrophe_kept_edge_quotes_dropped() {
        assert_eq!(norm("'John's' dogs' bowl"), "john's dogs bowl");
    }

    #[test]
    fn hyphen_splits_words() {
        assert_eq!(norm("state-of-the-art"), "state of the art");
    }

    #[test]
    fn flags_respected() {
        let mut rules = NormRuleSet::default();
        rules.casefold = false;
        rules.strip_punct = false;
        assert_eq!(normalize("Hello,  World um", &rules), "Hello, World");
    }

    #[test]
    fn default_table_size() {
        let rules = NormRuleSet::default();
        assert!(rules.contractions().count() >= 90);
        assert_eq!(rules.fillers().count(), 9);
    }

    #[test]
    fn tokenize_examples() {
        assert_eq!(tokenize_words("there is a cat").words(), ["there", "is", "a", "cat"]);
        assert!(tokenize_words("").is_empty());
        assert_eq!(tokenize_words("a  b").words(), ["a", "b"]);
    }

    #[test]
    fn word_seq_rejects_bad_words() {
        assert!(WordSeq::new(vec!["a".into(), "".into()]).is_err());
        assert!(WordSeq::new(vec!["a b".into()]).is_err());
        assert!(WordSeq::new(vec!["ok".into()]).is_ok());
    }

    #[test]
    fn rule_file_parse() {
        let text = "# custom\n[contractions]\ny'know\tyou know\n\n[fillers]\nhmm\n";
        let rules = NormRuleSet::parse(text).unwrap();
        assert_eq!(normalize("Hmm, y'know it", &rules), "you know it");
        // defaults are replaced, not merged
        assert_eq!(normalize("there's", &rules), "there's");
    }

    #[test]
    fn rule_file_errors() {
        assert!(matches!(NormRuleSet::parse("foo\n"), Err(TextNormError::RuleSyntax { line: 1, .. })));
        assert!(matches!(
            NormRuleSet::parse("[contractions]\nno-tab here\n"),
            Err(TextNormError::RuleSyntax { line: 2, .. })
        ));
        assert!(matches!(NormRuleSet::parse("[bogus]\n"), Err(TextNormError::RuleSyntax { .. })));
        assert!(matches!(NormRuleSet::parse("[fillers]\nUm\n"), Err(TextNormError::InvalidRules(_))));
        assert!(matches!(
            NormRuleSet::parse("[contractions]\nCan't\tcan not\n"),
            Err(TextNormError::InvalidRules(_))
        ));
        // expansion must not reintroduce a filler
        assert!(matches!(
            NormRuleSet::parse("[contractions]\nx'y\tum ok\n[fillers]\num\n"),
            Err(TextNormError::InvalidRules(_))
        ));
    }

    proptest! {
        #[test]
        fn idempotent(s in "\\PC{0,40}") {
            let once = norm(&s);
            prop_assert_eq!(norm(&once), once);
        }

        #[test]
        fn idempotent_wordy(words in proptest::collection::vec(
            prop_oneof![
                Just("There's".to_string()), Just("UMM,".to_string()), Just("mm-hmm".to_string()),
                Just("'tis".to_string()), Just("3.5%".to_string()), Just("rock'n'roll".to_string()),
                Just("uh-oh".to_string()), Just("--".to_string()), "[a-zA-Z',.!?-]{1,8}",
            ], 0..12)) {
            let s = words.join(" ");
            let once = norm(&s);
            prop_assert_eq!(norm(&once), once.clone());
            prop_assert!(!once.starts_with(' ') && !once.ends_with(' ') && !once.contains("  "));
        }

        #[test]
        fn tokenize_join_round_trip(s in "\\PC{0,40}") {
            let n = norm(&s);
            prop_assert_eq!(tokenize_words(&n).to_string(), n);
        }
    }
}
