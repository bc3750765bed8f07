//! Lexicon-based polarity scoring with negation flips.
//!
//! The score of a token list is the arithmetic mean of the matched terms'
//! polarities, where a match preceded by a negator within the negation
//! window contributes with flipped sign. No matches means polarity zero.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum LexiconError {
    #[error("polarity {polarity} for term {term:?} outside [-1, 1]")]
    PolarityOutOfRange { term: String, polarity: f64 },
    #[error("lexicon has no scored terms")]
    Empty,
    #[error("negator {term:?} is also a scored term")]
    NegatorOverlap { term: String },
}

#[derive(Clone, Debug)]
pub struct Lexicon {
    entries: BTreeMap<String, f64>,
    negators: BTreeSet<String>,
    negation_window: usize,
}

/// Default negator set; `n't` matters for pre-tokenized inputs that keep
/// contraction suffixes.
pub const DEFAULT_NEGATORS: [&str; 4] = ["not", "no", "never", "n't"];

pub const DEFAULT_NEGATION_WINDOW: usize = 1;

impl Lexicon {
    /// Builds a lexicon from (term, polarity) pairs. Duplicate terms keep
    /// the last value; the number of overwritten entries is returned so
    /// callers can warn.
    pub fn build(
        entries: impl IntoIterator<Item = (String, f64)>,
        negators: BTreeSet<String>,
        negation_window: usize,
    ) -> Result<(Lexicon, usize), LexiconError> {
        let mut map = BTreeMap::new();
        let mut duplicates = 0usize;
        for (term, polarity) in entries {
            if !(-1.0..=1.0).contains(&polarity) || !polarity.is_finite() {
                return Err(LexiconError::PolarityOutOfRange { term, polarity });
            }
            if map.insert(term, polarity).is_some() {
                duplicates += 1;
            }
        }
        if map.is_empty() {
            return Err(LexiconError::Empty);
        }
        if let Some(term) = negators.iter().find(|n| map.contains_key(*n)) {
            return Err(LexiconError::NegatorOverlap { term: term.clone() });
        }
        Ok((
            Lexicon {
                entries: map,
                negators,
                negation_window,
            },
            duplicates,
        ))
    }

    pub fn default_negators() -> BTreeSet<String> {
        DEFAULT_NEGATORS.iter().map(|s| String::from(*s)).collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn polarity_of(&self, term: &str) -> Option<f64> {
        self.entries.get(term).copied()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SentimentScore {
    pub tweet_id: String,
    pub polarity: f64,
    pub matched_terms: usize,
}

/// Scores a token list against the lexicon. Tokens are expected unstemmed.
pub fn score(tweet_id: &str, tokens: &[String], lexicon: &Lexicon) -> SentimentScore {
    let mut sum = 0.0;
    let mut matched = 0usize;
    for (i, token) in tokens.iter().enumerate() {
        let Some(polarity) = lexicon.polarity_of(token) else {
            continue;
        };
        let window_start = i.saturating_sub(lexicon.negation_window);
        let negated = tokens[window_start..i]
            .iter()
            .any(|t| lexicon.negators.contains(t));
        sum += if negated { -polarity } else { polarity };
        matched += 1;
    }
    let polarity = if matched == 0 { 0.0 } else { sum / matched as f64 };
    SentimentScore {
        tweet_id: String::from(tweet_id),
        polarity,
        matched_terms: matched,
    }
}
