//! Text normalisation, vocabulary construction and vectorization.
//!
//! The token pipeline runs, in order: NFC normalisation, lowercasing,
//! URL/@mention removal and hashtag unwrapping, punctuation/digit/emoji
//! stripping (any non-alphabetic character becomes a separator),
//! whitespace splitting, stopword and short-token filtering, then optional
//! suffix stemming. Mentions are identities so they are dropped whole;
//! hashtags are content so only the `#` goes.
//!
//! Stemming is iterated to a fixpoint and the stopword/length filter is
//! re-applied to the stemmed form, which makes the whole pipeline
//! idempotent: feeding its own output back in changes nothing.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use unicode_normalization::UnicodeNormalization;

use crate::stem::stem;

/// One ingested message. Timestamps are UTC epoch seconds; parsing from
/// wire formats happens upstream.
#[derive(Clone, Debug, PartialEq)]
pub struct RawTweet {
    pub id: String,
    pub timestamp: i64,
    pub text: String,
    pub likes: u64,
    pub retweets: u64,
    pub latitude: Option<f64>,
    pub longitude: Option<f64>,
    pub query_tag: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TokenizedDoc {
    pub tweet_id: String,
    pub tokens: Vec<String>,
}

/// Full pipeline including the stemming pass (topic-modelling branch).
pub fn preprocess(text: &str, stopwords: &BTreeSet<String>) -> Vec<String> {
    tokenize(text, stopwords, true)
}

/// Pipeline without stemming: sentiment lexicons key on surface forms.
pub fn preprocess_surface(text: &str, stopwords: &BTreeSet<String>) -> Vec<String> {
    tokenize(text, stopwords, false)
}

fn tokenize(text: &str, stopwords: &BTreeSet<String>, apply_stem: bool) -> Vec<String> {
    let normalized: String = text.nfc().collect::<String>().to_lowercase();
    let mut out = Vec::new();
    for raw in normalized.split_whitespace() {
        if raw.starts_with("http://") || raw.starts_with("https://") || raw.starts_with("www.") {
            continue;
        }
        if raw.starts_with('@') {
            continue;
        }
        let unhashed = raw.trim_start_matches('#');
        if unhashed.starts_with('@') {
            continue;
        }
        // Everything non-alphabetic separates; this also removes digits,
        // punctuation and emoji while keeping non-ASCII letters.
        let cleaned: String = unhashed
            .chars()
            .map(|c| if c.is_alphabetic() { c } else { ' ' })
            .collect();
        for piece in cleaned.split_whitespace() {
            if piece.chars().count() < 2 || stopwords.contains(piece) {
                continue;
            }
            if apply_stem {
                let stemmed = stem_fixpoint(piece);
                if stemmed.chars().count() < 2 || stopwords.contains(&stemmed) {
                    continue;
                }
                out.push(stemmed);
            } else {
                out.push(piece.to_string());
            }
        }
    }
    out
}

/// Suffix rules can expose a further strippable suffix ("agreed" ->
/// "agre" -> "agr"); iterating leaves every emitted token stable. The
/// stemmer never lengthens a word beyond one pass so this terminates.
fn stem_fixpoint(token: &str) -> String {
    let mut current = stem(token);
    for _ in 0..8 {
        let next = stem(&current);
        if next == current {
            break;
        }
        current = next;
    }
    current
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum VocabularyError {
    #[error("no term reaches the minimum corpus frequency of {min_occurrence}")]
    Empty { min_occurrence: usize },
}

/// Capped vocabulary ordered by descending corpus frequency, ties broken
/// lexicographically.
#[derive(Clone, Debug, PartialEq)]
pub struct Vocabulary {
    terms: Vec<String>,
    frequencies: Vec<u64>,
    index: BTreeMap<String, usize>,
}

impl Vocabulary {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn term(&self, id: usize) -> &str {
        &self.terms[id]
    }

    pub fn frequency(&self, id: usize) -> u64 {
        self.frequencies[id]
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }
}

/// Retains terms whose total corpus frequency is at least `min_occurrence`,
/// keeping at most `max_features` by (frequency desc, term asc).
pub fn build_vocabulary(
    docs: &[TokenizedDoc],
    min_occurrence: usize,
    max_features: usize,
) -> Result<Vocabulary, VocabularyError> {
    let mut counts: BTreeMap<&str, u64> = BTreeMap::new();
    for doc in docs {
        for token in &doc.tokens {
            *counts.entry(token.as_str()).or_insert(0) += 1;
        }
    }
    let mut surviving: Vec<(&str, u64)> = counts
        .into_iter()
        .filter(|&(_, c)| c >= min_occurrence as u64)
        .collect();
    if surviving.is_empty() {
        return Err(VocabularyError::Empty { min_occurrence });
    }
    surviving.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    surviving.truncate(max_features);

    let terms: Vec<String> = surviving.iter().map(|(t, _)| t.to_string()).collect();
    let frequencies: Vec<u64> = surviving.iter().map(|&(_, c)| c).collect();
    let index = terms
        .iter()
        .enumerate()
        .map(|(i, t)| (t.clone(), i))
        .collect();
    Ok(Vocabulary {
        terms,
        frequencies,
        index,
    })
}

/// Sparse document-term count matrix. Rows follow document order; the
/// entries of a row are sorted by term id and hold strictly positive counts.
#[derive(Clone, Debug, PartialEq)]
pub struct DocTermMatrix {
    n_terms: usize,
    rows: Vec<Vec<(usize, u32)>>,
}

impl DocTermMatrix {
    pub fn n_docs(&self) -> usize {
        self.rows.len()
    }

    pub fn n_terms(&self) -> usize {
        self.n_terms
    }

    pub fn row(&self, doc: usize) -> &[(usize, u32)] {
        &self.rows[doc]
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, u32)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(d, row)| row.iter().map(move |&(t, c)| (d, t, c)))
    }

    pub fn total_tokens(&self) -> u64 {
        self.entries().map(|(_, _, c)| c as u64).sum()
    }

    pub fn doc_len(&self, doc: usize) -> u64 {
        self.rows[doc].iter().map(|&(_, c)| c as u64).sum()
    }

    /// Builds a matrix directly from per-document (term, count) rows.
    /// Counts must be positive and term ids in range; rows get sorted.
    pub fn from_rows(n_terms: usize, mut rows: Vec<Vec<(usize, u32)>>) -> Self {
        for row in &mut rows {
            row.sort_by_key(|&(t, _)| t);
            debug_assert!(row.iter().all(|&(t, c)| t < n_terms && c > 0));
            debug_assert!(row.windows(2).all(|w| w[0].0 < w[1].0), "duplicate term");
        }
        DocTermMatrix { n_terms, rows }
    }
}

/// Counts in-vocabulary token occurrences per document. Out-of-vocabulary
/// tokens are ignored; documents with no in-vocabulary tokens produce
/// empty rows.
pub fn vectorize(docs: &[TokenizedDoc], vocab: &Vocabulary) -> DocTermMatrix {
    assert!(!vocab.is_empty(), "vectorize: empty vocabulary");
    let rows = docs
        .iter()
        .map(|doc| {
            let mut row: BTreeMap<usize, u32> = BTreeMap::new();
            for token in &doc.tokens {
                if let Some(t) = vocab.index_of(token) {
                    *row.entry(t).or_insert(0) += 1;
                }
            }
            row.into_iter().collect()
        })
        .collect();
    DocTermMatrix {
        n_terms: vocab.len(),
        rows,
    }
}
