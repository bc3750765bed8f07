//! Lexicon, negator and stopword loading.
//!
//! Lexicon files are two-column CSV `term,polarity`; an optional trailing
//! section introduced by a `#negators` line lists one negator per line.
//! Negators can also come from a separate file. Stopwords default to an
//! embedded English list.

use std::collections::BTreeSet;
use std::path::Path;

use tidemark_core::sentiment::{Lexicon, DEFAULT_NEGATION_WINDOW};

use crate::error::{CliError, Result};
use crate::iofs::read_to_string;

const DEFAULT_STOPWORDS: &str = include_str!("data/stopwords.txt");

pub struct LoadedLexicon {
    pub lexicon: Lexicon,
    pub duplicate_warnings: usize,
}

pub fn parse_lexicon(content: &str, extra_negators: Option<&str>) -> Result<LoadedLexicon> {
    let mut entries: Vec<(String, f64)> = Vec::new();
    let mut negators: BTreeSet<String> = BTreeSet::new();
    let mut in_negators = false;
    for (lineno, raw) in content.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line == "#negators" {
            in_negators = true;
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        if in_negators {
            negators.insert(line.to_lowercase());
            continue;
        }
        let (term, polarity) = line.split_once(',').ok_or_else(|| {
            CliError::data(format!("lexicon line {}: expected term,polarity", lineno + 1))
        })?;
        let polarity: f64 = polarity.trim().parse().map_err(|_| {
            CliError::data(format!("lexicon line {}: bad polarity {polarity:?}", lineno + 1))
        })?;
        entries.push((term.trim().to_lowercase(), polarity));
    }
    if let Some(content) = extra_negators {
        for line in content.lines() {
            let term = line.trim();
            if !term.is_empty() && !term.starts_with('#') {
                negators.insert(term.to_lowercase());
            }
        }
    }
    if negators.is_empty() {
        negators = Lexicon::default_negators();
    }
    let (lexicon, duplicate_warnings) =
        Lexicon::build(entries, negators, DEFAULT_NEGATION_WINDOW)?;
    Ok(LoadedLexicon {
        lexicon,
        duplicate_warnings,
    })
}

pub fn load_lexicon(path: &Path, negators_path: Option<&Path>) -> Result<LoadedLexicon> {
    let content = read_to_string(path)?;
    let negators = match negators_path {
        Some(p) => Some(read_to_string(p)?),
        None => None,
    };
    parse_lexicon(&content, negators.as_deref())
}

pub fn default_stopwords() -> BTreeSet<String> {
    DEFAULT_STOPWORDS
        .lines()
        .map(|l| l.trim().to_string())
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .collect()
}

pub fn load_stopwords(path: Option<&Path>) -> Result<BTreeSet<String>> {
    match path {
        None => Ok(default_stopwords()),
        Some(p) => {
            let content = read_to_string(p)?;
            Ok(content
                .lines()
                .map(|l| l.trim().to_lowercase())
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .collect())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_lexicon_parses() {
        let loaded = parse_lexicon("good,0.7\n", None).unwrap();
        assert_eq!(loaded.lexicon.len(), 1);
        assert_eq!(loaded.lexicon.polarity_of("good"), Some(0.7));
        assert_eq!(loaded.duplicate_warnings, 0);
    }

    #[test]
    fn out_of_range_polarity_is_fatal() {
        assert!(parse_lexicon("bad,-2.0\n", None).is_err());
    }

    #[test]
    fn duplicates_keep_last_and_warn() {
        let loaded = parse_lexicon("good,0.5\ngood,0.7\n", None).unwrap();
        assert_eq!(loaded.duplicate_warnings, 1);
        assert_eq!(loaded.lexicon.polarity_of("good"), Some(0.7));
    }

    #[test]
    fn negators_section_and_file_merge() {
        let loaded = parse_lexicon("good,0.5\n#negators\nhardly\n", Some("barely\n")).unwrap();
        // Both custom negators present; defaults replaced.
        let score = tidemark_core::sentiment::score(
            "t",
            &["hardly".into(), "good".into()],
            &loaded.lexicon,
        );
        assert_eq!(score.polarity, -0.5);
    }

    #[test]
    fn empty_lexicon_is_fatal() {
        assert!(parse_lexicon("", None).is_err());
        assert!(parse_lexicon("#negators\nnot\n", None).is_err());
    }

    #[test]
    fn default_stopwords_nonempty_and_lowercase() {
        let sw = default_stopwords();
        assert!(sw.len() > 100);
        assert!(sw.contains("the"));
        assert!(sw.iter().all(|w| w.chars().all(|c| c.is_ascii_lowercase() || c == '\'')));
    }
}
