//! `tidemark score`: lexicon polarity per tweet.
//!
//! The sentiment branch tokenizes without stemming and without stopword
//! removal: lexicons key on surface forms and the standard stopword list
//! would swallow the negators.

use std::collections::BTreeSet;

use tidemark_core::corpus::preprocess_surface;
use tidemark_core::sentiment::score;

use crate::commands::Ctx;
use crate::error::Result;
use crate::formats::write_scores;
use crate::ingest::from_jsonl;
use crate::iofs::read_to_string;
use crate::lexicon::load_lexicon;

pub fn run(ctx: &Ctx) -> Result<Vec<String>> {
    let tweets_path = ctx.require("tweets.jsonl", "ingest")?;
    let tweets = from_jsonl(&read_to_string(&tweets_path)?)?;
    let lexicon_path = ctx.config.require_lexicon()?;
    let loaded = load_lexicon(lexicon_path, ctx.config.negators.as_deref())?;
    if loaded.duplicate_warnings > 0 {
        eprintln!(
            "score: {} duplicate lexicon entries (last value kept)",
            loaded.duplicate_warnings
        );
    }
    let no_stopwords = BTreeSet::new();
    let scores: Vec<_> = tweets
        .iter()
        .map(|t| {
            let tokens = preprocess_surface(&t.text, &no_stopwords);
            score(&t.id, &tokens, &loaded.lexicon)
        })
        .collect();
    write_scores(&ctx.out("scores.csv"), &scores)?;
    Ok(vec!["scores.csv".into()])
}
