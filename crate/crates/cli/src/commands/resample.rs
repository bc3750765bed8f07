//! `tidemark resample`: scored tweets -> fixed-interval bucket series.

use tidemark_core::corpus::{preprocess, TokenizedDoc};
use tidemark_core::timegrid::resample;

use crate::commands::Ctx;
use crate::error::Result;
use crate::formats::{read_scores, write_buckets};

pub fn run(ctx: &Ctx) -> Result<Vec<String>> {
    let tweets = ctx.load_tweets_filtered()?;
    let scores = read_scores(&ctx.require("scores.csv", "score")?)?;
    let stopwords = ctx.stopwords()?;
    let docs: Vec<TokenizedDoc> = tweets
        .iter()
        .map(|t| TokenizedDoc {
            tweet_id: t.id.clone(),
            tokens: preprocess(&t.text, &stopwords),
        })
        .collect();
    let series = resample(&tweets, &docs, &scores, ctx.config.interval_secs)?;
    write_buckets(
        &ctx.out("buckets.csv"),
        &ctx.out("bucket_tokens.txt"),
        &series,
    )?;
    Ok(vec!["buckets.csv".into(), "bucket_tokens.txt".into()])
}
