//! `tidemark topics`: vocabulary, document-term matrix, topic-count
//! selection and the final LDA fit.
//!
//! Documents default to the 5-minute bucket token bags; `--per-tweet`
//! vectorizes individual tweets instead (no bucket labelling then, since
//! mixture rows no longer correspond to buckets).

use tidemark_core::corpus::{build_vocabulary, preprocess, vectorize, TokenizedDoc};
use tidemark_core::topics::{fit_lda, label_buckets, select_k, top_words, LdaConfig};

use crate::commands::Ctx;
use crate::error::Result;
use crate::formats::{
    write_dtm, write_json, write_keywords, write_perplexity_table, write_topic_series,
    write_vocabulary, ModelFile,
};
use crate::iofs::read_to_string;
use crate::manifest::sha256_hex;

fn lda_config(ctx: &Ctx, k: usize, iterations: usize, burn_in: usize) -> LdaConfig {
    LdaConfig {
        n_topics: k,
        alpha: ctx.config.lda.alpha.unwrap_or(50.0 / k as f64),
        beta: ctx.config.lda.beta,
        iterations,
        burn_in,
        seed: ctx.config.seed,
    }
}

pub fn run(ctx: &Ctx) -> Result<Vec<String>> {
    let section = &ctx.config.lda;
    let series = ctx.load_clean_buckets()?;

    let docs: Vec<TokenizedDoc> = if ctx.config.per_tweet_docs {
        let tweets = ctx.load_tweets_filtered()?;
        let stopwords = ctx.stopwords()?;
        tweets
            .iter()
            .map(|t| TokenizedDoc {
                tweet_id: t.id.clone(),
                tokens: preprocess(&t.text, &stopwords),
            })
            .collect()
    } else {
        series
            .buckets
            .iter()
            .enumerate()
            .map(|(i, bucket)| {
                let mut tokens = Vec::new();
                for (token, &count) in &bucket.token_bag {
                    for _ in 0..count {
                        tokens.push(token.clone());
                    }
                }
                TokenizedDoc {
                    tweet_id: format!("bucket{i}"),
                    tokens,
                }
            })
            .collect()
    };

    let vocab = build_vocabulary(&docs, ctx.config.min_occurrence, ctx.config.max_features)?;
    write_vocabulary(&ctx.out("vocabulary.csv"), &vocab)?;
    let dtm = vectorize(&docs, &vocab);
    write_dtm(&ctx.out("dtm.csv"), &dtm)?;

    let mut outputs = vec!["vocabulary.csv".to_string(), "dtm.csv".to_string()];

    let k = match section.k {
        Some(k) => k,
        None => {
            let select_iters = section.select_iterations.max(2);
            let template = lda_config(ctx, section.k_min, select_iters, select_iters * 4 / 5);
            let (best, table) = select_k(&dtm, section.k_min..=section.k_max, &template)?;
            write_perplexity_table(&ctx.out("perplexity.csv"), &table, best)?;
            outputs.push("perplexity.csv".into());
            best
        }
    };

    let config = lda_config(ctx, k, section.iterations, section.burn_in);
    let model = fit_lda(&dtm, &config)?;
    if model.skipped_empty_docs > 0 {
        eprintln!(
            "topics: {} empty documents skipped by the sampler",
            model.skipped_empty_docs
        );
    }

    let vocab_hash = sha256_hex(read_to_string(&ctx.out("vocabulary.csv"))?.as_bytes());
    write_json(&ctx.out("model.json"), &ModelFile::from_model(&model, vocab_hash))?;
    outputs.push("model.json".into());

    let keywords: Vec<Vec<(String, f64)>> = (0..k)
        .map(|topic| top_words(&model, &vocab, topic, section.top_words))
        .collect::<std::result::Result<_, _>>()?;
    write_keywords(&ctx.out("keywords.csv"), &keywords)?;
    outputs.push("keywords.csv".into());

    if !ctx.config.per_tweet_docs {
        let labels = label_buckets(&model, &series)?;
        write_topic_series(&ctx.out("topic_series.csv"), &series, &labels)?;
        outputs.push("topic_series.csv".into());
    } else {
        eprintln!("topics: per-tweet documents; bucket labelling skipped");
    }
    Ok(outputs)
}
