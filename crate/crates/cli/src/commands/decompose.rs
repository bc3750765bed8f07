//! `tidemark decompose`: feature table, correlation matrix and classical
//! decomposition of the model features (and the price series when
//! configured).

use tidemark_core::decompose::decompose_additive;
use tidemark_core::timegrid::{correlation_matrix, derive_features, FeatureTable};

use crate::commands::Ctx;
use crate::error::Result;
use crate::formats::{write_correlation, write_decomposition, write_features};
use crate::price::read_price;

pub fn run(ctx: &Ctx) -> Result<Vec<String>> {
    let series = ctx.load_clean_buckets()?;
    let features = derive_features(&series);
    let starts: Vec<i64> = series.buckets.iter().map(|b| b.bucket_start).collect();
    write_features(&ctx.out("features.csv"), &starts, &features)?;

    // Correlation over the aggregate columns; this is where the sums show
    // up as near-linear functions of the tweet count.
    let wide = FeatureTable {
        names: vec![
            "tweet_count".into(),
            "likes_sum".into(),
            "retweets_sum".into(),
            "sentiment_sum".into(),
            "sentiment_per_tweet".into(),
        ],
        columns: vec![
            series.counts(),
            series.buckets.iter().map(|b| b.likes.sum).collect(),
            series.buckets.iter().map(|b| b.retweets.sum).collect(),
            series.buckets.iter().map(|b| b.sentiment.sum).collect(),
            features.column("sentiment_per_tweet").unwrap().to_vec(),
        ],
    };
    write_correlation(&ctx.out("correlation.csv"), &correlation_matrix(&wide)?)?;

    let mut outputs = vec![
        "features.csv".to_string(),
        "correlation.csv".to_string(),
    ];
    let period = ctx.config.decompose.bucket_period;
    for name in ["tweet_count", "sentiment_per_tweet"] {
        let column = features.column(name).unwrap();
        let result = decompose_additive(column, period)?;
        let file = format!("decompose_{name}.csv");
        write_decomposition(&ctx.out(&file), column, &result)?;
        outputs.push(file);
    }

    if let Some(path) = &ctx.config.price {
        let price = read_price(path)?;
        let result = decompose_additive(&price.values, ctx.config.decompose.price_period)?;
        write_decomposition(&ctx.out("decompose_price.csv"), &price.values, &result)?;
        outputs.push("decompose_price.csv".into());
    }
    Ok(outputs)
}
