//! `tidemark events`: robust-z spike detection, outlier removal and the
//! ranked-term report for each flagged interval.

use tidemark_core::timegrid::{detect_spikes, remove_outliers, top_terms};

use crate::commands::Ctx;
use crate::error::Result;
use crate::formats::{write_bucket_rows, write_buckets, write_flags, write_spike_terms};

pub fn run(ctx: &Ctx) -> Result<Vec<String>> {
    let series = ctx.load_buckets("buckets.csv", "bucket_tokens.txt", "resample")?;
    let flags = detect_spikes(&series, ctx.config.spike_threshold)?;
    write_flags(&ctx.out("flags.csv"), &flags)?;

    let (cleaned, removed) = remove_outliers(&series, &flags);
    write_buckets(
        &ctx.out("buckets_clean.csv"),
        &ctx.out("bucket_tokens_clean.txt"),
        &cleaned,
    )?;
    write_bucket_rows(&ctx.out("removed.csv"), &removed)?;

    // Word-cloud substitute: ranked term frequencies for every spike.
    let mut spike_terms = Vec::new();
    for (i, flag) in flags.iter().enumerate() {
        if flag.flagged {
            spike_terms.push((
                flag.bucket_start,
                top_terms(&series, i..i + 1, ctx.config.spike_top_terms),
            ));
        }
    }
    write_spike_terms(&ctx.out("spike_terms.csv"), &spike_terms)?;
    Ok(vec![
        "flags.csv".into(),
        "buckets_clean.csv".into(),
        "bucket_tokens_clean.txt".into(),
        "removed.csv".into(),
        "spike_terms.csv".into(),
    ])
}
