//! `tidemark report`: renderer-agnostic tables for every figure type —
//! per-topic count series, boxplot five-number summaries with outliers,
//! skewness, normalized histograms, the forecast overlay and the residual
//! diagnostics.

use tidemark_core::stats::{boxplot, histogram, skewness};
use tidemark_core::timegrid::derive_features;

use crate::commands::Ctx;
use crate::error::Result;
use crate::formats::{
    fmt_f64, read_forecast, read_json, read_onestep, read_topic_series, write_boxplots,
    write_fig_forecast, write_histograms, write_json, write_skewness, DiagFile,
};
use crate::ingest::epoch_to_rfc3339;
use crate::iofs::atomic_write;

const HISTOGRAM_BINS: usize = 20;

pub fn run(ctx: &Ctx) -> Result<Vec<String>> {
    let mut outputs = Vec::new();

    // Per-topic tweet-count series (the event-detection figure).
    let (starts, dominant, counts) =
        read_topic_series(&ctx.require("topic_series.csv", "topics")?)?;
    let k = counts.len();
    {
        let mut text = String::from("time");
        for t in 0..k {
            text.push_str(&format!(",count_topic_{t}"));
        }
        text.push('\n');
        for (i, &start) in starts.iter().enumerate() {
            text.push_str(&epoch_to_rfc3339(start));
            for topic_counts in counts.iter() {
                text.push_str(&format!(",{}", topic_counts[i]));
            }
            text.push('\n');
        }
        atomic_write(&ctx.out("report/fig_topic_counts.csv"), text.as_bytes())?;
        outputs.push("report/fig_topic_counts.csv".into());
    }

    // Distribution tables: sentiment per tweet grouped by dominant topic,
    // plus overall tweet count. Empty buckets carry no sentiment sample
    // and are left out of the distributions.
    let series = ctx.load_clean_buckets()?;
    let features = derive_features(&series);
    let spt = features.column("sentiment_per_tweet").unwrap();
    let mut groups: Vec<(String, Vec<f64>)> = (0..k)
        .map(|t| (format!("sentiment_per_tweet_topic_{t}"), Vec::new()))
        .collect();
    for (i, bucket) in series.buckets.iter().enumerate() {
        if bucket.tweet_count > 0 {
            groups[dominant[i]].1.push(spt[i]);
        }
    }
    let counts_col: Vec<f64> = series.counts();
    let mut box_rows = Vec::new();
    let mut skew_rows = Vec::new();
    let mut hist_rows = Vec::new();
    for (name, values) in &groups {
        if values.len() >= 3 {
            box_rows.push((name.clone(), boxplot(values)));
            skew_rows.push((name.clone(), skewness(values)));
            hist_rows.push((name.clone(), histogram(values, HISTOGRAM_BINS)));
        }
    }
    box_rows.push(("tweet_count".to_string(), boxplot(&counts_col)));
    if let Some(price_path) = &ctx.config.price {
        let price = crate::price::read_price(price_path)?;
        box_rows.push(("price".to_string(), boxplot(&price.values)));
    }
    write_boxplots(&ctx.out("report/fig_boxplots.csv"), &box_rows)?;
    write_skewness(&ctx.out("report/fig_skewness.csv"), &skew_rows)?;
    write_histograms(&ctx.out("report/fig_histograms.csv"), &hist_rows)?;
    outputs.push("report/fig_boxplots.csv".into());
    outputs.push("report/fig_skewness.csv".into());
    outputs.push("report/fig_histograms.csv".into());

    // Observed / one-step / forecast overlay.
    let onestep = read_onestep(&ctx.require("onestep.csv", "evaluate")?)?;
    let forecast = read_forecast(&ctx.require("forecast.csv", "forecast")?)?;
    let mut rows: Vec<(i64, Option<f64>, Option<f64>, Option<f64>, Option<f64>, Option<f64>)> =
        onestep
            .iter()
            .map(|(t, obs, pred)| (*t, Some(*obs), *pred, None, None, None))
            .collect();
    for (t, mean, lo, hi) in forecast {
        if let Some(row) = rows.iter_mut().find(|r| r.0 == t) {
            row.3 = Some(mean);
            row.4 = Some(lo);
            row.5 = Some(hi);
        } else {
            rows.push((t, None, None, Some(mean), Some(lo), Some(hi)));
        }
    }
    rows.sort_by_key(|r| r.0);
    write_fig_forecast(&ctx.out("report/fig_forecast.csv"), &rows)?;
    outputs.push("report/fig_forecast.csv".into());

    // Diagnostics tables from the persisted report.
    let diag: DiagFile = read_json(&ctx.require("diag.json", "evaluate")?)?;
    {
        let mut text = String::from("index,standardized\n");
        for (i, v) in diag.standardized.iter().enumerate() {
            text.push_str(&format!("{i},{}\n", fmt_f64(*v)));
        }
        atomic_write(&ctx.out("report/fig_diag_residuals.csv"), text.as_bytes())?;

        let mut text = String::from("bin_lo,bin_hi,mass\n");
        for (lo, hi, mass) in &diag.histogram {
            text.push_str(&format!("{},{},{}\n", fmt_f64(*lo), fmt_f64(*hi), fmt_f64(*mass)));
        }
        atomic_write(&ctx.out("report/fig_diag_histogram.csv"), text.as_bytes())?;

        let mut text = String::from("theoretical,sample\n");
        for (theo, sample) in &diag.qq {
            text.push_str(&format!("{},{}\n", fmt_f64(*theo), fmt_f64(*sample)));
        }
        atomic_write(&ctx.out("report/fig_diag_qq.csv"), text.as_bytes())?;

        let mut text = String::from("lag,acf,band\n");
        for (lag, v) in diag.acf.iter().enumerate() {
            text.push_str(&format!("{lag},{},{}\n", fmt_f64(*v), fmt_f64(diag.acf_band)));
        }
        atomic_write(&ctx.out("report/fig_diag_acf.csv"), text.as_bytes())?;

        write_json(
            &ctx.out("report/diag_summary.json"),
            &serde_json::json!({
                "overlay_mean": diag.overlay_mean,
                "overlay_std": diag.overlay_std,
                "ljung_box_stat": diag.ljung_box_stat,
                "ljung_box_pvalue": diag.ljung_box_pvalue,
            }),
        )?;
    }
    outputs.push("report/fig_diag_residuals.csv".into());
    outputs.push("report/fig_diag_histogram.csv".into());
    outputs.push("report/fig_diag_qq.csv".into());
    outputs.push("report/fig_diag_acf.csv".into());
    outputs.push("report/diag_summary.json".into());
    Ok(outputs)
}
