//! Artifact file formats. Every float is written with 17 significant
//! digits so outputs are byte-stable across runs and parse back to the
//! identical bit pattern.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use tidemark_core::corpus::{DocTermMatrix, Vocabulary};
use tidemark_core::linalg::Mat;
use tidemark_core::sarimax::{
    DiagnosticReport, EvalReport, ForecastResult, GridEntry, OneStepPredictions, OrderSpec,
    SarimaxFit,
};
use tidemark_core::sentiment::SentimentScore;
use tidemark_core::stats::BoxplotSummary;
use tidemark_core::timegrid::{
    BucketSeries, CoordStat, CorrelationMatrix, EventFlag, FeatureTable, IntervalBucket,
    StatTriple,
};
use tidemark_core::topics::{KCandidate, LdaConfig, LdaModel, TopicSeries};

use crate::error::{CliError, Result};
use crate::ingest::{epoch_to_rfc3339, rfc3339_to_epoch};
use crate::iofs::{atomic_write, read_to_string};

/// 17 significant digits: enough to round-trip any f64 exactly.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".to_string() } else { "-inf".to_string() }
    } else {
        format!("{v:.16e}")
    }
}

pub fn parse_f64(text: &str) -> Result<f64> {
    match text {
        "nan" => Ok(f64::NAN),
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        _ => text
            .parse()
            .map_err(|_| CliError::data(format!("bad float {text:?}"))),
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut writer = csv::WriterBuilder::new().from_writer(Vec::new());
    writer
        .write_record(header)
        .map_err(|e| CliError::data(format!("csv write: {e}")))?;
    for row in rows {
        writer
            .write_record(row)
            .map_err(|e| CliError::data(format!("csv write: {e}")))?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| CliError::data(format!("csv flush: {e}")))?;
    atomic_write(path, &bytes)
}

fn read_csv(path: &Path, expected_header: &[&str]) -> Result<Vec<Vec<String>>> {
    let content = read_to_string(path)?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(content.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
    let got: Vec<&str> = headers.iter().collect();
    if got != expected_header {
        return Err(CliError::data(format!(
            "{}: unexpected header {:?}, want {:?}",
            path.display(),
            got,
            expected_header
        )));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
        rows.push(record.iter().map(|f| f.to_string()).collect());
    }
    Ok(rows)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)
        .map_err(|e| CliError::data(format!("json serialize: {e}")))?;
    bytes.push(b'\n');
    atomic_write(path, &bytes)
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let content = read_to_string(path)?;
    serde_json::from_str(&content)
        .map_err(|e| CliError::data(format!("{}: {e}", path.display())))
}

// ---------------------------------------------------------------------
// Sentiment scores
// ---------------------------------------------------------------------

pub fn write_scores(path: &Path, scores: &[SentimentScore]) -> Result<()> {
    let rows = scores
        .iter()
        .map(|s| {
            vec![
                s.tweet_id.clone(),
                fmt_f64(s.polarity),
                s.matched_terms.to_string(),
            ]
        })
        .collect::<Vec<_>>();
    write_csv(path, &["tweet_id", "polarity", "matched_terms"], &rows)
}

pub fn read_scores(path: &Path) -> Result<BTreeMap<String, f64>> {
    let rows = read_csv(path, &["tweet_id", "polarity", "matched_terms"])?;
    let mut scores = BTreeMap::new();
    for row in rows {
        scores.insert(row[0].clone(), parse_f64(&row[1])?);
    }
    Ok(scores)
}

// ---------------------------------------------------------------------
// Bucket series (CSV plus token-bag sidecar)
// ---------------------------------------------------------------------

const BUCKET_HEADER: [&str; 15] = [
    "bucket_start",
    "tweet_count",
    "likes_sum",
    "likes_mean",
    "likes_std",
    "retweets_sum",
    "retweets_mean",
    "retweets_std",
    "sentiment_sum",
    "sentiment_mean",
    "sentiment_std",
    "lat_mean",
    "lat_std",
    "lon_mean",
    "lon_std",
];

/// Bucket table rows; usable both for full series and for removed-bucket
/// reports (which are not contiguous).
pub fn write_bucket_rows(path: &Path, buckets: &[IntervalBucket]) -> Result<()> {
    let rows = buckets
        .iter()
        .map(|b| {
            vec![
                epoch_to_rfc3339(b.bucket_start),
                b.tweet_count.to_string(),
                fmt_f64(b.likes.sum),
                fmt_f64(b.likes.mean),
                fmt_f64(b.likes.std),
                fmt_f64(b.retweets.sum),
                fmt_f64(b.retweets.mean),
                fmt_f64(b.retweets.std),
                fmt_f64(b.sentiment.sum),
                fmt_f64(b.sentiment.mean),
                fmt_f64(b.sentiment.std),
                fmt_opt(b.lat.map(|c| c.mean)),
                fmt_opt(b.lat.map(|c| c.std)),
                fmt_opt(b.lon.map(|c| c.mean)),
                fmt_opt(b.lon.map(|c| c.std)),
            ]
        })
        .collect::<Vec<_>>();
    write_csv(path, &BUCKET_HEADER, &rows)
}

pub fn write_buckets(path: &Path, sidecar: &Path, series: &BucketSeries) -> Result<()> {
    write_bucket_rows(path, &series.buckets)?;
    // Sidecar: one line per bucket, tokens repeated by multiplicity in
    // lexicographic order.
    let mut text = String::new();
    for bucket in &series.buckets {
        let mut first = true;
        for (token, &count) in &bucket.token_bag {
            for _ in 0..count {
                if !first {
                    text.push(' ');
                }
                text.push_str(token);
                first = false;
            }
        }
        text.push('\n');
    }
    atomic_write(sidecar, text.as_bytes())
}

pub fn read_buckets(path: &Path, sidecar: &Path, interval_secs: i64) -> Result<BucketSeries> {
    let rows = read_csv(path, &BUCKET_HEADER)?;
    let sidecar_text = read_to_string(sidecar)?;
    let mut bags = sidecar_text.lines();
    let mut buckets = Vec::with_capacity(rows.len());
    for row in rows {
        let triple = |a: &str, b: &str, c: &str| -> Result<StatTriple> {
            Ok(StatTriple {
                sum: parse_f64(a)?,
                mean: parse_f64(b)?,
                std: parse_f64(c)?,
            })
        };
        let coord = |a: &str, b: &str| -> Result<Option<CoordStat>> {
            if a.is_empty() {
                Ok(None)
            } else {
                Ok(Some(CoordStat {
                    mean: parse_f64(a)?,
                    std: parse_f64(b)?,
                }))
            }
        };
        let mut token_bag: BTreeMap<String, u64> = BTreeMap::new();
        if let Some(line) = bags.next() {
            for token in line.split_whitespace() {
                *token_bag.entry(token.to_string()).or_insert(0) += 1;
            }
        }
        buckets.push(IntervalBucket {
            bucket_start: rfc3339_to_epoch(&row[0])?,
            tweet_count: row[1]
                .parse()
                .map_err(|_| CliError::data(format!("bad count {:?}", row[1])))?,
            likes: triple(&row[2], &row[3], &row[4])?,
            retweets: triple(&row[5], &row[6], &row[7])?,
            sentiment: triple(&row[8], &row[9], &row[10])?,
            token_bag,
            lat: coord(&row[11], &row[12])?,
            lon: coord(&row[13], &row[14])?,
        });
    }
    let series = BucketSeries {
        interval_secs,
        buckets,
    };
    if !series.grid_is_uniform() {
        return Err(CliError::data(format!(
            "{}: bucket grid is not uniform at interval {interval_secs}s",
            path.display()
        )));
    }
    Ok(series)
}

// ---------------------------------------------------------------------
// Event flags and spike terms
// ---------------------------------------------------------------------

pub fn write_flags(path: &Path, flags: &[EventFlag]) -> Result<()> {
    let rows = flags
        .iter()
        .map(|f| {
            vec![
                epoch_to_rfc3339(f.bucket_start),
                fmt_f64(f.robust_z),
                f.flagged.to_string(),
            ]
        })
        .collect::<Vec<_>>();
    write_csv(path, &["bucket_start", "robust_z", "flagged"], &rows)
}

pub fn read_flags(path: &Path) -> Result<Vec<EventFlag>> {
    let rows = read_csv(path, &["bucket_start", "robust_z", "flagged"])?;
    rows.into_iter()
        .map(|row| {
            Ok(EventFlag {
                bucket_start: rfc3339_to_epoch(&row[0])?,
                robust_z: parse_f64(&row[1])?,
                flagged: row[2] == "true",
            })
        })
        .collect()
}

pub fn write_spike_terms(path: &Path, terms: &[(i64, Vec<(String, u64)>)]) -> Result<()> {
    let mut rows = Vec::new();
    for (bucket_start, ranked) in terms {
        for (rank, (term, freq)) in ranked.iter().enumerate() {
            rows.push(vec![
                epoch_to_rfc3339(*bucket_start),
                (rank + 1).to_string(),
                term.clone(),
                freq.to_string(),
            ]);
        }
    }
    write_csv(path, &["bucket_start", "rank", "term", "frequency"], &rows)
}

// ---------------------------------------------------------------------
// Vocabulary and document-term matrix
// ---------------------------------------------------------------------

pub fn write_vocabulary(path: &Path, vocab: &Vocabulary) -> Result<()> {
    let rows = (0..vocab.len())
        .map(|i| vec![vocab.term(i).to_string(), vocab.frequency(i).to_string()])
        .collect::<Vec<_>>();
    write_csv(path, &["term", "frequency"], &rows)
}

pub fn write_dtm(path: &Path, dtm: &DocTermMatrix) -> Result<()> {
    let rows = dtm
        .entries()
        .map(|(d, t, c)| vec![d.to_string(), t.to_string(), c.to_string()])
        .collect::<Vec<_>>();
    write_csv(path, &["doc", "term_id", "count"], &rows)
}

// ---------------------------------------------------------------------
// LDA model persistence
// ---------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
pub struct ModelFile {
    pub n_topics: usize,
    pub alpha: f64,
    pub beta: f64,
    pub iterations: usize,
    pub burn_in: usize,
    pub seed: u64,
    /// SHA-256 of the vocabulary file this model indexes into.
    pub vocab_hash: String,
    pub phi_rows: usize,
    pub phi_cols: usize,
    pub phi: Vec<f64>,
    pub theta_rows: usize,
    pub theta_cols: usize,
    pub theta: Vec<f64>,
    pub loglik_trace: Vec<f64>,
    pub skipped_empty_docs: usize,
}

impl ModelFile {
    pub fn from_model(model: &LdaModel, vocab_hash: String) -> ModelFile {
        ModelFile {
            n_topics: model.config.n_topics,
            alpha: model.config.alpha,
            beta: model.config.beta,
            iterations: model.config.iterations,
            burn_in: model.config.burn_in,
            seed: model.config.seed,
            vocab_hash,
            phi_rows: model.phi.rows(),
            phi_cols: model.phi.cols(),
            phi: model.phi.data().to_vec(),
            theta_rows: model.theta.rows(),
            theta_cols: model.theta.cols(),
            theta: model.theta.data().to_vec(),
            loglik_trace: model.loglik_trace.clone(),
            skipped_empty_docs: model.skipped_empty_docs,
        }
    }

    pub fn phi_matrix(&self) -> Mat {
        mat_from_flat(self.phi_rows, self.phi_cols, &self.phi)
    }

    pub fn theta_matrix(&self) -> Mat {
        mat_from_flat(self.theta_rows, self.theta_cols, &self.theta)
    }

    pub fn lda_config(&self) -> LdaConfig {
        LdaConfig {
            n_topics: self.n_topics,
            alpha: self.alpha,
            beta: self.beta,
            iterations: self.iterations,
            burn_in: self.burn_in,
            seed: self.seed,
        }
    }
}

pub fn mat_from_flat(rows: usize, cols: usize, data: &[f64]) -> Mat {
    assert_eq!(rows * cols, data.len(), "flat matrix size mismatch");
    let mut m = Mat::zeros(rows, cols);
    for r in 0..rows {
        m.row_mut(r).copy_from_slice(&data[r * cols..(r + 1) * cols]);
    }
    m
}

pub fn write_keywords(path: &Path, per_topic: &[Vec<(String, f64)>]) -> Result<()> {
    let mut rows = Vec::new();
    for (topic, ranked) in per_topic.iter().enumerate() {
        for (rank, (term, prob)) in ranked.iter().enumerate() {
            rows.push(vec![
                topic.to_string(),
                (rank + 1).to_string(),
                term.clone(),
                fmt_f64(*prob),
            ]);
        }
    }
    write_csv(path, &["topic", "rank", "term", "probability"], &rows)
}

pub fn write_topic_series(
    path: &Path,
    series: &BucketSeries,
    topics: &TopicSeries,
) -> Result<()> {
    let k = topics.topic_counts.len();
    let mut header: Vec<String> = vec!["bucket_start".into(), "dominant_topic".into()];
    for t in 0..k {
        header.push(format!("count_topic_{t}"));
    }
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows = series
        .buckets
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let mut row = vec![
                epoch_to_rfc3339(b.bucket_start),
                topics.dominant_topic[i].to_string(),
            ];
            for t in 0..k {
                row.push(topics.topic_counts[t][i].to_string());
            }
            row
        })
        .collect::<Vec<_>>();
    write_csv(path, &header_refs, &rows)
}

pub fn read_topic_series(path: &Path) -> Result<(Vec<i64>, Vec<usize>, Vec<Vec<u64>>)> {
    let content = read_to_string(path)?;
    let mut reader = csv::ReaderBuilder::new().from_reader(content.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?
        .clone();
    let k = headers.len().saturating_sub(2);
    let mut starts = Vec::new();
    let mut dominant = Vec::new();
    let mut counts: Vec<Vec<u64>> = vec![Vec::new(); k];
    for record in reader.records() {
        let record = record.map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
        starts.push(rfc3339_to_epoch(&record[0])?);
        dominant.push(
            record[1]
                .parse()
                .map_err(|_| CliError::data("bad topic id"))?,
        );
        for t in 0..k {
            counts[t].push(
                record[t + 2]
                    .parse()
                    .map_err(|_| CliError::data("bad topic count"))?,
            );
        }
    }
    Ok((starts, dominant, counts))
}

pub fn write_perplexity_table(path: &Path, table: &[KCandidate], best: usize) -> Result<()> {
    let rows = table
        .iter()
        .map(|c| {
            vec![
                c.k.to_string(),
                fmt_f64(c.perplexity),
                (c.k == best).to_string(),
            ]
        })
        .collect::<Vec<_>>();
    write_csv(path, &["k", "perplexity", "selected"], &rows)
}

// ---------------------------------------------------------------------
// Embedding
// ---------------------------------------------------------------------

pub fn write_embedding(path: &Path, rows: &[(String, f64, f64, f64)]) -> Result<()> {
    let out = rows
        .iter()
        .map(|(id, x, y, w)| vec![id.clone(), fmt_f64(*x), fmt_f64(*y), fmt_f64(*w)])
        .collect::<Vec<_>>();
    write_csv(path, &["id", "x", "y", "weight"], &out)
}

#[derive(Serialize, Deserialize)]
pub struct EmbedParams {
    pub points: String,
    pub perplexity_requested: f64,
    pub perplexity_used: f64,
    pub iterations: usize,
    pub seed: u64,
    pub hellinger: bool,
    pub kl_final: f64,
    pub all_bandwidths_converged: bool,
}

// ---------------------------------------------------------------------
// Features, correlation, decomposition
// ---------------------------------------------------------------------

pub fn write_features(path: &Path, starts: &[i64], table: &FeatureTable) -> Result<()> {
    let mut header: Vec<&str> = vec!["bucket_start"];
    for name in &table.names {
        header.push(name.as_str());
    }
    let rows = (0..table.n_rows())
        .map(|i| {
            let mut row = vec![epoch_to_rfc3339(starts[i])];
            for col in &table.columns {
                row.push(fmt_f64(col[i]));
            }
            row
        })
        .collect::<Vec<_>>();
    write_csv(path, &header, &rows)
}

pub fn write_correlation(path: &Path, matrix: &CorrelationMatrix) -> Result<()> {
    let mut header: Vec<&str> = vec![""];
    for name in &matrix.names {
        header.push(name.as_str());
    }
    let rows = (0..matrix.len())
        .map(|i| {
            let mut row = vec![matrix.names[i].clone()];
            for j in 0..matrix.len() {
                row.push(fmt_opt(matrix.get(i, j)));
            }
            row
        })
        .collect::<Vec<_>>();
    write_csv(path, &header, &rows)
}

pub fn write_decomposition(
    path: &Path,
    observed: &[f64],
    result: &tidemark_core::decompose::DecompositionResult,
) -> Result<()> {
    let rows = (0..observed.len())
        .map(|i| {
            vec![
                i.to_string(),
                fmt_f64(observed[i]),
                fmt_opt(result.trend[i]),
                fmt_f64(result.seasonal[i]),
                fmt_opt(result.residual[i]),
            ]
        })
        .collect::<Vec<_>>();
    write_csv(
        path,
        &["index", "observed", "trend", "seasonal", "residual"],
        &rows,
    )
}

// ---------------------------------------------------------------------
// SARIMAX artifacts
// ---------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
pub struct FitFile {
    pub order: [usize; 7],
    pub ar: Vec<f64>,
    pub ma: Vec<f64>,
    pub seasonal_ar: Vec<f64>,
    pub seasonal_ma: Vec<f64>,
    pub exog_names: Vec<String>,
    pub beta_exog: Vec<f64>,
    pub intercept: f64,
    pub sigma2: f64,
    pub loglik: f64,
    pub aic: f64,
    pub n_obs_effective: usize,
    pub converged: bool,
}

impl FitFile {
    pub fn from_fit(fit: &SarimaxFit) -> FitFile {
        let o = fit.order;
        FitFile {
            order: [o.p, o.d, o.q, o.sp, o.sd, o.sq, o.s],
            ar: fit.params.ar.clone(),
            ma: fit.params.ma.clone(),
            seasonal_ar: fit.params.sar.clone(),
            seasonal_ma: fit.params.sma.clone(),
            exog_names: fit.exog_names.clone(),
            beta_exog: fit.params.beta_exog.clone(),
            intercept: fit.params.intercept,
            sigma2: fit.params.sigma2,
            loglik: fit.loglik,
            aic: fit.aic,
            n_obs_effective: fit.n_obs_effective,
            converged: fit.converged,
        }
    }
}

pub fn write_grid(path: &Path, table: &[GridEntry]) -> Result<()> {
    let rows = table
        .iter()
        .map(|e| {
            let o = e.order;
            vec![
                o.p.to_string(),
                o.d.to_string(),
                o.q.to_string(),
                o.sp.to_string(),
                o.sd.to_string(),
                o.sq.to_string(),
                o.s.to_string(),
                e.aic.map(fmt_f64).unwrap_or_default(),
                e.loglik.map(fmt_f64).unwrap_or_default(),
                e.converged.map(|c| c.to_string()).unwrap_or_default(),
                e.error.clone().unwrap_or_default(),
            ]
        })
        .collect::<Vec<_>>();
    write_csv(
        path,
        &["p", "d", "q", "P", "D", "Q", "s", "aic", "loglik", "converged", "error"],
        &rows,
    )
}

pub fn order_from_array(a: [usize; 7]) -> OrderSpec {
    OrderSpec::seasonal(a[0], a[1], a[2], a[3], a[4], a[5], a[6])
}

pub fn write_forecast(path: &Path, times: &[i64], fc: &ForecastResult) -> Result<()> {
    let rows = (0..fc.horizon)
        .map(|i| {
            vec![
                (i + 1).to_string(),
                epoch_to_rfc3339(times[i]),
                fmt_f64(fc.mean[i]),
                fmt_f64(fc.variance[i]),
                fmt_f64(fc.interval_95[i].0),
                fmt_f64(fc.interval_95[i].1),
            ]
        })
        .collect::<Vec<_>>();
    write_csv(
        path,
        &["step", "time", "mean", "variance", "lo95", "hi95"],
        &rows,
    )
}

pub fn write_onestep(
    path: &Path,
    times: &[i64],
    observed: &[f64],
    predictions: &OneStepPredictions,
) -> Result<()> {
    let rows = (0..observed.len())
        .map(|i| {
            vec![
                epoch_to_rfc3339(times[i]),
                fmt_f64(observed[i]),
                fmt_opt(predictions.predicted[i]),
                fmt_opt(predictions.residuals[i]),
            ]
        })
        .collect::<Vec<_>>();
    write_csv(path, &["time", "observed", "predicted", "residual"], &rows)
}

#[derive(Serialize, Deserialize)]
pub struct EvalFile {
    pub split_ratio: f64,
    pub split_index: usize,
    pub rmse_train: f64,
    pub rmse_test: f64,
}

impl EvalFile {
    pub fn new(report: &EvalReport, split_index: usize) -> EvalFile {
        EvalFile {
            split_ratio: report.split_ratio,
            split_index,
            rmse_train: report.rmse_train,
            rmse_test: report.rmse_test,
        }
    }
}

#[derive(Serialize, Deserialize)]
pub struct DiagFile {
    pub standardized: Vec<f64>,
    pub histogram: Vec<(f64, f64, f64)>,
    pub overlay_mean: f64,
    pub overlay_std: f64,
    pub qq: Vec<(f64, f64)>,
    pub acf: Vec<f64>,
    pub acf_band: f64,
    pub ljung_box_stat: f64,
    pub ljung_box_pvalue: f64,
}

impl DiagFile {
    pub fn from_report(report: &DiagnosticReport) -> DiagFile {
        DiagFile {
            standardized: report.standardized.clone(),
            histogram: report
                .histogram
                .iter()
                .map(|b| (b.lo, b.hi, b.mass))
                .collect(),
            overlay_mean: report.overlay_mean,
            overlay_std: report.overlay_std,
            qq: report.qq.clone(),
            acf: report.acf.clone(),
            acf_band: report.acf_band,
            ljung_box_stat: report.ljung_box_stat,
            ljung_box_pvalue: report.ljung_box_pvalue,
        }
    }
}

// ---------------------------------------------------------------------
// Report tables
// ---------------------------------------------------------------------

pub fn write_boxplots(path: &Path, summaries: &[(String, BoxplotSummary)]) -> Result<()> {
    let rows = summaries
        .iter()
        .map(|(name, b)| {
            let outliers = b
                .outliers
                .iter()
                .map(|v| fmt_f64(*v))
                .collect::<Vec<_>>()
                .join(";");
            vec![
                name.clone(),
                fmt_f64(b.min),
                fmt_f64(b.q1),
                fmt_f64(b.median),
                fmt_f64(b.q3),
                fmt_f64(b.max),
                outliers,
            ]
        })
        .collect::<Vec<_>>();
    write_csv(
        path,
        &["series", "min", "q1", "median", "q3", "max", "outliers"],
        &rows,
    )
}

pub fn write_skewness(path: &Path, rows_in: &[(String, f64)]) -> Result<()> {
    let rows = rows_in
        .iter()
        .map(|(name, v)| vec![name.clone(), fmt_f64(*v)])
        .collect::<Vec<_>>();
    write_csv(path, &["series", "skewness"], &rows)
}

pub fn write_histograms(
    path: &Path,
    per_series: &[(String, Vec<tidemark_core::stats::HistogramBin>)],
) -> Result<()> {
    let mut rows = Vec::new();
    for (name, bins) in per_series {
        for bin in bins {
            rows.push(vec![
                name.clone(),
                fmt_f64(bin.lo),
                fmt_f64(bin.hi),
                fmt_f64(bin.mass),
            ]);
        }
    }
    write_csv(path, &["series", "bin_lo", "bin_hi", "mass"], &rows)
}

pub fn write_fig_forecast(
    path: &Path,
    rows_in: &[(i64, Option<f64>, Option<f64>, Option<f64>, Option<f64>, Option<f64>)],
) -> Result<()> {
    let rows = rows_in
        .iter()
        .map(|(t, obs, onestep, fc, lo, hi)| {
            vec![
                epoch_to_rfc3339(*t),
                fmt_opt(*obs),
                fmt_opt(*onestep),
                fmt_opt(*fc),
                fmt_opt(*lo),
                fmt_opt(*hi),
            ]
        })
        .collect::<Vec<_>>();
    write_csv(
        path,
        &["time", "observed", "one_step", "forecast", "lo95", "hi95"],
        &rows,
    )
}


pub fn read_onestep(path: &Path) -> Result<Vec<(i64, f64, Option<f64>)>> {
    let rows = read_csv(path, &["time", "observed", "predicted", "residual"])?;
    rows.into_iter()
        .map(|row| {
            let predicted = if row[2].is_empty() {
                None
            } else {
                Some(parse_f64(&row[2])?)
            };
            Ok((rfc3339_to_epoch(&row[0])?, parse_f64(&row[1])?, predicted))
        })
        .collect()
}

/// (time, mean, lo95, hi95) rows of a persisted forecast.
pub fn read_forecast(path: &Path) -> Result<Vec<(i64, f64, f64, f64)>> {
    let rows = read_csv(path, &["step", "time", "mean", "variance", "lo95", "hi95"])?;
    rows.into_iter()
        .map(|row| {
            Ok((
                rfc3339_to_epoch(&row[1])?,
                parse_f64(&row[2])?,
                parse_f64(&row[4])?,
                parse_f64(&row[5])?,
            ))
        })
        .collect()
}
