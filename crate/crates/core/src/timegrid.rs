//! Fixed-interval resampling of scored tweets, robust spike detection and
//! feature derivation.
//!
//! Buckets are left-closed right-open, aligned to epoch multiples of the
//! interval. Gaps between the first and last observed bucket are
//! materialized as empty buckets so downstream models always see a uniform
//! grid. Standard deviations are population form, stored as 0 for buckets
//! with fewer than two tweets.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;


use crate::corpus::{RawTweet, TokenizedDoc};
use crate::stats;

/// Consistency factor making MAD estimate the Gaussian standard deviation.
pub const MAD_SCALE: f64 = 1.4826;

/// Default robust-z threshold for spike flagging.
pub const DEFAULT_SPIKE_THRESHOLD: f64 = 5.0;

/// Minimum series length for spike detection.
pub const MIN_SPIKE_BUCKETS: usize = 10;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum TimegridError {
    #[error("tweet {tweet_id:?} has no sentiment score")]
    MissingScore { tweet_id: String },
    #[error("spike detection needs at least {needed} buckets, series has {got}")]
    InsufficientBuckets { needed: usize, got: usize },
    #[error("correlation needs at least 2 rows, table has {got}")]
    InsufficientRows { got: usize },
}

/// Sum / mean / population-std aggregate of one column within a bucket.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct StatTriple {
    pub sum: f64,
    pub mean: f64,
    pub std: f64,
}

impl StatTriple {
    fn from_values(values: &[f64]) -> Self {
        if values.is_empty() {
            return StatTriple::default();
        }
        StatTriple {
            sum: values.iter().sum(),
            mean: stats::mean(values),
            std: stats::population_std(values),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CoordStat {
    pub mean: f64,
    pub std: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntervalBucket {
    pub bucket_start: i64,
    pub tweet_count: u64,
    pub likes: StatTriple,
    pub retweets: StatTriple,
    pub sentiment: StatTriple,
    pub token_bag: BTreeMap<String, u64>,
    pub lat: Option<CoordStat>,
    pub lon: Option<CoordStat>,
}

impl IntervalBucket {
    pub fn empty(bucket_start: i64) -> Self {
        IntervalBucket {
            bucket_start,
            tweet_count: 0,
            likes: StatTriple::default(),
            retweets: StatTriple::default(),
            sentiment: StatTriple::default(),
            token_bag: BTreeMap::new(),
            lat: None,
            lon: None,
        }
    }
}

/// Gap-free, time-ordered bucket sequence with a fixed step.
#[derive(Clone, Debug, PartialEq)]
pub struct BucketSeries {
    pub interval_secs: i64,
    pub buckets: Vec<IntervalBucket>,
}

impl BucketSeries {
    pub fn len(&self) -> usize {
        self.buckets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buckets.is_empty()
    }

    pub fn counts(&self) -> Vec<f64> {
        self.buckets.iter().map(|b| b.tweet_count as f64).collect()
    }

    /// Verifies the grid invariant: strictly increasing starts stepped by
    /// exactly one interval.
    pub fn grid_is_uniform(&self) -> bool {
        self.buckets
            .windows(2)
            .all(|w| w[1].bucket_start - w[0].bucket_start == self.interval_secs)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EventFlag {
    pub bucket_start: i64,
    pub robust_z: f64,
    pub flagged: bool,
}

/// Assigns tweets to interval buckets and computes every aggregate column.
///
/// `docs` supplies each tweet's token list (tweets absent from `docs`
/// contribute an empty bag); `scores` must cover every tweet id.
pub fn resample(
    tweets: &[RawTweet],
    docs: &[TokenizedDoc],
    scores: &BTreeMap<String, f64>,
    interval_secs: i64,
) -> Result<BucketSeries, TimegridError> {
    assert!(
        interval_secs > 0 && 3600 % interval_secs == 0,
        "interval must divide one hour evenly"
    );
    if tweets.is_empty() {
        return Ok(BucketSeries {
            interval_secs,
            buckets: Vec::new(),
        });
    }
    let tokens_by_id: BTreeMap<&str, &[String]> = docs
        .iter()
        .map(|d| (d.tweet_id.as_str(), d.tokens.as_slice()))
        .collect();

    let bucket_of = |ts: i64| ts.div_euclid(interval_secs);
    let first = tweets.iter().map(|t| bucket_of(t.timestamp)).min().unwrap();
    let last = tweets.iter().map(|t| bucket_of(t.timestamp)).max().unwrap();
    let n_buckets = (last - first + 1) as usize;

    #[derive(Default)]
    struct Acc {
        likes: Vec<f64>,
        retweets: Vec<f64>,
        sentiment: Vec<f64>,
        lats: Vec<f64>,
        lons: Vec<f64>,
        bag: BTreeMap<String, u64>,
    }
    let mut accs: Vec<Acc> = (0..n_buckets).map(|_| Acc::default()).collect();

    for tweet in tweets {
        let polarity = *scores
            .get(&tweet.id)
            .ok_or_else(|| TimegridError::MissingScore {
                tweet_id: tweet.id.clone(),
            })?;
        let acc = &mut accs[(bucket_of(tweet.timestamp) - first) as usize];
        acc.likes.push(tweet.likes as f64);
        acc.retweets.push(tweet.retweets as f64);
        acc.sentiment.push(polarity);
        if let Some(lat) = tweet.latitude {
            acc.lats.push(lat);
        }
        if let Some(lon) = tweet.longitude {
            acc.lons.push(lon);
        }
        if let Some(tokens) = tokens_by_id.get(tweet.id.as_str()) {
            for token in tokens.iter() {
                *acc.bag.entry(token.clone()).or_insert(0) += 1;
            }
        }
    }

    let coord_stat = |values: &[f64]| {
        if values.is_empty() {
            None
        } else {
            Some(CoordStat {
                mean: stats::mean(values),
                std: stats::population_std(values),
            })
        }
    };

    let buckets = accs
        .into_iter()
        .enumerate()
        .map(|(i, acc)| IntervalBucket {
            bucket_start: (first + i as i64) * interval_secs,
            tweet_count: acc.likes.len() as u64,
            likes: StatTriple::from_values(&acc.likes),
            retweets: StatTriple::from_values(&acc.retweets),
            sentiment: StatTriple::from_values(&acc.sentiment),
            lat: coord_stat(&acc.lats),
            lon: coord_stat(&acc.lons),
            token_bag: acc.bag,
        })
        .collect();

    Ok(BucketSeries {
        interval_secs,
        buckets,
    })
}

/// Robust-z spike detection on bucket counts.
///
/// z = (count - median) / (1.4826 * MAD). When MAD collapses to zero the
/// sign of the deviation decides an infinite sentinel, so anything above
/// the median is flagged for every finite threshold.
pub fn detect_spikes(
    series: &BucketSeries,
    threshold: f64,
) -> Result<Vec<EventFlag>, TimegridError> {
    if series.len() < MIN_SPIKE_BUCKETS {
        return Err(TimegridError::InsufficientBuckets {
            needed: MIN_SPIKE_BUCKETS,
            got: series.len(),
        });
    }
    let counts = series.counts();
    let median = stats::median(&counts);
    let scale = MAD_SCALE * stats::mad(&counts);
    let flags = series
        .buckets
        .iter()
        .zip(&counts)
        .map(|(bucket, &count)| {
            let robust_z = if scale > 0.0 {
                (count - median) / scale
            } else if count > median {
                f64::INFINITY
            } else if count < median {
                f64::NEG_INFINITY
            } else {
                0.0
            };
            EventFlag {
                bucket_start: bucket.bucket_start,
                robust_z,
                flagged: robust_z > threshold,
            }
        })
        .collect();
    Ok(flags)
}

/// Replaces flagged buckets with empty ones, keeping the grid gap-free.
/// Returns the cleaned series and the removed originals.
pub fn remove_outliers(
    series: &BucketSeries,
    flags: &[EventFlag],
) -> (BucketSeries, Vec<IntervalBucket>) {
    assert_eq!(flags.len(), series.len(), "flags do not align with series");
    let mut removed = Vec::new();
    let buckets = series
        .buckets
        .iter()
        .zip(flags)
        .map(|(bucket, flag)| {
            assert_eq!(
                flag.bucket_start, bucket.bucket_start,
                "flags do not align with series"
            );
            if flag.flagged {
                removed.push(bucket.clone());
                IntervalBucket::empty(bucket.bucket_start)
            } else {
                bucket.clone()
            }
        })
        .collect();
    (
        BucketSeries {
            interval_secs: series.interval_secs,
            buckets,
        },
        removed,
    )
}

/// Ranked (term, frequency) list over a bucket index range, descending
/// frequency with lexicographic tie-break.
pub fn top_terms(
    series: &BucketSeries,
    range: core::ops::Range<usize>,
    n: usize,
) -> Vec<(String, u64)> {
    assert!(range.end <= series.len(), "range outside series");
    let mut merged: BTreeMap<&str, u64> = BTreeMap::new();
    for bucket in &series.buckets[range] {
        for (term, count) in &bucket.token_bag {
            *merged.entry(term.as_str()).or_insert(0) += count;
        }
    }
    let mut ranked: Vec<(String, u64)> = merged
        .into_iter()
        .map(|(t, c)| (String::from(t), c))
        .collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked.truncate(n);
    ranked
}

/// Named feature columns, one row per bucket.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureTable {
    pub names: Vec<String>,
    pub columns: Vec<Vec<f64>>,
}

impl FeatureTable {
    pub fn n_rows(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.columns[i].as_slice())
    }
}

/// The model features: tweet count and sentiment per tweet
/// (sentiment_sum / tweet_count, zero for empty buckets).
pub fn derive_features(series: &BucketSeries) -> FeatureTable {
    let counts = series.counts();
    let spt = series
        .buckets
        .iter()
        .map(|b| {
            if b.tweet_count == 0 {
                0.0
            } else {
                b.sentiment.sum / b.tweet_count as f64
            }
        })
        .collect();
    FeatureTable {
        names: vec![String::from("tweet_count"), String::from("sentiment_per_tweet")],
        columns: vec![counts, spt],
    }
}

/// Symmetric Pearson correlation matrix; entries involving a zero-variance
/// column are undefined (`None`).
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationMatrix {
    pub names: Vec<String>,
    values: Vec<Option<f64>>,
}

impl CorrelationMatrix {
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.values[i * self.names.len() + j]
    }
}

pub fn correlation_matrix(table: &FeatureTable) -> Result<CorrelationMatrix, TimegridError> {
    let n_rows = table.n_rows();
    if n_rows < 2 {
        return Err(TimegridError::InsufficientRows { got: n_rows });
    }
    let k = table.columns.len();
    let defined: Vec<bool> = table
        .columns
        .iter()
        .map(|c| stats::population_std(c) > 0.0)
        .collect();
    let mut values = vec![None; k * k];
    for i in 0..k {
        for j in i..k {
            let r = if i == j {
                defined[i].then_some(1.0)
            } else {
                stats::pearson(&table.columns[i], &table.columns[j])
            };
            values[i * k + j] = r;
            values[j * k + i] = r;
        }
    }
    Ok(CorrelationMatrix {
        names: table.names.clone(),
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use approx::assert_abs_diff_eq;

    fn tweet(id: &str, ts: i64, likes: u64, retweets: u64) -> RawTweet {
        RawTweet {
            id: id.to_string(),
            timestamp: ts,
            text: String::new(),
            likes,
            retweets,
            latitude: None,
            longitude: None,
            query_tag: String::from("q"),
        }
    }

    fn scores_for(tweets: &[RawTweet], value: f64) -> BTreeMap<String, f64> {
        tweets.iter().map(|t| (t.id.clone(), value)).collect()
    }

    #[test]
    fn empty_input_empty_series() {
        let series = resample(&[], &[], &BTreeMap::new(), 300).unwrap();
        assert!(series.is_empty());
    }

    #[test]
    fn singleton_bucket() {
        let tweets = [tweet("a", 1_600_000_012, 3, 1)];
        let mut scores = BTreeMap::new();
        scores.insert("a".to_string(), 0.4);
        let series = resample(&tweets, &[], &scores, 300).unwrap();
        assert_eq!(series.len(), 1);
        let b = &series.buckets[0];
        assert_eq!(b.tweet_count, 1);
        assert_eq!(b.bucket_start, 1_600_000_012 - 1_600_000_012 % 300);
        assert_abs_diff_eq!(b.sentiment.sum, 0.4);
        assert_abs_diff_eq!(b.sentiment.std, 0.0);
        assert_abs_diff_eq!(b.likes.mean, 3.0);
    }

    #[test]
    fn seven_minutes_apart_two_buckets() {
        let tweets = [tweet("a", 0, 0, 0), tweet("b", 420, 0, 0)];
        let series = resample(&tweets, &[], &scores_for(&tweets, 0.0), 300).unwrap();
        assert_eq!(series.len(), 2);
        assert_eq!(series.buckets[0].tweet_count, 1);
        assert_eq!(series.buckets[1].tweet_count, 1);
    }

    #[test]
    fn gaps_materialized_and_grid_uniform() {
        let tweets = [tweet("a", 0, 0, 0), tweet("b", 1500, 0, 0)];
        let series = resample(&tweets, &[], &scores_for(&tweets, 0.0), 300).unwrap();
        assert_eq!(series.len(), 6);
        assert!(series.grid_is_uniform());
        assert_eq!(series.buckets[2].tweet_count, 0);
        assert!(series.buckets[2].token_bag.is_empty());
    }

    #[test]
    fn missing_score_is_an_error() {
        let tweets = [tweet("a", 0, 0, 0)];
        let err = resample(&tweets, &[], &BTreeMap::new(), 300).unwrap_err();
        assert_eq!(
            err,
            TimegridError::MissingScore {
                tweet_id: "a".to_string()
            }
        );
    }

    #[test]
    fn hundred_tweet_fixture_matches_brute_force() {
        // Deterministic fixture; the oracle below recomputes every aggregate
        // with an independent group-by.
        let mut rng = crate::rng::Rng::from_seed(42);
        let mut tweets = Vec::new();
        let mut scores = BTreeMap::new();
        let mut docs = Vec::new();
        for i in 0..100 {
            let id = alloc::format!("t{i}");
            let ts = rng.next_below(3 * 3600) as i64;
            let likes = rng.next_below(50) as u64;
            let retweets = rng.next_below(20) as u64;
            tweets.push(tweet(&id, ts, likes, retweets));
            scores.insert(id.clone(), rng.next_f64() * 2.0 - 1.0);
            docs.push(TokenizedDoc {
                tweet_id: id,
                tokens: vec![alloc::format!("w{}", rng.next_below(5))],
            });
        }
        let series = resample(&tweets, &docs, &scores, 300).unwrap();

        let total: u64 = series.buckets.iter().map(|b| b.tweet_count).sum();
        assert_eq!(total, 100, "count conservation");
        assert!(series.grid_is_uniform());

        // Brute-force oracle per bucket.
        for bucket in &series.buckets {
            let members: Vec<&RawTweet> = tweets
                .iter()
                .filter(|t| {
                    t.timestamp.div_euclid(300) * 300 == bucket.bucket_start
                })
                .collect();
            assert_eq!(bucket.tweet_count as usize, members.len());
            if members.is_empty() {
                continue;
            }
            let likes: Vec<f64> = members.iter().map(|t| t.likes as f64).collect();
            let sent: Vec<f64> = members.iter().map(|t| scores[&t.id]).collect();

            let mean = likes.iter().sum::<f64>() / likes.len() as f64;
            assert_abs_diff_eq!(bucket.likes.mean, mean, epsilon = 1e-12);
            assert_abs_diff_eq!(bucket.likes.sum, likes.iter().sum::<f64>(), epsilon = 1e-12);
            let var = likes.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>()
                / likes.len() as f64;
            assert_abs_diff_eq!(bucket.likes.std, var.sqrt(), epsilon = 1e-12);

            let ssum: f64 = sent.iter().sum();
            assert_abs_diff_eq!(bucket.sentiment.sum, ssum, epsilon = 1e-12);
            // Stat-triple identity mean * count = sum.
            assert_abs_diff_eq!(
                bucket.sentiment.mean * bucket.tweet_count as f64,
                bucket.sentiment.sum,
                epsilon = 1e-9
            );
            // Token bag size equals one token per member tweet here.
            let bag_total: u64 = bucket.token_bag.values().sum();
            assert_eq!(bag_total as usize, members.len());
        }
    }

    fn series_with_counts(counts: &[u64]) -> BucketSeries {
        let buckets = counts
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let mut b = IntervalBucket::empty(i as i64 * 300);
                b.tweet_count = c;
                b
            })
            .collect();
        BucketSeries {
            interval_secs: 300,
            buckets,
        }
    }

    #[test]
    fn constant_counts_no_flags() {
        let series = series_with_counts(&[7; 12]);
        let flags = detect_spikes(&series, DEFAULT_SPIKE_THRESHOLD).unwrap();
        assert!(flags.iter().all(|f| !f.flagged));
    }

    #[test]
    fn lone_spike_flagged_via_mad_zero_sentinel() {
        let mut counts = vec![10u64; 19];
        counts.push(1000);
        let series = series_with_counts(&counts);
        let flags = detect_spikes(&series, DEFAULT_SPIKE_THRESHOLD).unwrap();
        // median 10, MAD 0: the spike gets the +inf sentinel.
        let flagged: Vec<usize> = flags
            .iter()
            .enumerate()
            .filter(|(_, f)| f.flagged)
            .map(|(i, _)| i)
            .collect();
        assert_eq!(flagged, vec![19]);
        assert!(flags[19].robust_z.is_infinite());
    }

    #[test]
    fn spike_flagged_with_positive_mad() {
        // Counts vary so MAD > 0; hand computation: median of
        // [8,9,10,11,12,...,1000] fixture below is 10, MAD = 1.
        let counts = [8, 9, 10, 11, 12, 10, 9, 11, 10, 1000];
        let series = series_with_counts(&counts);
        let flags = detect_spikes(&series, 5.0).unwrap();
        let expected_z = (1000.0 - 10.0) / (MAD_SCALE * 1.0);
        assert_abs_diff_eq!(flags[9].robust_z, expected_z, epsilon = 1e-12);
        assert!(flags[9].flagged);
        assert!(flags.iter().take(9).all(|f| !f.flagged));
    }

    #[test]
    fn infinite_threshold_never_flags() {
        let mut counts = vec![10u64; 19];
        counts.push(1000);
        let series = series_with_counts(&counts);
        let flags = detect_spikes(&series, f64::INFINITY).unwrap();
        assert!(flags.iter().all(|f| !f.flagged));
    }

    #[test]
    fn short_series_rejected() {
        let series = series_with_counts(&[1; 9]);
        assert!(matches!(
            detect_spikes(&series, 5.0),
            Err(TimegridError::InsufficientBuckets { .. })
        ));
    }

    #[test]
    fn spike_detection_scale_invariant_when_mad_positive() {
        let counts = [8u64, 9, 10, 11, 12, 10, 9, 11, 10, 300, 10, 12];
        let scaled: Vec<u64> = counts.iter().map(|c| c * 7).collect();
        let f1 = detect_spikes(&series_with_counts(&counts), 5.0).unwrap();
        let f2 = detect_spikes(&series_with_counts(&scaled), 5.0).unwrap();
        let flagged = |fs: &[EventFlag]| {
            fs.iter()
                .enumerate()
                .filter(|(_, f)| f.flagged)
                .map(|(i, _)| i)
                .collect::<Vec<_>>()
        };
        assert_eq!(flagged(&f1), flagged(&f2));
    }

    #[test]
    fn remove_outliers_identity_without_flags() {
        let series = series_with_counts(&[5; 12]);
        let flags = detect_spikes(&series, 5.0).unwrap();
        let (cleaned, removed) = remove_outliers(&series, &flags);
        assert_eq!(cleaned, series);
        assert!(removed.is_empty());
    }

    #[test]
    fn remove_outliers_zeroes_flagged_bucket() {
        let mut counts = vec![10u64; 19];
        counts.push(1000);
        let series = series_with_counts(&counts);
        let flags = detect_spikes(&series, 5.0).unwrap();
        let (cleaned, removed) = remove_outliers(&series, &flags);
        assert_eq!(cleaned.len(), series.len());
        assert_eq!(cleaned.buckets[19].tweet_count, 0);
        assert_eq!(removed.len(), 1);
        assert_eq!(removed[0].tweet_count, 1000);
        assert!(cleaned.grid_is_uniform());
    }

    #[test]
    fn top_terms_ranking_and_ties() {
        let mut series = series_with_counts(&[0, 0]);
        series.buckets[0]
            .token_bag
            .extend([("a".to_string(), 3u64), ("b".to_string(), 1u64)]);
        series.buckets[1].token_bag.insert("b".to_string(), 1);
        assert_eq!(top_terms(&series, 0..2, 1), vec![("a".to_string(), 3)]);
        assert_eq!(
            top_terms(&series, 0..2, 10),
            vec![("a".to_string(), 3), ("b".to_string(), 2)]
        );
        // Tie at frequency 2: lexicographic order decides.
        series.buckets[1].token_bag.insert("a".to_string(), 0);
        let mut tied = series_with_counts(&[0]);
        tied.buckets[0]
            .token_bag
            .extend([("a".to_string(), 2u64), ("b".to_string(), 2u64)]);
        assert_eq!(top_terms(&tied, 0..1, 1), vec![("a".to_string(), 2)]);
        assert!(top_terms(&tied, 0..0, 5).is_empty());
    }

    #[test]
    fn derive_features_convention_and_cross_check() {
        let tweets = [tweet("a", 10, 0, 0), tweet("b", 20, 0, 0), tweet("c", 700, 0, 0)];
        let mut scores = BTreeMap::new();
        scores.insert("a".to_string(), 0.5);
        scores.insert("b".to_string(), 1.0);
        scores.insert("c".to_string(), -0.25);
        let series = resample(&tweets, &[], &scores, 300).unwrap();
        let features = derive_features(&series);
        let spt = features.column("sentiment_per_tweet").unwrap();
        assert_abs_diff_eq!(spt[0], 0.75);
        assert_abs_diff_eq!(spt[1], 0.0); // empty bucket convention
        assert_abs_diff_eq!(spt[2], -0.25);
        // Cross-check against the resampled mean column wherever count > 0.
        for (bucket, &v) in series.buckets.iter().zip(spt) {
            if bucket.tweet_count > 0 {
                assert_abs_diff_eq!(v, bucket.sentiment.mean, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn correlation_matrix_against_direct_formula() {
        let x: Vec<f64> = (0..40).map(|i| (i as f64 * 0.3).sin()).collect();
        let y: Vec<f64> = (0..40).map(|i| (i as f64 * 0.3).cos() + 0.2).collect();
        let table = FeatureTable {
            names: vec!["x".to_string(), "y".to_string(), "negx".to_string()],
            columns: vec![x.clone(), y.clone(), x.iter().map(|v| -v).collect()],
        };
        let m = correlation_matrix(&table).unwrap();
        assert_abs_diff_eq!(m.get(0, 0).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m.get(0, 2).unwrap(), -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m.get(0, 1).unwrap(), m.get(1, 0).unwrap());

        // Direct covariance / sigma oracle.
        let mx = stats::mean(&x);
        let my = stats::mean(&y);
        let cov: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum::<f64>()
            / x.len() as f64;
        let expected = cov / (stats::population_std(&x) * stats::population_std(&y));
        assert_abs_diff_eq!(m.get(0, 1).unwrap(), expected, epsilon = 1e-12);
    }

    #[test]
    fn correlation_zero_variance_is_undefined() {
        let table = FeatureTable {
            names: vec!["x".to_string(), "const".to_string()],
            columns: vec![vec![1.0, 2.0, 3.0], vec![4.0, 4.0, 4.0]],
        };
        let m = correlation_matrix(&table).unwrap();
        assert!(m.get(0, 1).is_none());
        assert!(m.get(1, 1).is_none());
        assert_eq!(m.get(0, 0), Some(1.0));
    }

    #[test]
    fn correlation_requires_two_rows() {
        let table = FeatureTable {
            names: vec!["x".to_string()],
            columns: vec![vec![1.0]],
        };
        assert!(matches!(
            correlation_matrix(&table),
            Err(TimegridError::InsufficientRows { got: 1 })
        ));
    }
}
