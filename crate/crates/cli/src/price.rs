//! Price series input and exogenous alignment.
//!
//! Price CSVs carry a `time,value` header with RFC3339 timestamps on a
//! uniform grid; any further columns are named exogenous regressors that
//! ride along with the series. Bucket features are resampled onto the
//! price grid by interval means: the exogenous value labelled t averages
//! the feature over buckets whose start falls in [t, t + price_interval).

use std::path::Path;

use tidemark_core::sarimax::Exog;
use tidemark_core::timegrid::{BucketSeries, FeatureTable};

use crate::error::{CliError, Result};
use crate::formats::parse_f64;
use crate::ingest::rfc3339_to_epoch;
use crate::iofs::read_to_string;

pub struct PriceSeries {
    pub times: Vec<i64>,
    pub values: Vec<f64>,
    pub interval_secs: i64,
    /// Extra columns from the CSV, usable as regressors.
    pub exog: Exog,
}

pub fn read_price(path: &Path) -> Result<PriceSeries> {
    let content = read_to_string(path)?;
    let mut reader = csv::ReaderBuilder::new().from_reader(content.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
    let cols: Vec<&str> = headers.iter().collect();
    if cols.len() < 2 || cols[0] != "time" {
        return Err(CliError::data(format!(
            "{}: expected a `time,value` header, got {:?}",
            path.display(),
            cols
        )));
    }
    let exog_names: Vec<String> = cols[2..].iter().map(|c| c.to_string()).collect();
    let mut times = Vec::new();
    let mut values = Vec::new();
    let mut exog_cols: Vec<Vec<f64>> = vec![Vec::new(); exog_names.len()];
    for record in reader.records() {
        let record = record.map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
        times.push(rfc3339_to_epoch(&record[0])?);
        values.push(parse_f64(&record[1])?);
        for (j, col) in exog_cols.iter_mut().enumerate() {
            col.push(parse_f64(&record[j + 2])?);
        }
    }
    if times.len() < 3 {
        return Err(CliError::data(format!(
            "{}: need at least 3 price observations",
            path.display()
        )));
    }
    let interval_secs = times[1] - times[0];
    if interval_secs <= 0 {
        return Err(CliError::data("price timestamps must strictly increase"));
    }
    for w in times.windows(2) {
        if w[1] - w[0] != interval_secs {
            return Err(CliError::data(format!(
                "price grid is not uniform: step {} differs from {}",
                w[1] - w[0],
                interval_secs
            )));
        }
    }
    Ok(PriceSeries {
        times,
        values,
        interval_secs,
        exog: Exog::new(exog_names, exog_cols),
    })
}

/// Means of each bucket feature over every price interval. Intervals with
/// no overlapping buckets get zeros (an empty social window genuinely
/// carries zero count and zero sentiment mass).
pub fn align_features(
    features: &FeatureTable,
    buckets: &BucketSeries,
    grid_times: &[i64],
    grid_interval: i64,
) -> Exog {
    let names: Vec<String> = features.names.clone();
    let mut cols: Vec<Vec<f64>> = vec![Vec::with_capacity(grid_times.len()); names.len()];
    for &t in grid_times {
        let lo = t;
        let hi = t + grid_interval;
        let mut idx = Vec::new();
        for (i, bucket) in buckets.buckets.iter().enumerate() {
            if bucket.bucket_start >= lo && bucket.bucket_start < hi {
                idx.push(i);
            }
        }
        for (c, col) in features.columns.iter().enumerate() {
            let value = if idx.is_empty() {
                0.0
            } else {
                idx.iter().map(|&i| col[i]).sum::<f64>() / idx.len() as f64
            };
            cols[c].push(value);
        }
    }
    Exog::new(names, cols)
}

/// Stacks two exogenous tables column-wise (same row count).
pub fn stack_exog(a: Exog, b: Exog) -> Exog {
    if a.n_cols() == 0 {
        return b;
    }
    if b.n_cols() == 0 {
        return a;
    }
    assert_eq!(a.n_rows(), b.n_rows(), "exog row mismatch");
    let mut names = a.names().to_vec();
    names.extend(b.names().iter().cloned());
    let mut cols = a.cols().to_vec();
    cols.extend(b.cols().iter().cloned());
    Exog::new(names, cols)
}

#[cfg(test)]
mod tests {
    use super::*;
    use tidemark_core::timegrid::IntervalBucket;

    #[test]
    fn price_csv_parses_and_validates_grid() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("price.csv");
        std::fs::write(
            &path,
            "time,value\n2020-10-19T00:00:00Z,40.1\n2020-10-19T01:00:00Z,40.3\n2020-10-19T02:00:00Z,40.2\n",
        )
        .unwrap();
        let price = read_price(&path).unwrap();
        assert_eq!(price.interval_secs, 3600);
        assert_eq!(price.values, vec![40.1, 40.3, 40.2]);
        assert_eq!(price.exog.n_cols(), 0);

        std::fs::write(
            &path,
            "time,value,volume\n2020-10-19T00:00:00Z,40.1,9\n2020-10-19T01:00:00Z,40.3,12\n2020-10-19T02:00:00Z,40.2,7\n",
        )
        .unwrap();
        let price = read_price(&path).unwrap();
        assert_eq!(price.exog.names(), &["volume".to_string()]);
        assert_eq!(price.exog.cols()[0], vec![9.0, 12.0, 7.0]);

        std::fs::write(
            &path,
            "time,value\n2020-10-19T00:00:00Z,1\n2020-10-19T01:00:00Z,2\n2020-10-19T03:00:00Z,3\n",
        )
        .unwrap();
        assert!(read_price(&path).is_err());
    }

    #[test]
    fn feature_alignment_takes_interval_means() {
        let buckets = BucketSeries {
            interval_secs: 300,
            buckets: (0..24)
                .map(|i| {
                    let mut b = IntervalBucket::empty(i * 300);
                    b.tweet_count = i as u64;
                    b
                })
                .collect(),
        };
        let features = FeatureTable {
            names: vec!["tweet_count".into()],
            columns: vec![(0..24).map(|i| i as f64).collect()],
        };
        let exog = align_features(&features, &buckets, &[0, 3600], 3600);
        // First hour covers bucket values 0..12, mean 5.5; second 12..24.
        assert_eq!(exog.cols()[0], vec![5.5, 17.5]);
    }
}
