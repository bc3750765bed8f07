//! Line-delimited tweet ingestion: one JSON object per line with keys
//! id, created_at (ISO-8601), text, likes, retweets, query and optional
//! lat/lon. Malformed lines are counted and skipped; a majority of
//! malformed lines aborts the run since that signals a wrong field map.

use std::io::BufRead;

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use tidemark_core::corpus::RawTweet;

use crate::error::{CliError, Result};

/// Logical field -> JSON key mapping; override any key in the config when
/// ingesting records produced by other tooling.
#[derive(Clone, Debug, Deserialize, Serialize, PartialEq, Eq)]
#[serde(default)]
pub struct FieldMap {
    pub id: String,
    pub created_at: String,
    pub text: String,
    pub likes: String,
    pub retweets: String,
    pub query: String,
    pub lat: String,
    pub lon: String,
}

impl Default for FieldMap {
    fn default() -> Self {
        FieldMap {
            id: "id".into(),
            created_at: "created_at".into(),
            text: "text".into(),
            likes: "likes".into(),
            retweets: "retweets".into(),
            query: "query".into(),
            lat: "lat".into(),
            lon: "lon".into(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct IngestReport {
    pub total_lines: usize,
    pub ingested: usize,
    pub skipped: usize,
}

fn parse_line(line: &str, map: &FieldMap) -> Option<RawTweet> {
    let value: Value = serde_json::from_str(line).ok()?;
    let obj = value.as_object()?;
    let id = obj.get(&map.id)?;
    // Accept string or integer ids.
    let id = match id {
        Value::String(s) if !s.is_empty() => s.clone(),
        Value::Number(n) => n.to_string(),
        _ => return None,
    };
    let created = obj.get(&map.created_at)?.as_str()?;
    let timestamp = DateTime::parse_from_rfc3339(created).ok()?.timestamp();
    let text = obj.get(&map.text)?.as_str()?.to_string();
    let likes = obj.get(&map.likes)?.as_u64()?;
    let retweets = obj.get(&map.retweets)?.as_u64()?;
    let query_tag = obj.get(&map.query)?.as_str()?.to_string();
    let latitude = match obj.get(&map.lat) {
        None | Some(Value::Null) => None,
        Some(v) => {
            let lat = v.as_f64()?;
            if !(-90.0..=90.0).contains(&lat) {
                return None;
            }
            Some(lat)
        }
    };
    let longitude = match obj.get(&map.lon) {
        None | Some(Value::Null) => None,
        Some(v) => {
            let lon = v.as_f64()?;
            if !(-180.0..=180.0).contains(&lon) {
                return None;
            }
            Some(lon)
        }
    };
    Some(RawTweet {
        id,
        timestamp,
        text,
        likes,
        retweets,
        latitude,
        longitude,
        query_tag,
    })
}

/// Parses a record stream, preserving input order. Blank lines are
/// ignored entirely; malformed lines count as skipped.
pub fn ingest_tweets(
    reader: impl BufRead,
    map: &FieldMap,
) -> Result<(Vec<RawTweet>, IngestReport)> {
    let mut tweets = Vec::new();
    let mut report = IngestReport::default();
    for line in reader.lines() {
        let line = line.map_err(|e| CliError::data(format!("unreadable input: {e}")))?;
        if line.trim().is_empty() {
            continue;
        }
        report.total_lines += 1;
        match parse_line(&line, map) {
            Some(tweet) => {
                tweets.push(tweet);
                report.ingested += 1;
            }
            None => report.skipped += 1,
        }
    }
    if report.total_lines > 0 && report.skipped * 2 > report.total_lines {
        return Err(CliError::data(format!(
            "{} of {} lines malformed; field mapping looks wrong",
            report.skipped, report.total_lines
        )));
    }
    Ok((tweets, report))
}

/// Serialized normalized record; timestamps re-emitted as UTC RFC3339.
#[derive(Serialize, Deserialize)]
struct NormalRecord {
    id: String,
    created_at: String,
    text: String,
    likes: u64,
    retweets: u64,
    query: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    lat: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lon: Option<f64>,
}

pub fn to_jsonl(tweets: &[RawTweet]) -> String {
    let mut out = String::new();
    for t in tweets {
        let record = NormalRecord {
            id: t.id.clone(),
            created_at: epoch_to_rfc3339(t.timestamp),
            text: t.text.clone(),
            likes: t.likes,
            retweets: t.retweets,
            query: t.query_tag.clone(),
            lat: t.latitude,
            lon: t.longitude,
        };
        out.push_str(&serde_json::to_string(&record).expect("serializable record"));
        out.push('\n');
    }
    out
}

/// Reads back the normalized form written by `to_jsonl` (strict: any bad
/// line is an error since we produced the file ourselves).
pub fn from_jsonl(content: &str) -> Result<Vec<RawTweet>> {
    let mut tweets = Vec::new();
    for (i, line) in content.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: NormalRecord = serde_json::from_str(line)
            .map_err(|e| CliError::data(format!("corrupt normalized tweets at line {}: {e}", i + 1)))?;
        let timestamp = DateTime::parse_from_rfc3339(&record.created_at)
            .map_err(|e| CliError::data(format!("corrupt timestamp at line {}: {e}", i + 1)))?
            .timestamp();
        tweets.push(RawTweet {
            id: record.id,
            timestamp,
            text: record.text,
            likes: record.likes,
            retweets: record.retweets,
            latitude: record.lat,
            longitude: record.lon,
            query_tag: record.query,
        });
    }
    Ok(tweets)
}

pub fn epoch_to_rfc3339(epoch: i64) -> String {
    DateTime::<Utc>::from_timestamp(epoch, 0)
        .expect("valid epoch second")
        .to_rfc3339_opts(SecondsFormat::Secs, true)
}

pub fn rfc3339_to_epoch(text: &str) -> Result<i64> {
    Ok(DateTime::parse_from_rfc3339(text)
        .map_err(|e| CliError::data(format!("bad timestamp {text:?}: {e}")))?
        .timestamp())
}
