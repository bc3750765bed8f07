//! Pipeline commands. Each stage validates its upstream inputs by name,
//! writes its outputs atomically and reports the files it produced; the
//! driver wraps every stage in the directory lock and manifest update.

pub mod decompose;
pub mod embed;
pub mod evaluate;
pub mod events;
pub mod forecast;
pub mod ingest;
pub mod report;
pub mod resample;
pub mod score;
pub mod topics;

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::time::Instant;

use tidemark_core::corpus::RawTweet;
use tidemark_core::timegrid::BucketSeries;

use crate::config::PipelineConfig;
use crate::error::{CliError, Result};
use crate::formats;
use crate::ingest::from_jsonl;
use crate::iofs::{read_to_string, DirLock};
use crate::lexicon;
use crate::manifest;

pub struct Ctx {
    pub config: PipelineConfig,
}

impl Ctx {
    pub fn new(config: PipelineConfig) -> Ctx {
        Ctx { config }
    }

    pub fn out(&self, name: &str) -> PathBuf {
        self.config.output_dir.join(name)
    }

    /// Path of an upstream artifact; missing files name the command that
    /// produces them.
    pub fn require(&self, name: &str, produced_by: &str) -> Result<PathBuf> {
        let path = self.out(name);
        if !path.exists() {
            return Err(CliError::data(format!(
                "missing input {name}; run `tidemark {produced_by}` first"
            )));
        }
        Ok(path)
    }

    /// Normalized tweets with the query-tag exclusion filter applied.
    pub fn load_tweets_filtered(&self) -> Result<Vec<RawTweet>> {
        let path = self.require("tweets.jsonl", "ingest")?;
        let tweets = from_jsonl(&read_to_string(&path)?)?;
        let excluded: BTreeSet<&str> = self
            .config
            .exclude_queries
            .iter()
            .map(String::as_str)
            .collect();
        Ok(tweets
            .into_iter()
            .filter(|t| !excluded.contains(t.query_tag.as_str()))
            .collect())
    }

    pub fn load_buckets(&self, csv_name: &str, sidecar_name: &str, stage: &str) -> Result<BucketSeries> {
        let csv = self.require(csv_name, stage)?;
        let sidecar = self.require(sidecar_name, stage)?;
        formats::read_buckets(&csv, &sidecar, self.config.interval_secs)
    }

    pub fn load_clean_buckets(&self) -> Result<BucketSeries> {
        self.load_buckets("buckets_clean.csv", "bucket_tokens_clean.txt", "events")
    }

    pub fn stopwords(&self) -> Result<BTreeSet<String>> {
        lexicon::load_stopwords(self.config.stopwords.as_deref())
    }
}

/// Runs one stage under the directory lock and records it in the manifest.
pub fn run_stage<F>(ctx: &Ctx, stage: &str, body: F) -> Result<()>
where
    F: FnOnce(&Ctx) -> Result<Vec<String>>,
{
    let _lock = DirLock::acquire(&ctx.config.output_dir)?;
    let started = Instant::now();
    let outputs = body(ctx)?;
    manifest::record_stage(
        &ctx.config.output_dir,
        &ctx.config,
        stage,
        &outputs,
        started.elapsed().as_secs_f64(),
    )?;
    eprintln!("{stage}: wrote {}", outputs.join(", "));
    Ok(())
}
