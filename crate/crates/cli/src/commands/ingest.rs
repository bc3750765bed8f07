//! `tidemark ingest`: raw record stream -> normalized tweets.jsonl.

use std::fs::File;
use std::io::BufReader;

use crate::commands::Ctx;
use crate::error::{CliError, Result};
use crate::formats::write_json;
use crate::ingest::{ingest_tweets, to_jsonl};
use crate::iofs::atomic_write;

pub fn run(ctx: &Ctx) -> Result<Vec<String>> {
    let source = ctx.config.require_tweets()?;
    let file = File::open(source)
        .map_err(|e| CliError::data(format!("cannot open {}: {e}", source.display())))?;
    let (tweets, report) = ingest_tweets(BufReader::new(file), &ctx.config.field_map)?;
    if report.skipped > 0 {
        eprintln!(
            "ingest: skipped {} of {} lines",
            report.skipped, report.total_lines
        );
    }
    atomic_write(&ctx.out("tweets.jsonl"), to_jsonl(&tweets).as_bytes())?;
    write_json(&ctx.out("ingest.json"), &report)?;
    Ok(vec!["tweets.jsonl".into(), "ingest.json".into()])
}
