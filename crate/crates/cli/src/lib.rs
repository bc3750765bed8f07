//! IO, file formats and pipeline orchestration around `tidemark-core`.

pub mod commands;
pub mod config;
pub mod error;
pub mod formats;
pub mod ingest;
pub mod iofs;
pub mod lexicon;
pub mod manifest;
pub mod price;
