//! Algorithmic core for the tidemark analytics pipeline.
//!
//! Everything in this crate is pure computation over in-memory data: text
//! normalisation and vectorization, lexicon sentiment scoring, time-grid
//! resampling with robust spike detection, collapsed-Gibbs LDA, exact t-SNE,
//! classical seasonal decomposition and exact-likelihood SARIMAX estimation.
//! There is no IO here; file formats, timestamp parsing and the CLI live in
//! the companion `tidemark-cli` crate.
//!
//! The crate is `no_std` (with `alloc`) so the numeric kernels stay free of
//! platform dependencies; timestamps are plain UTC epoch seconds (`i64`).

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod corpus;
pub mod decompose;
pub mod embed;
pub mod linalg;
pub mod math;
pub mod optim;
pub mod rng;
pub mod sarimax;
pub mod sentiment;
pub mod sim;
pub mod stats;
pub mod stem;
pub mod timegrid;
pub mod topics;
