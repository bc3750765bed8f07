//! Pipeline configuration: one JSON document, flag overrides on top,
//! defaults underneath.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::ingest::FieldMap;
use crate::iofs::read_to_string;

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// Input paths.
    pub tweets: Option<PathBuf>,
    pub price: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    pub negators: Option<PathBuf>,
    pub stopwords: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub field_map: FieldMap,

    pub seed: u64,
    pub interval_secs: i64,
    pub exclude_queries: Vec<String>,
    pub min_occurrence: usize,
    pub max_features: usize,
    pub spike_threshold: f64,
    pub spike_top_terms: usize,
    pub per_tweet_docs: bool,
    pub split_ratio: f64,

    pub lda: LdaSection,
    pub tsne: TsneSection,
    pub decompose: DecomposeSection,
    pub sarimax: SarimaxSection,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            tweets: None,
            price: None,
            lexicon: None,
            negators: None,
            stopwords: None,
            output_dir: PathBuf::from("tidemark-out"),
            field_map: FieldMap::default(),
            seed: 20,
            interval_secs: 300,
            exclude_queries: vec!["Climate Change".to_string()],
            min_occurrence: 10,
            max_features: 5000,
            spike_threshold: 5.0,
            spike_top_terms: 20,
            per_tweet_docs: false,
            split_ratio: 0.7,
            lda: LdaSection::default(),
            tsne: TsneSection::default(),
            decompose: DecomposeSection::default(),
            sarimax: SarimaxSection::default(),
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct LdaSection {
    /// Fixed topic count; when absent the count is selected over
    /// `k_min..=k_max` by held-out perplexity.
    pub k: Option<usize>,
    pub k_min: usize,
    pub k_max: usize,
    /// Document-topic prior; defaults to 50/K.
    pub alpha: Option<f64>,
    pub beta: f64,
    pub iterations: usize,
    pub burn_in: usize,
    /// Iterations used during K selection (smaller keeps selection cheap).
    pub select_iterations: usize,
    pub top_words: usize,
}

impl Default for LdaSection {
    fn default() -> Self {
        LdaSection {
            k: None,
            k_min: 3,
            k_max: 8,
            alpha: None,
            beta: 0.01,
            iterations: 1000,
            burn_in: 800,
            select_iterations: 300,
            top_words: 15,
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct TsneSection {
    pub perplexity: f64,
    pub iterations: usize,
    /// Square-root transform of the mixture rows before distances.
    pub hellinger: bool,
    /// "buckets" embeds theta rows; "topics" embeds topic-word rows.
    pub points: EmbedPoints,
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum EmbedPoints {
    Buckets,
    Topics,
}

impl Default for TsneSection {
    fn default() -> Self {
        TsneSection {
            perplexity: 30.0,
            iterations: 1000,
            hellinger: false,
            points: EmbedPoints::Buckets,
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct DecomposeSection {
    /// Period for 5-minute bucket features (288 = one day).
    pub bucket_period: usize,
    /// Period for the price series.
    pub price_period: usize,
}

impl Default for DecomposeSection {
    fn default() -> Self {
        DecomposeSection {
            bucket_period: 288,
            price_period: 5,
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct SarimaxSection {
    pub p: usize,
    pub d: usize,
    pub q: usize,
    #[serde(rename = "P")]
    pub sp: usize,
    #[serde(rename = "D")]
    pub sd: usize,
    #[serde(rename = "Q")]
    pub sq: usize,
    pub s: usize,
    /// Grid-search (p, q, P, Q) instead of using the fixed order.
    pub grid: bool,
    pub grid_max_p: usize,
    pub grid_max_q: usize,
    pub grid_max_sp: usize,
    pub grid_max_sq: usize,
    pub horizon: usize,
    /// Use tweet count and sentiment per tweet as regressors.
    pub use_exog: bool,
}

impl Default for SarimaxSection {
    fn default() -> Self {
        SarimaxSection {
            p: 1,
            d: 0,
            q: 0,
            sp: 1,
            sd: 0,
            sq: 0,
            s: 24,
            grid: false,
            grid_max_p: 2,
            grid_max_q: 2,
            grid_max_sp: 2,
            grid_max_sq: 2,
            horizon: 24,
            use_exog: true,
        }
    }
}

/// Flag overrides; precedence is flags > config file > defaults.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub output_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    pub exclude_queries: Vec<String>,
}

pub fn load_config(path: Option<&Path>, overrides: &Overrides) -> Result<PipelineConfig> {
    let mut config = match path {
        Some(p) => {
            let content = read_to_string(p)
                .map_err(|e| CliError::usage(format!("cannot read config: {}", e.message)))?;
            serde_json::from_str::<PipelineConfig>(&content)
                .map_err(|e| CliError::usage(format!("invalid config {}: {e}", p.display())))?
        }
        None => PipelineConfig::default(),
    };
    if let Some(dir) = &overrides.output_dir {
        config.output_dir = dir.clone();
    }
    if let Some(seed) = overrides.seed {
        config.seed = seed;
    }
    if !overrides.exclude_queries.is_empty() {
        config.exclude_queries = overrides.exclude_queries.clone();
    }
    validate(&config)?;
    Ok(config)
}

fn validate(config: &PipelineConfig) -> Result<()> {
    if config.interval_secs <= 0 || 3600 % config.interval_secs != 0 {
        return Err(CliError::usage(format!(
            "interval_secs must divide one hour evenly, got {}",
            config.interval_secs
        )));
    }
    if !(config.split_ratio > 0.0 && config.split_ratio < 1.0) {
        return Err(CliError::usage("split_ratio must lie strictly between 0 and 1"));
    }
    if config.min_occurrence == 0 || config.max_features == 0 {
        return Err(CliError::usage("vectorizer thresholds must be positive"));
    }
    if config.lda.k_min < 1 || config.lda.k_max < config.lda.k_min {
        return Err(CliError::usage("lda k range is empty"));
    }
    if config.lda.burn_in >= config.lda.iterations {
        return Err(CliError::usage("lda burn_in must be below iterations"));
    }
    if config.spike_threshold <= 0.0 {
        return Err(CliError::usage("spike_threshold must be positive"));
    }
    if config.tsne.perplexity <= 0.0 || config.tsne.iterations == 0 {
        return Err(CliError::usage("tsne settings must be positive"));
    }
    if config.decompose.bucket_period < 2 || config.decompose.price_period < 2 {
        return Err(CliError::usage("decomposition periods must be at least 2"));
    }
    // Paths named in the config must exist when set.
    for (label, path) in [
        ("tweets", &config.tweets),
        ("price", &config.price),
        ("lexicon", &config.lexicon),
        ("negators", &config.negators),
        ("stopwords", &config.stopwords),
    ] {
        if let Some(p) = path {
            if !p.exists() {
                return Err(CliError::usage(format!(
                    "configured {label} path does not exist: {}",
                    p.display()
                )));
            }
        }
    }
    Ok(())
}

impl PipelineConfig {
    pub fn require_tweets(&self) -> Result<&Path> {
        self.tweets
            .as_deref()
            .ok_or_else(|| CliError::usage("config is missing the tweets input path"))
    }

    pub fn require_price(&self) -> Result<&Path> {
        self.price
            .as_deref()
            .ok_or_else(|| CliError::usage("config is missing the price input path"))
    }

    pub fn require_lexicon(&self) -> Result<&Path> {
        self.lexicon
            .as_deref()
            .ok_or_else(|| CliError::usage("config is missing the lexicon input path"))
    }
}
