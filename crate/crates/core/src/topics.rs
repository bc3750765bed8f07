//! Latent Dirichlet Allocation by collapsed Gibbs sampling, with held-out
//! perplexity for choosing the topic count and bucket labelling.
//!
//! The sampler integrates phi and theta out analytically and draws each
//! token's topic from the count-based full conditional
//!
//! ```text
//! p(z = k | rest) ∝ (n_dk + alpha) * (n_kw + beta) / (n_k + V*beta)
//! ```
//!
//! Documents are visited in a canonical order sorted by row content rather
//! than input order, with a single seeded stream. That makes a fit
//! reproducible bit-for-bit and equivariant under document permutation:
//! shuffling the corpus and unshuffling the result gives identical rows.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

// Float-math methods for the no_std build; test builds link std and
// resolve the inherent methods instead.
#[allow(unused_imports)]
use num_traits::Float;

use crate::corpus::{DocTermMatrix, Vocabulary};
use crate::linalg::Mat;
use crate::math::ln_gamma;
use crate::rng::Rng;
use crate::timegrid::BucketSeries;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum LdaError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("corpus has no documents")]
    EmptyCorpus,
    #[error("{k} topics exceed the corpus token count {tokens}")]
    TooManyTopics { k: usize, tokens: u64 },
    #[error("matrix has {got} terms but the model was fitted on {expected}")]
    VocabMismatch { expected: usize, got: usize },
    #[error("topic id {topic} out of range for {k} topics")]
    TopicOutOfRange { topic: usize, k: usize },
    #[error("model covers {docs} documents but the series has {buckets} buckets")]
    DocBucketMismatch { docs: usize, buckets: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct LdaConfig {
    pub n_topics: usize,
    /// Symmetric document-topic prior.
    pub alpha: f64,
    /// Symmetric topic-word prior.
    pub beta: f64,
    pub iterations: usize,
    pub burn_in: usize,
    pub seed: u64,
}

pub const DEFAULT_LDA_SEED: u64 = 20;

impl LdaConfig {
    /// Standard heuristic priors: alpha = 50/K, beta = 0.01.
    pub fn for_topics(k: usize) -> Self {
        LdaConfig {
            n_topics: k,
            alpha: 50.0 / k as f64,
            beta: 0.01,
            iterations: 1000,
            burn_in: 800,
            seed: DEFAULT_LDA_SEED,
        }
    }

    /// Same settings, different topic count. An alpha that matches this
    /// config's own 50/K heuristic is treated as heuristic and rescaled;
    /// any other value is an explicit choice and is preserved.
    pub fn with_topics(&self, k: usize) -> Self {
        let heuristic = (self.alpha - 50.0 / self.n_topics as f64).abs() < 1e-12;
        LdaConfig {
            n_topics: k,
            alpha: if heuristic { 50.0 / k as f64 } else { self.alpha },
            ..self.clone()
        }
    }

    fn validate(&self) -> Result<(), LdaError> {
        if self.n_topics < 1 {
            return Err(LdaError::InvalidConfig("n_topics must be at least 1"));
        }
        if !(self.alpha > 0.0) {
            return Err(LdaError::InvalidConfig("alpha must be positive"));
        }
        if !(self.beta > 0.0) {
            return Err(LdaError::InvalidConfig("beta must be positive"));
        }
        if self.burn_in >= self.iterations {
            return Err(LdaError::InvalidConfig("burn_in must be below iterations"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct LdaModel {
    /// K x V topic-word distributions; rows sum to 1.
    pub phi: Mat,
    /// D x K document-topic distributions; rows sum to 1. Documents with no
    /// tokens get the uniform prior row.
    pub theta: Mat,
    /// Final topic label per token position. Positions follow each row's
    /// (term id asc, count-expanded) order; empty documents have no entries.
    pub assignments: Vec<Vec<u32>>,
    /// Joint log-likelihood log p(w, z) after every sweep.
    pub loglik_trace: Vec<f64>,
    pub config: LdaConfig,
    /// Documents skipped because they contain no tokens.
    pub skipped_empty_docs: usize,
}

/// Expanded token list per document plus the canonical visiting order.
struct GibbsCorpus {
    tokens: Vec<Vec<u32>>,
    visit_order: Vec<usize>,
    total_tokens: u64,
}

fn expand(dtm: &DocTermMatrix) -> GibbsCorpus {
    let tokens: Vec<Vec<u32>> = (0..dtm.n_docs())
        .map(|d| {
            let mut toks = Vec::with_capacity(dtm.doc_len(d) as usize);
            for &(term, count) in dtm.row(d) {
                for _ in 0..count {
                    toks.push(term as u32);
                }
            }
            toks
        })
        .collect();
    // Canonical order: sort by document content, stable in input order for
    // identical rows (identical documents are interchangeable).
    let mut visit_order: Vec<usize> = (0..tokens.len()).filter(|&d| !tokens[d].is_empty()).collect();
    visit_order.sort_by(|&a, &b| tokens[a].cmp(&tokens[b]));
    let total_tokens = tokens.iter().map(|t| t.len() as u64).sum();
    GibbsCorpus {
        tokens,
        visit_order,
        total_tokens,
    }
}

struct GibbsState {
    k: usize,
    v: usize,
    n_dk: Vec<u32>, // D x K
    n_kw: Vec<u32>, // K x V
    n_k: Vec<u32>,
    assignments: Vec<Vec<u32>>,
}

impl GibbsState {
    fn new(d: usize, k: usize, v: usize) -> Self {
        GibbsState {
            k,
            v,
            n_dk: vec![0; d * k],
            n_kw: vec![0; k * v],
            n_k: vec![0; k],
            assignments: vec![Vec::new(); d],
        }
    }

    #[inline]
    fn add(&mut self, d: usize, w: u32, z: u32, delta: i32) {
        let apply = |c: &mut u32| {
            *c = c.checked_add_signed(delta).expect("count underflow");
        };
        apply(&mut self.n_dk[d * self.k + z as usize]);
        apply(&mut self.n_kw[z as usize * self.v + w as usize]);
        apply(&mut self.n_k[z as usize]);
    }

    /// Count bookkeeping invariants, exercised on every sweep in debug
    /// builds: rows of n_dk sum to document lengths, rows of n_kw to topic
    /// totals, topic totals to the corpus size.
    fn validate_counts(&self, corpus: &GibbsCorpus) {
        for (d, toks) in corpus.tokens.iter().enumerate() {
            let row_sum: u64 = self.n_dk[d * self.k..(d + 1) * self.k]
                .iter()
                .map(|&c| c as u64)
                .sum();
            assert_eq!(row_sum, toks.len() as u64, "n_dk row sum mismatch at doc {d}");
        }
        let mut total = 0u64;
        for k in 0..self.k {
            let row_sum: u64 = self.n_kw[k * self.v..(k + 1) * self.v]
                .iter()
                .map(|&c| c as u64)
                .sum();
            assert_eq!(row_sum, self.n_k[k] as u64, "n_kw row sum mismatch at topic {k}");
            total += self.n_k[k] as u64;
        }
        assert_eq!(total, corpus.total_tokens, "topic totals do not cover the corpus");
    }
}

/// Fits LDA by collapsed Gibbs sampling. Identical seed, config and matrix
/// produce an identical model. Documents with no tokens are skipped (their
/// theta rows fall back to the uniform prior).
pub fn fit_lda(dtm: &DocTermMatrix, config: &LdaConfig) -> Result<LdaModel, LdaError> {
    config.validate()?;
    if dtm.n_docs() == 0 {
        return Err(LdaError::EmptyCorpus);
    }
    let corpus = expand(dtm);
    if (config.n_topics as u64) > corpus.total_tokens {
        return Err(LdaError::TooManyTopics {
            k: config.n_topics,
            tokens: corpus.total_tokens,
        });
    }

    let d = dtm.n_docs();
    let k = config.n_topics;
    let v = dtm.n_terms();
    let mut state = GibbsState::new(d, k, v);
    let mut rng = Rng::from_seed(config.seed);

    // Seeded uniform initialisation, in canonical order.
    for &doc in &corpus.visit_order {
        let toks = &corpus.tokens[doc];
        let mut zs = Vec::with_capacity(toks.len());
        for &w in toks {
            let z = rng.next_below(k) as u32;
            state.add(doc, w, z, 1);
            zs.push(z);
        }
        state.assignments[doc] = zs;
    }

    let v_beta = v as f64 * config.beta;
    let mut probs = vec![0.0f64; k];
    let mut loglik_trace = Vec::with_capacity(config.iterations);

    for _sweep in 0..config.iterations {
        for &doc in &corpus.visit_order {
            let toks = &corpus.tokens[doc];
            for pos in 0..toks.len() {
                let w = toks[pos];
                let z_old = state.assignments[doc][pos];
                state.add(doc, w, z_old, -1);

                let mut total = 0.0;
                for (topic, p) in probs.iter_mut().enumerate() {
                    let doc_part = state.n_dk[doc * k + topic] as f64 + config.alpha;
                    let word_part = (state.n_kw[topic * v + w as usize] as f64 + config.beta)
                        / (state.n_k[topic] as f64 + v_beta);
                    *p = doc_part * word_part;
                    total += *p;
                }
                let mut target = rng.next_f64() * total;
                let mut z_new = k - 1;
                for (topic, &p) in probs.iter().enumerate() {
                    target -= p;
                    if target < 0.0 {
                        z_new = topic;
                        break;
                    }
                }

                let z_new = z_new as u32;
                state.add(doc, w, z_new, 1);
                state.assignments[doc][pos] = z_new;
            }
        }
        if cfg!(debug_assertions) {
            state.validate_counts(&corpus);
        }
        loglik_trace.push(joint_loglik(&state, &corpus, config));
    }

    // Point estimates from the final state.
    let mut phi = Mat::zeros(k, v);
    for topic in 0..k {
        let denom = state.n_k[topic] as f64 + v_beta;
        let row = phi.row_mut(topic);
        for w in 0..v {
            row[w] = (state.n_kw[topic * v + w] as f64 + config.beta) / denom;
        }
    }
    let k_alpha = k as f64 * config.alpha;
    let mut theta = Mat::zeros(d, k);
    for doc in 0..d {
        let n_d = corpus.tokens[doc].len() as f64;
        let row = theta.row_mut(doc);
        for topic in 0..k {
            row[topic] = (state.n_dk[doc * k + topic] as f64 + config.alpha) / (n_d + k_alpha);
        }
    }

    let skipped_empty_docs = d - corpus.visit_order.len();
    Ok(LdaModel {
        phi,
        theta,
        assignments: state.assignments,
        loglik_trace,
        config: config.clone(),
        skipped_empty_docs,
    })
}

/// Collapsed joint log p(w, z | alpha, beta).
fn joint_loglik(state: &GibbsState, corpus: &GibbsCorpus, config: &LdaConfig) -> f64 {
    let k = state.k as f64;
    let v = state.v as f64;
    let v_beta = v * config.beta;
    let k_alpha = k * config.alpha;
    let lg_beta = ln_gamma(config.beta);
    let lg_alpha = ln_gamma(config.alpha);

    let mut ll = state.k as f64 * (ln_gamma(v_beta) - v * lg_beta);
    for topic in 0..state.k {
        for w in 0..state.v {
            let c = state.n_kw[topic * state.v + w];
            if c > 0 {
                ll += ln_gamma(c as f64 + config.beta);
            } else {
                ll += lg_beta;
            }
        }
        ll -= ln_gamma(state.n_k[topic] as f64 + v_beta);
    }
    let sampled_docs = corpus.visit_order.len() as f64;
    ll += sampled_docs * (ln_gamma(k_alpha) - k * lg_alpha);
    for &doc in &corpus.visit_order {
        for topic in 0..state.k {
            let c = state.n_dk[doc * state.k + topic];
            ll += if c > 0 {
                ln_gamma(c as f64 + config.alpha)
            } else {
                lg_alpha
            };
        }
        ll -= ln_gamma(corpus.tokens[doc].len() as f64 + k_alpha);
    }
    ll
}

/// Held-out perplexity: exp of the negative average per-token log
/// likelihood, with document mixtures folded in by 20 Gibbs sweeps that
/// hold phi fixed.
pub fn perplexity(model: &LdaModel, dtm: &DocTermMatrix) -> Result<f64, LdaError> {
    if dtm.n_terms() != model.phi.cols() {
        return Err(LdaError::VocabMismatch {
            expected: model.phi.cols(),
            got: dtm.n_terms(),
        });
    }
    const FOLD_IN_SWEEPS: usize = 20;
    let k = model.config.n_topics;
    let alpha = model.config.alpha;
    let base = Rng::from_seed(model.config.seed).split(0xF01D);

    let mut log_sum = 0.0f64;
    let mut total_tokens = 0u64;
    for d in 0..dtm.n_docs() {
        let row = dtm.row(d);
        if row.is_empty() {
            continue;
        }
        let mut toks: Vec<u32> = Vec::new();
        for &(term, count) in row {
            for _ in 0..count {
                toks.push(term as u32);
            }
        }
        let mut rng = base.split(d as u64);
        let mut n_dk = vec![0u32; k];
        let mut zs: Vec<u32> = toks
            .iter()
            .map(|_| {
                let z = rng.next_below(k) as u32;
                n_dk[z as usize] += 1;
                z
            })
            .collect();

        let mut probs = vec![0.0f64; k];
        for _ in 0..FOLD_IN_SWEEPS {
            for (pos, &w) in toks.iter().enumerate() {
                let z_old = zs[pos] as usize;
                n_dk[z_old] -= 1;
                let mut total = 0.0;
                for (topic, p) in probs.iter_mut().enumerate() {
                    *p = (n_dk[topic] as f64 + alpha) * model.phi[(topic, w as usize)];
                    total += *p;
                }
                let mut target = rng.next_f64() * total;
                let mut z_new = k - 1;
                for (topic, &p) in probs.iter().enumerate() {
                    target -= p;
                    if target < 0.0 {
                        z_new = topic;
                        break;
                    }
                }
                n_dk[z_new] += 1;
                zs[pos] = z_new as u32;
            }
        }

        let n_d = toks.len() as f64;
        let theta_hat: Vec<f64> = (0..k)
            .map(|topic| (n_dk[topic] as f64 + alpha) / (n_d + k as f64 * alpha))
            .collect();
        for &(term, count) in row {
            let p_w: f64 = (0..k)
                .map(|topic| theta_hat[topic] * model.phi[(topic, term)])
                .sum();
            assert!(p_w > 0.0, "zero-probability token; beta smoothing violated");
            log_sum += count as f64 * p_w.ln();
            total_tokens += count as u64;
        }
    }
    if total_tokens == 0 {
        return Err(LdaError::EmptyCorpus);
    }
    Ok((-log_sum / total_tokens as f64).exp())
}

#[derive(Clone, Debug, PartialEq)]
pub struct KCandidate {
    pub k: usize,
    pub perplexity: f64,
}

/// Document-topic prior shared by every candidate during K selection.
pub const SELECTION_ALPHA: f64 = 1.0;

/// Fits one model per K on a 90/10 document holdout and picks the K with
/// the lowest held-out perplexity, ties to the smaller K.
///
/// Candidates are compared under one fixed document-topic prior: the 50/K
/// heuristic would change the prior along with K, which inflates the
/// fold-in likelihood of larger K and makes the comparison meaningless. A
/// template with an explicit (non-heuristic) alpha keeps that alpha.
pub fn select_k(
    dtm: &DocTermMatrix,
    k_range: core::ops::RangeInclusive<usize>,
    template: &LdaConfig,
) -> Result<(usize, Vec<KCandidate>), LdaError> {
    if dtm.n_docs() == 0 {
        return Err(LdaError::EmptyCorpus);
    }
    if k_range.is_empty() {
        return Err(LdaError::InvalidConfig("empty K range"));
    }
    let heuristic_alpha =
        (template.alpha - 50.0 / template.n_topics as f64).abs() < 1e-12;
    let selection_alpha = if heuristic_alpha {
        SELECTION_ALPHA
    } else {
        template.alpha
    };

    // Deterministic holdout split from the template seed.
    let mut indices: Vec<usize> = (0..dtm.n_docs()).collect();
    let mut rng = Rng::from_seed(template.seed).split(0x5E1E);
    rng.shuffle(&mut indices);
    let n_test = (dtm.n_docs() / 10).max(1);
    let (test_idx, train_idx) = indices.split_at(n_test);

    let subset = |idx: &[usize]| {
        let rows = idx
            .iter()
            .map(|&d| dtm.row(d).to_vec())
            .collect::<Vec<_>>();
        DocTermMatrix::from_rows(dtm.n_terms(), rows)
    };
    let train = subset(train_idx);
    let test = subset(test_idx);

    let mut table = Vec::new();
    for k in k_range {
        let mut config = template.with_topics(k);
        config.alpha = selection_alpha;
        let model = fit_lda(&train, &config)?;
        let perp = perplexity(&model, &test)?;
        table.push(KCandidate { k, perplexity: perp });
    }
    let best = table
        .iter()
        .min_by(|a, b| {
            a.perplexity
                .partial_cmp(&b.perplexity)
                .unwrap_or(core::cmp::Ordering::Equal)
                .then(a.k.cmp(&b.k))
        })
        .expect("non-empty table")
        .k;
    Ok((best, table))
}

/// Top-n terms of a topic by probability, ties broken lexicographically.
pub fn top_words(
    model: &LdaModel,
    vocab: &Vocabulary,
    topic: usize,
    n: usize,
) -> Result<Vec<(String, f64)>, LdaError> {
    let k = model.config.n_topics;
    if topic >= k {
        return Err(LdaError::TopicOutOfRange { topic, k });
    }
    if vocab.len() != model.phi.cols() {
        return Err(LdaError::VocabMismatch {
            expected: model.phi.cols(),
            got: vocab.len(),
        });
    }
    let row = model.phi.row(topic);
    let mut ranked: Vec<(String, f64)> = row
        .iter()
        .enumerate()
        .map(|(w, &p)| (String::from(vocab.term(w)), p))
        .collect();
    ranked.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .unwrap_or(core::cmp::Ordering::Equal)
            .then_with(|| a.0.cmp(&b.0))
    });
    ranked.truncate(n);
    Ok(ranked)
}

/// Per-bucket dominant topic and per-topic tweet-count series.
#[derive(Clone, Debug, PartialEq)]
pub struct TopicSeries {
    pub dominant_topic: Vec<usize>,
    /// K rows, one count series per topic, aligned with the buckets. Each
    /// bucket's tweet count is attributed wholly to its dominant topic so
    /// the series sum back to the bucket counts exactly.
    pub topic_counts: Vec<Vec<u64>>,
}

pub fn label_buckets(model: &LdaModel, series: &BucketSeries) -> Result<TopicSeries, LdaError> {
    if model.theta.rows() != series.len() {
        return Err(LdaError::DocBucketMismatch {
            docs: model.theta.rows(),
            buckets: series.len(),
        });
    }
    let k = model.config.n_topics;
    let dominant_topic: Vec<usize> = (0..series.len())
        .map(|d| argmax_lowest(model.theta.row(d)))
        .collect();
    let mut topic_counts = vec![vec![0u64; series.len()]; k];
    for (i, bucket) in series.buckets.iter().enumerate() {
        topic_counts[dominant_topic[i]][i] = bucket.tweet_count;
    }
    Ok(TopicSeries {
        dominant_topic,
        topic_counts,
    })
}

/// Index of the maximum value; ties resolve to the lowest index.
fn argmax_lowest(row: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in row.iter().enumerate().skip(1) {
        if v > row[best] {
            best = i;
        }
    }
    best
}
