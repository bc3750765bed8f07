//! Seeded generators for validation: SARMA processes and planted-topic
//! corpora. These implement the generating recursions directly (no state
//! space, no sampler machinery) so tests that compare fitted models
//! against them compare two independent computational routes.

use alloc::vec;
use alloc::vec::Vec;

use crate::corpus::DocTermMatrix;
use crate::linalg::Mat;
use crate::rng::Rng;

const BURN_IN: usize = 500;

/// Simulates a zero-mean SARMA(p,0,q)(P,0,Q,s) process by its defining
/// recursion with multiplied polynomials, Gaussian innovations of standard
/// deviation `sigma`.
pub fn simulate_sarma(
    ar: &[f64],
    ma: &[f64],
    sar: &[f64],
    sma: &[f64],
    s: usize,
    sigma: f64,
    n: usize,
    rng: &mut Rng,
) -> Vec<f64> {
    let max_lag = ar.len() + sar.len() * s + ma.len() + sma.len() * s + 1;
    let total = n + BURN_IN + max_lag;
    let eps: Vec<f64> = (0..total).map(|_| sigma * rng.next_normal()).collect();
    let mut w = vec![0.0; total];
    for t in max_lag..total {
        let mut v = eps[t];
        // Nonseasonal and seasonal AR terms, plus their cross products
        // from the polynomial multiplication.
        for (i, &phi) in ar.iter().enumerate() {
            v += phi * w[t - i - 1];
        }
        for (j, &sphi) in sar.iter().enumerate() {
            v += sphi * w[t - (j + 1) * s];
            for (i, &phi) in ar.iter().enumerate() {
                v -= sphi * phi * w[t - (j + 1) * s - i - 1];
            }
        }
        // MA side, same structure on the innovations.
        for (i, &theta) in ma.iter().enumerate() {
            v += theta * eps[t - i - 1];
        }
        for (j, &stheta) in sma.iter().enumerate() {
            v += stheta * eps[t - (j + 1) * s];
            for (i, &theta) in ma.iter().enumerate() {
                v += stheta * theta * eps[t - (j + 1) * s - i - 1];
            }
        }
        w[t] = v;
    }
    w[total - n..].to_vec()
}

/// Plain ARMA convenience wrapper.
pub fn simulate_arma(ar: &[f64], ma: &[f64], sigma: f64, n: usize, rng: &mut Rng) -> Vec<f64> {
    simulate_sarma(ar, ma, &[], &[], 1, sigma, n, rng)
}

/// Synthetic corpus with `k` topics over disjoint vocabularies of
/// `terms_per_topic` terms each; document d draws `doc_len` tokens
/// uniformly from the vocabulary of topic d mod k. Returns the matrix and
/// the generating topic-word distributions (k x V).
pub fn planted_topic_corpus(
    k: usize,
    terms_per_topic: usize,
    n_docs: usize,
    doc_len: usize,
    rng: &mut Rng,
) -> (DocTermMatrix, Mat) {
    let v = k * terms_per_topic;
    let mut rows = Vec::with_capacity(n_docs);
    for d in 0..n_docs {
        let topic = d % k;
        let mut counts = alloc::collections::BTreeMap::new();
        for _ in 0..doc_len {
            let term = topic * terms_per_topic + rng.next_below(terms_per_topic);
            *counts.entry(term).or_insert(0u32) += 1;
        }
        rows.push(counts.into_iter().collect());
    }
    let mut phi_true = Mat::zeros(k, v);
    for topic in 0..k {
        for t in 0..terms_per_topic {
            phi_true[(topic, topic * terms_per_topic + t)] = 1.0 / terms_per_topic as f64;
        }
    }
    (DocTermMatrix::from_rows(v, rows), phi_true)
}

/// Total-variation distance between fitted and true topic-word rows under
/// the best topic permutation (brute force over k! <= 8 topics): the
/// worst-matched row decides.
pub fn best_permutation_tv(fitted: &Mat, truth: &Mat) -> f64 {
    fn permutations(k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        for p in permutations(k - 1) {
            for slot in 0..=p.len() {
                let mut q = p.clone();
                q.insert(slot, k - 1);
                out.push(q);
            }
        }
        out
    }
    assert_eq!(fitted.rows(), truth.rows(), "topic count mismatch");
    let k = truth.rows();
    let tv = |a: &[f64], b: &[f64]| -> f64 {
        0.5 * a
            .iter()
            .zip(b)
            .map(|(x, y)| libm::fabs(x - y))
            .sum::<f64>()
    };
    permutations(k)
        .into_iter()
        .map(|perm| {
            (0..k)
                .map(|i| tv(fitted.row(perm[i]), truth.row(i)))
                .fold(0.0f64, f64::max)
        })
        .fold(f64::INFINITY, f64::min)
}
