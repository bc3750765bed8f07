//! `tidemark embed`: 2-D t-SNE coordinates for topic space, either one
//! point per bucket (mixture rows) or one per topic (word distributions).

use tidemark_core::embed::{effective_perplexity, pairwise_affinities, tsne_from_affinities};
use tidemark_core::linalg::Mat;

use crate::commands::Ctx;
use crate::config::EmbedPoints;
use crate::error::Result;
use crate::formats::{write_embedding, write_json, EmbedParams, ModelFile};
use crate::ingest::epoch_to_rfc3339;

pub fn run(ctx: &Ctx) -> Result<Vec<String>> {
    let model: ModelFile = crate::formats::read_json(&ctx.require("model.json", "topics")?)?;
    let theta = model.theta_matrix();
    let phi = model.phi_matrix();

    let (mut x, ids, weights, label) = match ctx.config.tsne.points {
        EmbedPoints::Buckets => {
            let series = ctx.load_clean_buckets()?;
            let ids: Vec<String> = series
                .buckets
                .iter()
                .map(|b| epoch_to_rfc3339(b.bucket_start))
                .collect();
            let weights: Vec<f64> = series
                .buckets
                .iter()
                .map(|b| b.tweet_count as f64)
                .collect();
            (theta, ids, weights, "buckets")
        }
        EmbedPoints::Topics => {
            // Token-weighted topic shares from the mixture rows.
            let k = model.n_topics;
            let mut shares = vec![0.0f64; k];
            for d in 0..model.theta_rows {
                for (t, share) in shares.iter_mut().enumerate() {
                    *share += theta[(d, t)];
                }
            }
            let total: f64 = shares.iter().sum();
            for s in &mut shares {
                *s /= total;
            }
            let ids = (0..k).map(|t| format!("topic{t}")).collect();
            (phi.clone(), ids, shares, "topics")
        }
    };

    if ctx.config.tsne.hellinger {
        // Square-root transform: Euclidean distance on sqrt rows is the
        // Hellinger distance between the distributions.
        let mut transformed = Mat::zeros(x.rows(), x.cols());
        for r in 0..x.rows() {
            for c in 0..x.cols() {
                transformed[(r, c)] = x[(r, c)].sqrt();
            }
        }
        x = transformed;
    }

    let requested = ctx.config.tsne.perplexity;
    let perplexity = effective_perplexity(requested, x.rows());
    if perplexity < requested {
        eprintln!("embed: perplexity clamped from {requested} to {perplexity} for {} points", x.rows());
    }
    let affinities = pairwise_affinities(&x, perplexity)?;
    let converged = affinities.sigmas.iter().all(|s| s.converged);
    if !converged {
        let worst = affinities
            .sigmas
            .iter()
            .filter(|s| !s.converged)
            .map(|s| s.achieved_perplexity)
            .fold(f64::NAN, |a, b| if a.is_nan() { b } else { a.min(b) });
        eprintln!("embed: bandwidth search did not converge everywhere (achieved perplexity {worst})");
    }
    let embedding = tsne_from_affinities(&affinities, ctx.config.tsne.iterations, ctx.config.seed)?;

    let rows: Vec<(String, f64, f64, f64)> = ids
        .into_iter()
        .enumerate()
        .map(|(i, id)| (id, embedding.y[(i, 0)], embedding.y[(i, 1)], weights[i]))
        .collect();
    write_embedding(&ctx.out("embedding.csv"), &rows)?;
    write_json(
        &ctx.out("embed_params.json"),
        &EmbedParams {
            points: label.to_string(),
            perplexity_requested: requested,
            perplexity_used: perplexity,
            iterations: ctx.config.tsne.iterations,
            seed: ctx.config.seed,
            hellinger: ctx.config.tsne.hellinger,
            kl_final: embedding.kl_final,
            all_bandwidths_converged: converged,
        },
    )?;
    Ok(vec!["embedding.csv".into(), "embed_params.json".into()])
}
