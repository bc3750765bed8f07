//! End-to-end exercise of every subcommand on a small synthetic corpus:
//! stage outputs, exit codes, determinism and manifest completeness.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tidemark_core::rng::Rng;

const BIN: &str = env!("CARGO_BIN_EXE_tidemark");

struct Fixture {
    dir: tempfile::TempDir,
    config_path: PathBuf,
    out_dir: PathBuf,
    included_tweets: usize,
    excluded_tweets: usize,
    spike_bucket_start: i64,
    n_buckets: usize,
}

const T0: i64 = 1_603_065_600; // 2020-10-19T00:00:00Z
const INTERVAL: i64 = 300;
const N_BUCKETS: usize = 144; // 12 hours of 5-minute buckets
const SPIKE_BUCKET: usize = 50;

const TOPIC_WORDS: [[&str; 5]; 3] = [
    ["glacier", "tundra", "permafrost", "iceberg", "arctic"],
    ["parliament", "election", "policy", "minister", "senate"],
    ["hospital", "asthma", "pollution", "clinic", "vaccine"],
];

fn build_fixture() -> Fixture {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = Rng::from_seed(7);

    // Tweets: ~3 per bucket, one spike bucket, a sprinkle of negated
    // sentiment, plus a handful of tweets under the excluded query tag.
    let mut lines = Vec::new();
    let mut included = 0usize;
    for bucket in 0..N_BUCKETS {
        let topic = (bucket / 12) % 3;
        let count = if bucket == SPIKE_BUCKET {
            60
        } else {
            2 + rng.next_below(3)
        };
        for j in 0..count {
            let ts = T0 + bucket as i64 * INTERVAL + (j as i64 * 7) % INTERVAL;
            let words = TOPIC_WORDS[topic];
            let mut text = String::new();
            for _ in 0..6 {
                text.push_str(words[rng.next_below(5)]);
                text.push(' ');
            }
            // Attach sentiment with occasional negation.
            match rng.next_below(4) {
                0 => text.push_str("good"),
                1 => text.push_str("bad"),
                2 => text.push_str("not good"),
                _ => {}
            }
            let time = chrono::DateTime::from_timestamp(ts, 0)
                .unwrap()
                .to_rfc3339_opts(chrono::SecondsFormat::Secs, true);
            lines.push(format!(
                r#"{{"id":"t{bucket}_{j}","created_at":"{time}","text":"{text}","likes":{},"retweets":{},"query":"synthetic"}}"#,
                rng.next_below(20),
                rng.next_below(5),
            ));
            included += 1;
        }
    }
    let excluded = 5usize;
    for j in 0..excluded {
        let time = chrono::DateTime::from_timestamp(T0 + j as i64 * 900, 0)
            .unwrap()
            .to_rfc3339_opts(chrono::SecondsFormat::Secs, true);
        lines.push(format!(
            r#"{{"id":"cc{j}","created_at":"{time}","text":"glacier policy","likes":0,"retweets":0,"query":"Climate Change"}}"#
        ));
    }
    // One malformed line to exercise skip counting.
    lines.push("this is not json".to_string());
    fs::write(dir.path().join("tweets.jsonl"), lines.join("\n")).unwrap();

    fs::write(
        dir.path().join("lexicon.csv"),
        "good,0.7\nbad,-0.6\nclean,0.4\n",
    )
    .unwrap();

    // Price on the same 5-minute grid as the buckets, driven by the
    // social features plus AR(1) noise.
    let mut price_lines = vec!["time,value".to_string()];
    let mut u = 0.0;
    let mut price_rng = Rng::from_seed(99);
    for bucket in 0..N_BUCKETS {
        u = 0.5 * u + 0.1 * price_rng.next_normal();
        let value = 40.0 + 0.02 * (bucket % 7) as f64 + u;
        let time = chrono::DateTime::from_timestamp(T0 + bucket as i64 * INTERVAL, 0)
            .unwrap()
            .to_rfc3339_opts(chrono::SecondsFormat::Secs, true);
        price_lines.push(format!("{time},{value}"));
    }
    fs::write(dir.path().join("price.csv"), price_lines.join("\n")).unwrap();

    let out_dir = dir.path().join("out");
    let config = serde_json::json!({
        "tweets": dir.path().join("tweets.jsonl"),
        "price": dir.path().join("price.csv"),
        "lexicon": dir.path().join("lexicon.csv"),
        "output_dir": out_dir,
        "seed": 20,
        "interval_secs": INTERVAL,
        "min_occurrence": 5,
        "max_features": 5000,
        "spike_threshold": 5.0,
        "split_ratio": 0.7,
        "lda": { "k": 3, "iterations": 150, "burn_in": 100, "top_words": 5 },
        "tsne": { "perplexity": 10.0, "iterations": 150 },
        "decompose": { "bucket_period": 12, "price_period": 12 },
        "sarimax": {
            "p": 1, "d": 0, "q": 0, "P": 0, "D": 0, "Q": 0, "s": 1,
            "horizon": 6, "use_exog": true
        }
    });
    let config_path = dir.path().join("config.json");
    fs::write(&config_path, serde_json::to_string_pretty(&config).unwrap()).unwrap();

    Fixture {
        dir,
        config_path,
        out_dir,
        included_tweets: included,
        excluded_tweets: excluded,
        spike_bucket_start: T0 + SPIKE_BUCKET as i64 * INTERVAL,
        n_buckets: N_BUCKETS,
    }
}

fn run(fixture: &Fixture, args: &[&str]) -> Output {
    Command::new(BIN)
        .arg("--config")
        .arg(&fixture.config_path)
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_ok(fixture: &Fixture, args: &[&str]) {
    let output = run(fixture, args);
    assert!(
        output.status.success(),
        "command {:?} failed: {}",
        args,
        String::from_utf8_lossy(&output.stderr)
    );
}

fn read_out(fixture: &Fixture, name: &str) -> String {
    fs::read_to_string(fixture.out_dir.join(name))
        .unwrap_or_else(|e| panic!("missing artifact {name}: {e}"))
}

fn csv_rows(content: &str) -> Vec<Vec<String>> {
    let mut reader = csv::ReaderBuilder::new().from_reader(content.as_bytes());
    reader
        .records()
        .map(|r| r.unwrap().iter().map(|f| f.to_string()).collect())
        .collect()
}

#[test]
fn full_pipeline_end_to_end() {
    let fixture = build_fixture();

    // -------------------------------------------------- ingest
    run_ok(&fixture, &["ingest"]);
    let ingest: serde_json::Value =
        serde_json::from_str(&read_out(&fixture, "ingest.json")).unwrap();
    assert_eq!(
        ingest["ingested"].as_u64().unwrap() as usize,
        fixture.included_tweets + fixture.excluded_tweets
    );
    assert_eq!(ingest["skipped"], 1);

    // -------------------------------------------------- score
    run_ok(&fixture, &["score"]);
    let scores = read_out(&fixture, "scores.csv");
    let score_rows = csv_rows(&scores);
    assert_eq!(
        score_rows.len(),
        fixture.included_tweets + fixture.excluded_tweets
    );
    // Spot-check the negation path end to end: a "not good" tweet without
    // other sentiment words must score -0.7.
    let tweets = read_out(&fixture, "tweets.jsonl");
    let negated_id = tweets
        .lines()
        .find_map(|line| {
            let v: serde_json::Value = serde_json::from_str(line).ok()?;
            let text = v["text"].as_str()?;
            (text.ends_with("not good")).then(|| v["id"].as_str().unwrap().to_string())
        })
        .expect("fixture contains a negated tweet");
    let polarity: f64 = score_rows
        .iter()
        .find(|r| r[0] == negated_id)
        .map(|r| r[1].parse().unwrap())
        .unwrap();
    assert!((polarity + 0.7).abs() < 1e-12, "negated polarity {polarity}");

    // -------------------------------------------------- resample
    run_ok(&fixture, &["resample"]);
    let buckets = read_out(&fixture, "buckets.csv");
    let bucket_rows = csv_rows(&buckets);
    assert_eq!(bucket_rows.len(), fixture.n_buckets);
    let total: u64 = bucket_rows.iter().map(|r| r[1].parse::<u64>().unwrap()).sum();
    // Count conservation, with the excluded query dropped.
    assert_eq!(total as usize, fixture.included_tweets);

    // -------------------------------------------------- events
    run_ok(&fixture, &["events"]);
    let flags = csv_rows(&read_out(&fixture, "flags.csv"));
    let flagged: Vec<&Vec<String>> = flags.iter().filter(|r| r[2] == "true").collect();
    assert_eq!(flagged.len(), 1, "exactly the planted spike is flagged");
    let spike_time = chrono::DateTime::from_timestamp(fixture.spike_bucket_start, 0)
        .unwrap()
        .to_rfc3339_opts(chrono::SecondsFormat::Secs, true);
    assert_eq!(flagged[0][0], spike_time);
    let clean_rows = csv_rows(&read_out(&fixture, "buckets_clean.csv"));
    assert_eq!(clean_rows.len(), fixture.n_buckets, "grid stays gap-free");
    let spike_row = clean_rows.iter().find(|r| r[0] == spike_time).unwrap();
    assert_eq!(spike_row[1], "0", "spike bucket zeroed");
    let spike_terms = read_out(&fixture, "spike_terms.csv");
    assert!(spike_terms.lines().count() > 1, "spike terms reported");

    // -------------------------------------------------- topics
    run_ok(&fixture, &["topics"]);
    let model_a = read_out(&fixture, "model.json");
    let keywords = csv_rows(&read_out(&fixture, "keywords.csv"));
    assert_eq!(keywords.len(), 3 * 5);
    // Determinism: rerunning the command reproduces the model bytes.
    run_ok(&fixture, &["topics"]);
    let model_b = read_out(&fixture, "model.json");
    assert_eq!(model_a, model_b, "model file not byte-identical");
    // Probabilities within one topic are ranked.
    for window in keywords.windows(2) {
        if window[0][0] == window[1][0] {
            let a: f64 = window[0][3].parse().unwrap();
            let b: f64 = window[1][3].parse().unwrap();
            assert!(a >= b);
        }
    }

    // -------------------------------------------------- embed
    run_ok(&fixture, &["embed"]);
    let embedding = csv_rows(&read_out(&fixture, "embedding.csv"));
    assert_eq!(embedding.len(), fixture.n_buckets);
    for row in &embedding {
        let x: f64 = row[1].parse().unwrap();
        let y: f64 = row[2].parse().unwrap();
        assert!(x.is_finite() && y.is_finite());
    }

    // -------------------------------------------------- decompose
    run_ok(&fixture, &["decompose"]);
    let decomposition = csv_rows(&read_out(&fixture, "decompose_tweet_count.csv"));
    assert_eq!(decomposition.len(), fixture.n_buckets);
    for row in &decomposition {
        if row[2].is_empty() {
            continue;
        }
        let observed: f64 = row[1].parse().unwrap();
        let trend: f64 = row[2].parse().unwrap();
        let seasonal: f64 = row[3].parse().unwrap();
        let residual: f64 = row[4].parse().unwrap();
        assert!(
            (observed - trend - seasonal - residual).abs() < 1e-9,
            "reconstruction identity violated"
        );
    }
    let correlation = csv_rows(&read_out(&fixture, "correlation.csv"));
    assert_eq!(correlation.len(), 5);
    let diag: f64 = correlation[0][1].parse().unwrap();
    assert!((diag - 1.0).abs() < 1e-12);

    // -------------------------------------------------- evaluate
    run_ok(&fixture, &["evaluate"]);
    let eval: serde_json::Value = serde_json::from_str(&read_out(&fixture, "eval.json")).unwrap();
    assert!(eval["rmse_train"].as_f64().unwrap() > 0.0);
    assert!(eval["rmse_test"].as_f64().unwrap() > 0.0);
    let onestep = csv_rows(&read_out(&fixture, "onestep.csv"));
    assert_eq!(onestep.len(), fixture.n_buckets);

    // -------------------------------------------------- forecast
    run_ok(&fixture, &["forecast"]);
    let forecast = csv_rows(&read_out(&fixture, "forecast.csv"));
    assert_eq!(forecast.len(), 6);
    for row in &forecast {
        let mean: f64 = row[2].parse().unwrap();
        let lo: f64 = row[4].parse().unwrap();
        let hi: f64 = row[5].parse().unwrap();
        assert!(lo < mean && mean < hi);
    }

    // -------------------------------------------------- report
    run_ok(&fixture, &["report"]);
    for name in [
        "report/fig_topic_counts.csv",
        "report/fig_boxplots.csv",
        "report/fig_skewness.csv",
        "report/fig_histograms.csv",
        "report/fig_forecast.csv",
        "report/fig_diag_residuals.csv",
        "report/fig_diag_histogram.csv",
        "report/fig_diag_qq.csv",
        "report/fig_diag_acf.csv",
        "report/diag_summary.json",
    ] {
        assert!(fixture.out_dir.join(name).exists(), "missing {name}");
    }
    // Histogram masses sum to one per series.
    let histograms = csv_rows(&read_out(&fixture, "report/fig_histograms.csv"));
    let mut mass_by_series: BTreeMap<String, f64> = BTreeMap::new();
    for row in &histograms {
        *mass_by_series.entry(row[0].clone()).or_insert(0.0) += row[3].parse::<f64>().unwrap();
    }
    for (series, mass) in mass_by_series {
        assert!((mass - 1.0).abs() < 1e-9, "series {series} mass {mass}");
    }

    // -------------------------------------------------- manifest
    let manifest: serde_json::Value =
        serde_json::from_str(&read_out(&fixture, "manifest.json")).unwrap();
    let files = manifest["files"].as_object().unwrap();
    let mut on_disk = Vec::new();
    walk(&fixture.out_dir, &fixture.out_dir, &mut on_disk);
    for rel in &on_disk {
        if rel == "manifest.json" {
            continue;
        }
        let hash = files
            .get(rel)
            .unwrap_or_else(|| panic!("manifest missing {rel}"))
            .as_str()
            .unwrap();
        let bytes = fs::read(fixture.out_dir.join(rel)).unwrap();
        assert_eq!(
            hash,
            tidemark_cli::manifest::sha256_hex(&bytes),
            "stale hash for {rel}"
        );
    }
    assert!(manifest["stages"]["report"]["wall_clock_secs"].is_number());

    // -------------------------------------------------- determinism
    // Re-running a stage with unchanged inputs reproduces the data bytes.
    let buckets_before = read_out(&fixture, "buckets.csv");
    run_ok(&fixture, &["resample"]);
    assert_eq!(read_out(&fixture, "buckets.csv"), buckets_before);
}

fn walk(dir: &Path, base: &Path, out: &mut Vec<String>) {
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.is_dir() {
            walk(&path, base, out);
        } else {
            let rel = path.strip_prefix(base).unwrap().to_string_lossy().into_owned();
            if !rel.starts_with('.') {
                out.push(rel);
            }
        }
    }
}

#[test]
fn exit_codes_and_error_reporting() {
    let fixture = build_fixture();

    // Usage error: unknown flag -> exit 1.
    let output = Command::new(BIN).arg("--definitely-not-a-flag").output().unwrap();
    assert_eq!(output.status.code(), Some(1));

    // Usage error: config missing required input for the command.
    let empty_config = fixture.dir.path().join("empty.json");
    fs::write(&empty_config, "{}").unwrap();
    let output = Command::new(BIN)
        .args(["--config", empty_config.to_str().unwrap(), "ingest"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1), "missing input path is a usage error");

    // Data error: running a stage before its upstream exists -> exit 2,
    // naming the missing command.
    let output = run(&fixture, &["resample"]);
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("ingest"), "stderr: {stderr}");

    // Machine-readable error JSON on request.
    let output = Command::new(BIN)
        .arg("--config")
        .arg(&fixture.config_path)
        .args(["--error-json", "resample"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    let parsed: serde_json::Value =
        serde_json::from_str(stderr.lines().last().unwrap()).expect("stderr is JSON");
    assert_eq!(parsed["error"]["kind"], "data");

    // Forecast horizon exceeding the available future exog -> exit 2.
    run_ok(&fixture, &["ingest"]);
    run_ok(&fixture, &["score"]);
    run_ok(&fixture, &["resample"]);
    run_ok(&fixture, &["events"]);
    let output = run(&fixture, &["forecast", "--horizon", "500"]);
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("future exog"), "stderr: {stderr}");

    // Directory lock: a held lock refuses a second writer.
    fs::write(fixture.out_dir.join(".lock"), "").unwrap();
    let output = run(&fixture, &["resample"]);
    assert_eq!(output.status.code(), Some(2));
    fs::remove_file(fixture.out_dir.join(".lock")).unwrap();
}

#[test]
fn per_tweet_topic_mode() {
    let fixture = build_fixture();
    for command in ["ingest", "score", "resample", "events"] {
        run_ok(&fixture, &[command]);
    }
    run_ok(&fixture, &["topics", "--per-tweet"]);
    let model: serde_json::Value =
        serde_json::from_str(&read_out(&fixture, "model.json")).unwrap();
    // One mixture row per included tweet rather than per bucket.
    assert_eq!(
        model["theta_rows"].as_u64().unwrap() as usize,
        fixture.included_tweets
    );
    // Bucket labelling is undefined in this mode.
    assert!(!fixture.out_dir.join("topic_series.csv").exists());
}

#[test]
fn grid_search_mode_writes_table() {
    let fixture = build_fixture();
    // Same fixture, but order selection over a small (p, q) grid.
    let mut config: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&fixture.config_path).unwrap()).unwrap();
    config["sarimax"]["grid"] = serde_json::json!(true);
    config["sarimax"]["grid_max_p"] = serde_json::json!(1);
    config["sarimax"]["grid_max_q"] = serde_json::json!(1);
    fs::write(
        &fixture.config_path,
        serde_json::to_string_pretty(&config).unwrap(),
    )
    .unwrap();

    for command in ["ingest", "score", "resample", "events", "forecast"] {
        run_ok(&fixture, &[command]);
    }
    let grid = csv_rows(&read_out(&fixture, "grid.csv"));
    assert_eq!(grid.len(), 4, "p,q in 0..=1 gives four candidates");
    // Every candidate either has an AIC or an error string.
    for row in &grid {
        assert!(!row[7].is_empty() || !row[10].is_empty());
    }
    let fit: serde_json::Value = serde_json::from_str(&read_out(&fixture, "fit.json")).unwrap();
    assert!(fit["aic"].is_number());
}
