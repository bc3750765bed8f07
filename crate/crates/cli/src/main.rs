use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use tidemark_cli::commands::{self, Ctx};
use tidemark_cli::config::{load_config, EmbedPoints, Overrides};
use tidemark_cli::error::{CliError, Result};

#[derive(Parser)]
#[command(
    name = "tidemark",
    version,
    about = "Social-signal analytics: topics, sentiment, events and price forecasting"
)]
struct Cli {
    /// Pipeline configuration (JSON). Flags override config values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Query tags to drop before resampling (repeatable).
    #[arg(long = "exclude-query", global = true)]
    exclude_query: Vec<String>,
    /// Emit errors as JSON on stderr.
    #[arg(long, global = true)]
    error_json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Normalize a raw tweet stream into tweets.jsonl.
    Ingest,
    /// Score each tweet against the polarity lexicon.
    Score,
    /// Aggregate scored tweets into fixed intervals.
    Resample,
    /// Detect count spikes and remove the outlier buckets.
    Events,
    /// Vocabulary, topic-count selection and the LDA fit.
    Topics {
        /// Vectorize individual tweets instead of interval bags.
        #[arg(long)]
        per_tweet: bool,
        /// Fixed topic count (skips held-out selection).
        #[arg(long)]
        k: Option<usize>,
    },
    /// 2-D embedding of topic space.
    Embed {
        /// "buckets" or "topics".
        #[arg(long)]
        points: Option<String>,
        /// Hellinger (square-root) transform of the mixture rows.
        #[arg(long)]
        hellinger: bool,
    },
    /// Feature table, correlations and seasonal decomposition.
    Decompose,
    /// Fit on the training split and forecast the test window.
    Forecast {
        #[arg(long)]
        horizon: Option<usize>,
    },
    /// Train/test one-step RMSE and residual diagnostics.
    Evaluate,
    /// Plot-ready tables for every figure type.
    Report,
}

fn run(cli: Cli) -> Result<()> {
    let overrides = Overrides {
        output_dir: cli.output_dir,
        seed: cli.seed,
        exclude_queries: cli.exclude_query,
    };
    let mut config = load_config(cli.config.as_deref(), &overrides)?;

    match cli.command {
        Command::Ingest => {
            let ctx = Ctx::new(config);
            commands::run_stage(&ctx, "ingest", commands::ingest::run)
        }
        Command::Score => {
            let ctx = Ctx::new(config);
            commands::run_stage(&ctx, "score", commands::score::run)
        }
        Command::Resample => {
            let ctx = Ctx::new(config);
            commands::run_stage(&ctx, "resample", commands::resample::run)
        }
        Command::Events => {
            let ctx = Ctx::new(config);
            commands::run_stage(&ctx, "events", commands::events::run)
        }
        Command::Topics { per_tweet, k } => {
            if per_tweet {
                config.per_tweet_docs = true;
            }
            if k.is_some() {
                config.lda.k = k;
            }
            let ctx = Ctx::new(config);
            commands::run_stage(&ctx, "topics", commands::topics::run)
        }
        Command::Embed { points, hellinger } => {
            if let Some(points) = points {
                config.tsne.points = match points.as_str() {
                    "buckets" => EmbedPoints::Buckets,
                    "topics" => EmbedPoints::Topics,
                    other => {
                        return Err(CliError::usage(format!(
                            "--points must be `buckets` or `topics`, got {other:?}"
                        )))
                    }
                };
            }
            if hellinger {
                config.tsne.hellinger = true;
            }
            let ctx = Ctx::new(config);
            commands::run_stage(&ctx, "embed", commands::embed::run)
        }
        Command::Decompose => {
            let ctx = Ctx::new(config);
            commands::run_stage(&ctx, "decompose", commands::decompose::run)
        }
        Command::Forecast { horizon } => {
            let ctx = Ctx::new(config);
            commands::run_stage(&ctx, "forecast", |ctx| commands::forecast::run(ctx, horizon))
        }
        Command::Evaluate => {
            let ctx = Ctx::new(config);
            commands::run_stage(&ctx, "evaluate", commands::evaluate::run)
        }
        Command::Report => {
            let ctx = Ctx::new(config);
            commands::run_stage(&ctx, "report", commands::report::run)
        }
    }
}

fn main() -> ExitCode {
    // Own the exit-code mapping: usage problems (including bad flags) are
    // exit 1, data/validation 2, numeric 3.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            if matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{err}");
                return ExitCode::SUCCESS;
            }
            eprint!("{err}");
            return ExitCode::from(1);
        }
    };
    let error_json = cli.error_json;
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            if error_json {
                eprintln!("{}", err.to_json());
            } else {
                eprintln!("error: {err}");
            }
            ExitCode::from(err.kind.exit_code() as u8)
        }
    }
}
