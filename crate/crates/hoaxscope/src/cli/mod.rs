//! Command-line entry point. Every numeric parameter resolves as flag,
//! then environment (where one exists), then `--config` file, then the
//! built-in default; the resolved values are echoed into each artifact.

mod commands;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::ConfigFile;
use crate::error::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "hoaxscope", version, about = "Wikipedia hoax forensics pipeline")]
pub struct Cli {
    /// Key-value config file; flags override its entries.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// error, warn, info, debug or trace. Logs go to standard error.
    #[arg(long, global = true, value_name = "LEVEL")]
    pub log_level: Option<String>,

    /// Worker threads; defaults to the number of logical processors.
    #[arg(long, global = true, value_name = "N")]
    pub jobs: Option<usize>,

    /// Fetch cache directory.
    #[arg(long, global = true, env = "HOAXSCOPE_CACHE_DIR", value_name = "DIR")]
    pub cache_dir: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fetch revision timelines and extracts for a list of titles.
    Ingest(IngestArgs),
    /// Drop cache entries older than a given age.
    CacheGc(CacheGcArgs),
    /// Write hashed title-trigram embeddings for a corpus.
    Embed(EmbedArgs),
    /// Retrieve the top-k most similar legitimate articles for every hoax.
    Negsample(NegsampleArgs),
    /// Write train/test manifests per ratio and text view.
    Split(SplitArgs),
    /// Compare surface statistics of hoax and legitimate text.
    Stylometry(StylometryArgs),
    /// Dense regions, quartiles, density histograms and changepoints.
    Timeline(TimelineArgs),
    /// Train and evaluate the month-token timeline classifier.
    Classify(ClassifyArgs),
    /// Score a predictions file against gold labels.
    Eval(EvalArgs),
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Line-delimited JSON with `title`, `label` and optional `id`.
    #[arg(long)]
    pub titles: PathBuf,
    /// Receives timelines.jsonl, corpus.jsonl and ingest_status.jsonl.
    #[arg(long)]
    pub output_dir: PathBuf,
    /// MediaWiki API endpoint; English Wikipedia by default.
    #[arg(long, env = "HOAXSCOPE_API_URL")]
    pub api_url: Option<String>,
    /// User-Agent sent with every request.
    #[arg(long, env = "HOAXSCOPE_USER_AGENT")]
    pub user_agent: Option<String>,
    /// Requests per second.
    #[arg(long, env = "HOAXSCOPE_RATE")]
    pub rate: Option<f64>,
    /// Tries per request under HTTP 429 before giving up; default 5.
    #[arg(long)]
    pub max_attempts: Option<u32>,
    /// Skip extracts and fetch timelines only.
    #[arg(long)]
    pub timelines_only: bool,
}

#[derive(Debug, Args)]
pub struct CacheGcArgs {
    /// Entries fetched longer ago than this many days are removed.
    #[arg(long)]
    pub max_age_days: Option<f64>,
}

#[derive(Debug, Args)]
pub struct EmbedArgs {
    /// Line-delimited JSON corpus.
    #[arg(long)]
    pub corpus: PathBuf,
    /// Embedding file to write.
    #[arg(long)]
    pub output: PathBuf,
    /// Vector dimension; default 256.
    #[arg(long)]
    pub dim: Option<usize>,
}

#[derive(Debug, Args)]
pub struct NegsampleArgs {
    /// Embedding file covering hoaxes and candidate negatives.
    #[arg(long)]
    pub embeddings: PathBuf,
    /// Corpus supplying the labels of embedded ids.
    #[arg(long)]
    pub corpus: PathBuf,
    /// Neighbors per hoax; overrides the ratio's count.
    #[arg(long)]
    pub k: Option<usize>,
    /// Ratio whose neighbor count sets k: 1h2r, 1h10r or 1h100r.
    #[arg(long)]
    pub ratio: Option<String>,
    /// Negative-set JSON to write.
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    /// Line-delimited JSON corpus.
    #[arg(long)]
    pub corpus: PathBuf,
    /// Negative set from `negsample`, used for every requested ratio.
    #[arg(long, conflicts_with = "embeddings")]
    pub negatives: Option<PathBuf>,
    /// Embeddings to retrieve negatives from; hashed title trigrams
    /// are used when neither this nor `--negatives` is given.
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    /// 1h2r, 1h10r, 1h100r or all.
    #[arg(long)]
    pub ratio: Option<String>,
    /// definition, fulltext, nodef or all.
    #[arg(long)]
    pub view: Option<String>,
    /// Shuffle seed; default 0.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Share of each class held out for testing; default 0.3.
    #[arg(long)]
    pub test_fraction: Option<f64>,
    /// Receives one manifest per ratio and view.
    #[arg(long)]
    pub output_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct StylometryArgs {
    /// Line-delimited JSON corpus.
    #[arg(long)]
    pub corpus: PathBuf,
    /// definition, fulltext or nodef; default fulltext.
    #[arg(long)]
    pub view: Option<String>,
    /// Histogram bins per metric; default 20.
    #[arg(long)]
    pub bins: Option<usize>,
    /// Receives the report, per-article table and histograms.
    #[arg(long)]
    pub output_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct TimelineArgs {
    /// Line-delimited JSON revision timelines.
    #[arg(long)]
    pub input: PathBuf,
    /// `auto` or a kernel width in days.
    #[arg(long)]
    pub bandwidth: Option<String>,
    /// Dense-region cut as a fraction of the peak density.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Expected run length between changepoints, in months; default 100.
    #[arg(long)]
    pub hazard_lambda: Option<f64>,
    /// Gamma prior shape on the monthly revision rate; default 1.
    #[arg(long)]
    pub prior_shape: Option<f64>,
    /// Gamma prior rate on the monthly revision rate; default 1.
    #[arg(long)]
    pub prior_rate: Option<f64>,
    /// Bins of the in-region revision fraction histogram.
    #[arg(long)]
    pub bins: Option<usize>,
    /// Receives regions, quartiles, histogram and changepoint files.
    #[arg(long)]
    pub output_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    /// Line-delimited JSON revision timelines.
    #[arg(long)]
    pub input: PathBuf,
    /// 1h2r, 1h10r, 1h100r or all; default all.
    #[arg(long)]
    pub ratio: Option<String>,
    /// Split and training seed; default 0.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Share of each class held out for testing; default 0.3.
    #[arg(long)]
    pub test_fraction: Option<f64>,
    /// Soft-margin penalty; default 1.
    #[arg(long)]
    pub c: Option<f64>,
    /// Passes over the training set; default 200.
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Weight examples inversely to their class frequency.
    #[arg(long)]
    pub class_weighting: Option<bool>,
    /// Receives model, report and prediction files per ratio.
    #[arg(long)]
    pub output_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// CSV with `article_id` and `predicted` columns; `#` lines ignored.
    #[arg(long)]
    pub predictions: PathBuf,
    /// Line-delimited JSON with `id` or `article_id`, and `label`.
    #[arg(long)]
    pub gold: PathBuf,
    /// Report path; standard output when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

fn init_logging(level: &str) -> Result<()> {
    let filter: log::LevelFilter = level
        .parse()
        .map_err(|_| Error::Usage(format!("unknown log level {level:?}")))?;
    // A second init in the same process (tests) is harmless.
    let _ = env_logger::Builder::new()
        .filter_level(filter)
        .target(env_logger::Target::Stderr)
        .try_init();
    Ok(())
}

pub fn run(cli: Cli) -> Result<()> {
    let file = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let level = file.pick_or(cli.log_level.clone(), "log-level", "warn".to_string())?;
    init_logging(&level)?;
    if let Some(jobs) = file.pick(cli.jobs, "jobs")? {
        if jobs == 0 {
            return Err(Error::Usage("--jobs must be at least 1".into()));
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            log::debug!("worker pool already configured: {e}");
        }
    }
    let cache_dir = file.pick(cli.cache_dir.clone(), "cache-dir")?;
    commands::dispatch(cli.command, &file, cache_dir)
}

/// Parses `args`, runs, and maps the outcome to a process exit code:
/// 0 on success, 1 on usage or validation errors, 2 on I/O or network
/// errors.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
