use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use hoaxscope_core::corpus::{make_split, Article, Label, RatioSetting, Source, TextView};
use hoaxscope_core::eval::evaluate;
use hoaxscope_core::negsample::{build_negative_set, fallback_embed, EmbeddingRecord};
use hoaxscope_core::stylometry::{compare_groups, text_stats, Metric, StyleStats};
use hoaxscope_core::timeclf::{month_tokens, run_timeline_experiment, score, transform, ExperimentConfig, TrainConfig};
use hoaxscope_core::timeline::{
    bin_by_month, bocpd, dense_regions, density_histogram, kde_density, mean_quartiles, quartile_distribution,
    Bandwidth, GammaPoissonPrior, RegionParams, RevisionTimeline, Timestamp, DEFAULT_HAZARD_LAMBDA,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::*;
use crate::formats::{
    load_corpus, read_embeddings, read_json, read_timelines, write_corpus, write_embeddings, write_json,
    write_manifest, write_model, CsvArtifact, ModelFile,
};
use crate::ingest::{normalize_title, Cache, Client, ClientConfig, FetchStatus, WikiPageRef};

const DEFAULT_CACHE_DIR: &str = ".hoaxscope-cache";
const DEFAULT_EMBED_DIM: usize = 256;
const DEFAULT_TEST_FRACTION: f64 = 0.3;
const DEFAULT_STYLE_BINS: usize = 20;
const DEFAULT_DENSITY_BINS: usize = 10;

pub(super) fn dispatch(command: Command, file: &ConfigFile, cache_dir: Option<PathBuf>) -> Result<()> {
    match command {
        Command::Ingest(a) => ingest(a, file, cache_dir),
        Command::CacheGc(a) => cache_gc(a, file, cache_dir),
        Command::Embed(a) => embed(a, file),
        Command::Negsample(a) => negsample(a, file),
        Command::Split(a) => split(a, file),
        Command::Stylometry(a) => stylometry(a, file),
        Command::Timeline(a) => timeline(a, file),
        Command::Classify(a) => classify(a, file),
        Command::Eval(a) => eval(a),
    }
}

fn parse_list<T: std::str::FromStr<Err = hoaxscope_core::Error> + Copy>(value: &str, all: &[T]) -> Result<Vec<T>> {
    if value.trim().eq_ignore_ascii_case("all") {
        return Ok(all.to_vec());
    }
    Ok(vec![value.parse::<T>()?])
}

fn parse_bandwidth(value: &str) -> Result<Bandwidth> {
    if value.trim().eq_ignore_ascii_case("auto") {
        return Ok(Bandwidth::Auto);
    }
    match value.trim().parse::<f64>() {
        Ok(days) if days > 0.0 && days.is_finite() => Ok(Bandwidth::Days(days)),
        _ => Err(Error::Usage(format!("bandwidth must be `auto` or a positive number of days, got {value:?}"))),
    }
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

// ---------------------------------------------------------------- ingest

#[derive(Debug, Deserialize)]
struct TitleRecord {
    #[serde(default)]
    id: Option<String>,
    title: String,
    label: Label,
}

#[derive(Debug, Serialize)]
struct IngestStatus {
    id: String,
    title: String,
    label: Label,
    revisions: FetchStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    extract: Option<FetchStatus>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    diagnostics: Vec<String>,
}

fn read_titles(path: &Path) -> Result<Vec<TitleRecord>> {
    let reader = crate::formats::open(path)?;
    let mut out = Vec::new();
    for (line, text) in crate::formats::numbered_lines(reader, path)? {
        let rec: TitleRecord = serde_json::from_str(&text).map_err(|e| Error::parse(path, line, e.to_string()))?;
        if normalize_title(&rec.title).is_empty() {
            log::warn!("{}: line {line}: empty title skipped", path.display());
            continue;
        }
        out.push(rec);
    }
    Ok(out)
}

fn ingest(a: IngestArgs, file: &ConfigFile, cache_dir: Option<PathBuf>) -> Result<()> {
    let defaults = ClientConfig::default();
    let config = ClientConfig {
        api_url: file.pick_or(a.api_url, "api-url", defaults.api_url)?,
        user_agent: file.pick_or(a.user_agent, "user-agent", defaults.user_agent)?,
        rate: file.pick_or(a.rate, "rate", defaults.rate)?,
        max_attempts: file.pick_or(a.max_attempts, "max-attempts", defaults.max_attempts)?,
        cache_dir: Some(cache_dir.unwrap_or_else(|| DEFAULT_CACHE_DIR.into())),
        ..defaults
    };
    let titles = read_titles(&a.titles)?;
    let client = Client::new(config)?;
    log::info!("fetching {} titles", titles.len());

    let fetched: Vec<_> = titles
        .par_iter()
        .map(|rec| -> Result<_> {
            let page = WikiPageRef::new(&rec.title)?;
            let id = rec.id.clone().unwrap_or_else(|| page.title.clone());
            let revisions = client.fetch_revision_timestamps(&page);
            let extract = (!a.timelines_only).then(|| client.fetch_extract(&page));
            Ok((id, rec.label, page, revisions, extract))
        })
        .collect::<Result<_>>()?;

    let mut timelines = Vec::new();
    let mut articles = Vec::new();
    let mut statuses = Vec::new();
    let mut failures = 0usize;
    for (id, label, page, revisions, extract) in fetched {
        let mut diagnostics: Vec<String> = revisions.diagnostic.iter().cloned().collect();
        if let Some(stamps) = revisions.timestamps() {
            let parsed = stamps
                .iter()
                .map(|s| crate::formats::parse_timestamp(s))
                .collect::<std::result::Result<Vec<Timestamp>, _>>()
                .map_err(Error::Validation)?;
            timelines.push(RevisionTimeline::from_unsorted(id.clone(), label, parsed)?);
        }
        if let Some(extract) = &extract {
            diagnostics.extend(extract.diagnostic.iter().cloned());
            if let Some(text) = extract.extract() {
                articles.push(Article {
                    id: id.clone(),
                    title: page.title.clone(),
                    text: text.to_string(),
                    label,
                    source: Source::WikipediaLive,
                });
            }
        }
        let transient = |s: FetchStatus| matches!(s, FetchStatus::RateLimited | FetchStatus::NetworkError);
        if transient(revisions.status) || extract.as_ref().is_some_and(|e| transient(e.status)) {
            failures += 1;
        }
        statuses.push(IngestStatus {
            id,
            title: page.title,
            label,
            revisions: revisions.status,
            extract: extract.map(|e| e.status),
            diagnostics,
        });
    }

    ensure_dir(&a.output_dir)?;
    crate::formats::write_timelines(&a.output_dir.join("timelines.jsonl"), &timelines)?;
    if !a.timelines_only {
        write_corpus(&a.output_dir.join("corpus.jsonl"), &articles)?;
    }
    let status_path = a.output_dir.join("ingest_status.jsonl");
    let mut w = crate::formats::create(&status_path)?;
    for s in &statuses {
        serde_json::to_writer(&mut w, s).map_err(|e| Error::io(&status_path, e.into()))?;
        writeln!(w).map_err(|e| Error::io(&status_path, e))?;
    }
    w.flush().map_err(|e| Error::io(&status_path, e))?;
    log::info!(
        "{} timelines, {} extracts, {} requests",
        timelines.len(),
        articles.len(),
        client.requests()
    );
    if failures > 0 {
        return Err(Error::Network(format!(
            "{failures} of {} titles failed to fetch; see {}",
            statuses.len(),
            status_path.display()
        )));
    }
    Ok(())
}

fn cache_gc(a: CacheGcArgs, file: &ConfigFile, cache_dir: Option<PathBuf>) -> Result<()> {
    let days: f64 = file
        .pick(a.max_age_days, "max-age-days")?
        .ok_or_else(|| Error::Usage("--max-age-days is required".into()))?;
    if !(days >= 0.0 && days.is_finite()) {
        return Err(Error::Usage(format!("max age must be a non-negative number of days, got {days}")));
    }
    let cache = Cache::new(cache_dir.unwrap_or_else(|| DEFAULT_CACHE_DIR.into()));
    let stats = cache.gc(Duration::from_secs_f64(days * 86_400.0))?;
    println!("{}", serde_json::to_string(&stats).expect("stats serialize"));
    Ok(())
}

// ---------------------------------------------------- embeddings, negatives

fn embed_titles(corpus: &[Article], dim: usize) -> Result<Vec<EmbeddingRecord>> {
    corpus
        .iter()
        .map(|a| Ok(EmbeddingRecord::new(a.id.clone(), fallback_embed(&a.title, dim)?)?))
        .collect()
}

fn embed(a: EmbedArgs, file: &ConfigFile) -> Result<()> {
    let dim = file.pick_or(a.dim, "dim", DEFAULT_EMBED_DIM)?;
    let corpus = load_corpus(&a.corpus)?;
    write_embeddings(&a.output, &embed_titles(&corpus, dim)?)
}

/// Splits embeddings into (hoax, legitimate) by corpus label. Ids absent
/// from the corpus are dropped with a warning.
fn partition_embeddings(records: Vec<EmbeddingRecord>, corpus: &[Article]) -> (Vec<EmbeddingRecord>, Vec<EmbeddingRecord>) {
    let labels: HashMap<&str, Label> = corpus.iter().map(|a| (a.id.as_str(), a.label)).collect();
    let (mut hoax, mut legit, mut unknown) = (Vec::new(), Vec::new(), 0usize);
    for r in records {
        match labels.get(r.id.as_str()) {
            Some(Label::Hoax) => hoax.push(r),
            Some(Label::Legitimate) => legit.push(r),
            None => unknown += 1,
        }
    }
    if unknown > 0 {
        log::warn!("{unknown} embedded ids are not in the corpus and were ignored");
    }
    (hoax, legit)
}

#[derive(Debug, Serialize, Deserialize)]
struct NegativesFile {
    format_version: u32,
    config: Value,
    k: usize,
    hoaxes: usize,
    retrieved: usize,
    negatives: Vec<String>,
}

fn negatives_for(records: Vec<EmbeddingRecord>, corpus: &[Article], k: usize) -> Result<(usize, usize, Vec<String>)> {
    let (hoax, legit) = partition_embeddings(records, corpus);
    if hoax.is_empty() {
        return Err(Error::Validation("no hoax embeddings to query with".into()));
    }
    let set = build_negative_set(&hoax, &legit, k)?;
    Ok((hoax.len(), set.retrieved, set.ids.into_iter().collect()))
}

fn negsample(a: NegsampleArgs, file: &ConfigFile) -> Result<()> {
    let k = match file.pick(a.k, "k")? {
        Some(k) => k,
        None => file
            .pick(a.ratio, "ratio")?
            .map(|r| r.parse::<RatioSetting>())
            .transpose()?
            .ok_or_else(|| Error::Usage("give --k or --ratio".into()))?
            .negatives_per_hoax(),
    };
    let corpus = load_corpus(&a.corpus)?;
    let records = read_embeddings(&a.embeddings)?;
    let (hoaxes, retrieved, negatives) = negatives_for(records, &corpus, k)?;
    let config = json!({
        "embeddings": path_str(&a.embeddings),
        "corpus": path_str(&a.corpus),
        "k": k,
    });
    write_json(
        &a.output,
        &NegativesFile {
            format_version: crate::FORMAT_VERSION,
            config,
            k,
            hoaxes,
            retrieved,
            negatives,
        },
    )
}

// ----------------------------------------------------------------- split

fn split(a: SplitArgs, file: &ConfigFile) -> Result<()> {
    let ratio_arg = file.pick_or(a.ratio, "ratio", "all".to_string())?;
    let view_arg = file.pick_or(a.view, "view", "all".to_string())?;
    let ratios = parse_list(&ratio_arg, &RatioSetting::ALL)?;
    let views = parse_list(&view_arg, &TextView::ALL)?;
    let seed = file.pick_or(a.seed, "seed", 0u64)?;
    let test_fraction = file.pick_or(a.test_fraction, "test-fraction", DEFAULT_TEST_FRACTION)?;
    let negatives_path: Option<PathBuf> = file.pick(a.negatives, "negatives")?;
    let embeddings_path: Option<PathBuf> = file.pick(a.embeddings, "embeddings")?;
    let embed_dim = file.pick_or(None, "dim", DEFAULT_EMBED_DIM)?;

    let corpus = load_corpus(&a.corpus)?;
    let source = match (&negatives_path, &embeddings_path) {
        (Some(p), _) => json!({"negatives": path_str(p)}),
        (None, Some(p)) => json!({"embeddings": path_str(p)}),
        (None, None) => json!({"fallback-embedding-dim": embed_dim}),
    };
    let fixed_negatives = match &negatives_path {
        Some(p) => Some(read_json::<NegativesFile>(p)?.negatives),
        None => None,
    };
    let records = match (&fixed_negatives, &embeddings_path) {
        (Some(_), _) => Vec::new(),
        (None, Some(p)) => read_embeddings(p)?,
        (None, None) => embed_titles(&corpus, embed_dim)?,
    };

    ensure_dir(&a.output_dir)?;
    for ratio in ratios {
        let negatives = match &fixed_negatives {
            Some(n) => n.clone(),
            None => negatives_for(records.clone(), &corpus, ratio.negatives_per_hoax())?.2,
        };
        for &view in &views {
            let split = make_split(&corpus, &negatives, ratio, view, seed, test_fraction)?;
            let config = json!({
                "corpus": path_str(&a.corpus),
                "ratio": ratio.name(),
                "view": view.name(),
                "seed": seed,
                "test-fraction": test_fraction,
                "negative-source": source,
            });
            let name = format!("split_{}_{}.jsonl", ratio.name().to_ascii_lowercase(), view.name());
            write_manifest(&a.output_dir.join(name), &split, config)?;
            log::info!(
                "{ratio}/{view}: {} train, {} test, {} dropped",
                split.train.len(),
                split.test.len(),
                split.dropped.len()
            );
        }
    }
    Ok(())
}

// ------------------------------------------------------------ stylometry

fn stylometry(a: StylometryArgs, file: &ConfigFile) -> Result<()> {
    let view: TextView = file.pick_or(a.view, "view", "fulltext".to_string())?.parse()?;
    let bins = file.pick_or(a.bins, "bins", DEFAULT_STYLE_BINS)?;
    let corpus = load_corpus(&a.corpus)?;

    let stats: Vec<Option<(Label, StyleStats)>> = corpus
        .par_iter()
        .map(|article| {
            let text = view.apply(article)?;
            match text_stats(&article.id, text) {
                Ok(s) => Some((article.label, s)),
                Err(e) => {
                    log::warn!("article {} skipped: {e}", article.id);
                    None
                }
            }
        })
        .collect();
    let (mut hoax, mut legit) = (Vec::new(), Vec::new());
    for (label, s) in stats.into_iter().flatten() {
        match label {
            Label::Hoax => hoax.push(s),
            Label::Legitimate => legit.push(s),
        }
    }
    let (h, l) = compare_groups(&hoax, &legit, bins)?;

    let config = json!({
        "corpus": path_str(&a.corpus),
        "view": view.name(),
        "bins": bins,
    });
    ensure_dir(&a.output_dir)?;
    write_json(
        &a.output_dir.join("stylometry_report.json"),
        &json!({
            "format_version": crate::FORMAT_VERSION,
            "config": config,
            "hoax": h,
            "legitimate": l,
        }),
    )?;

    let mut per_article = CsvArtifact::create(
        &a.output_dir.join("stylometry_articles.csv"),
        &config,
        &[
            "article_id",
            "label",
            "word_count",
            "sentence_count",
            "avg_sentence_len",
            "avg_word_len",
            "syllable_count",
            "fk_grade",
        ],
    )?;
    for (label, group) in [(Label::Hoax, &hoax), (Label::Legitimate, &legit)] {
        for s in group {
            per_article.row([
                s.article_id.clone(),
                label.name().to_string(),
                s.word_count.to_string(),
                s.sentence_count.to_string(),
                s.avg_sentence_len.to_string(),
                s.avg_word_len.to_string(),
                s.syllable_count.to_string(),
                s.fk_grade.to_string(),
            ])?;
        }
    }
    per_article.finish()?;

    for (i, metric) in Metric::ALL.into_iter().enumerate() {
        let (hh, lh) = (&h.histograms[i], &l.histograms[i]);
        debug_assert_eq!(hh.metric, metric);
        let mut csv = CsvArtifact::create(
            &a.output_dir.join(format!("histogram_{}.csv", metric.name())),
            &config,
            &["bin_start", "bin_end", "hoax", "legitimate"],
        )?;
        for b in 0..hh.counts.len() {
            csv.row([
                hh.edges[b].to_string(),
                hh.edges[b + 1].to_string(),
                hh.counts[b].to_string(),
                lh.counts[b].to_string(),
            ])?;
        }
        csv.finish()?;
    }
    Ok(())
}

// -------------------------------------------------------------- timeline

fn timeline(a: TimelineArgs, file: &ConfigFile) -> Result<()> {
    let bandwidth_arg = file.pick_or(a.bandwidth, "bandwidth", "auto".to_string())?;
    let params = RegionParams {
        bandwidth: parse_bandwidth(&bandwidth_arg)?,
        threshold_ratio: file.pick_or(a.threshold, "threshold", RegionParams::default().threshold_ratio)?,
    };
    let hazard = file.pick_or(a.hazard_lambda, "hazard-lambda", DEFAULT_HAZARD_LAMBDA)?;
    let prior = GammaPoissonPrior {
        shape: file.pick_or(a.prior_shape, "prior-shape", GammaPoissonPrior::default().shape)?,
        rate: file.pick_or(a.prior_rate, "prior-rate", GammaPoissonPrior::default().rate)?,
    };
    let bins = file.pick_or(a.bins, "bins", DEFAULT_DENSITY_BINS)?;
    let timelines = read_timelines(&a.input)?;
    if timelines.is_empty() {
        return Err(Error::Validation(format!("{}: no timelines", a.input.display())));
    }

    let outcomes = timelines
        .par_iter()
        .map(|t| -> Result<_> {
            let grid = kde_density(t, params.bandwidth)?;
            let regions = dense_regions(&grid, params.threshold_ratio, t)?;
            let quartiles = if t.span_seconds() > 0 {
                Some(quartile_distribution(&regions, t)?)
            } else {
                None
            };
            let series = bin_by_month(t);
            let changes = bocpd(&series.counts, hazard, prior)?;
            Ok((regions, quartiles, series, changes))
        })
        .collect::<Result<Vec<_>>>()?;
    let histogram = density_histogram(&timelines, bins, &params)?;

    let config = json!({
        "input": path_str(&a.input),
        "bandwidth": bandwidth_arg,
        "threshold": params.threshold_ratio,
        "hazard-lambda": hazard,
        "prior-shape": prior.shape,
        "prior-rate": prior.rate,
        "bins": bins,
    });
    ensure_dir(&a.output_dir)?;
    let out = |name: &str| a.output_dir.join(name);

    let mut regions_csv = CsvArtifact::create(
        &out("regions.csv"),
        &config,
        &["article_id", "label", "start", "end", "normalized_density", "revision_count"],
    )?;
    let mut quartiles_csv = CsvArtifact::create(&out("quartiles.csv"), &config, &["article_id", "label", "q1", "q2", "q3", "q4"])?;
    let mut per_label: BTreeMap<Label, Vec<_>> = BTreeMap::new();
    let mut zero_span = 0usize;
    for (t, (regions, quartiles, _, _)) in timelines.iter().zip(&outcomes) {
        for r in regions {
            regions_csv.row([
                t.article_id().to_string(),
                t.label().name().to_string(),
                r.start.to_string(),
                r.end.to_string(),
                r.normalized_density.to_string(),
                r.revision_count.to_string(),
            ])?;
        }
        match quartiles {
            Some(q) => {
                quartiles_csv.row(
                    [t.article_id().to_string(), t.label().name().to_string()]
                        .into_iter()
                        .chain(q.q.iter().map(f64::to_string)),
                )?;
                per_label.entry(t.label()).or_default().push(*q);
            }
            None => zero_span += 1,
        }
    }
    regions_csv.finish()?;
    quartiles_csv.finish()?;
    if zero_span > 0 {
        log::warn!("{zero_span} timelines have a single instant and no quartiles");
    }

    let mut summary = CsvArtifact::create(&out("quartile_summary.csv"), &config, &["label", "articles", "q1", "q2", "q3", "q4"])?;
    for label in [Label::Hoax, Label::Legitimate] {
        let dists = per_label.get(&label).map(Vec::as_slice).unwrap_or_default();
        if let Some(mean) = mean_quartiles(dists) {
            summary.row(
                [label.name().to_string(), dists.len().to_string()]
                    .into_iter()
                    .chain(mean.q.iter().map(f64::to_string)),
            )?;
        }
    }
    summary.finish()?;

    let mut hist_csv = CsvArtifact::create(&out("density_histogram.csv"), &config, &["bin_start", "bin_end", "hoax", "legitimate"])?;
    for b in 0..bins {
        hist_csv.row([
            histogram.edges[b].to_string(),
            histogram.edges[b + 1].to_string(),
            histogram.hoax[b].to_string(),
            histogram.legitimate[b].to_string(),
        ])?;
    }
    hist_csv.finish()?;

    let cp_path = out("changepoints.jsonl");
    let mut w = crate::formats::create(&cp_path)?;
    let io = |e: std::io::Error| Error::io(&cp_path, e);
    serde_json::to_writer(&mut w, &json!({"format_version": crate::FORMAT_VERSION, "config": config})).map_err(|e| io(e.into()))?;
    writeln!(w).map_err(io)?;
    for (t, (_, _, series, changes)) in timelines.iter().zip(&outcomes) {
        let record = json!({
            "article_id": t.article_id(),
            "label": t.label(),
            "start_month": series.start_month.to_string(),
            "months": series.len(),
            "positions": changes.positions,
            "change_months": changes.positions.iter().map(|&p| series.month_at(p).to_string()).collect::<Vec<_>>(),
        });
        serde_json::to_writer(&mut w, &record).map_err(|e| io(e.into()))?;
        writeln!(w).map_err(io)?;
    }
    w.flush().map_err(io)
}

// -------------------------------------------------------------- classify

fn classify(a: ClassifyArgs, file: &ConfigFile) -> Result<()> {
    let ratio_arg = file.pick_or(a.ratio, "ratio", "all".to_string())?;
    let ratios = parse_list(&ratio_arg, &RatioSetting::ALL)?;
    let seed = file.pick_or(a.seed, "seed", 0u64)?;
    let defaults = ExperimentConfig::default();
    let exp = ExperimentConfig {
        test_fraction: file.pick_or(a.test_fraction, "test-fraction", defaults.test_fraction)?,
        train: TrainConfig {
            c: file.pick_or(a.c, "c", defaults.train.c)?,
            epochs: file.pick_or(a.epochs, "epochs", defaults.train.epochs)?,
            seed,
            class_weighting: file.pick_or(a.class_weighting, "class-weighting", defaults.train.class_weighting)?,
        },
    };
    let timelines = read_timelines(&a.input)?;
    let by_id: HashMap<&str, &RevisionTimeline> = timelines.iter().map(|t| (t.article_id(), t)).collect();

    let runs = ratios
        .par_iter()
        .map(|&ratio| run_timeline_experiment(&timelines, ratio, seed, &exp).map(|r| (ratio, r)))
        .collect::<std::result::Result<Vec<_>, _>>()?;

    ensure_dir(&a.output_dir)?;
    let base_config = json!({
        "input": path_str(&a.input),
        "seed": seed,
        "test-fraction": exp.test_fraction,
        "c": exp.train.c,
        "epochs": exp.train.epochs,
        "class-weighting": exp.train.class_weighting,
    });
    let mut table = CsvArtifact::create(
        &a.output_dir.join("table.csv"),
        &base_config,
        &[
            "setting",
            "train",
            "test",
            "unused_negatives",
            "hoax_precision",
            "hoax_recall",
            "hoax_f1",
            "legitimate_precision",
            "legitimate_recall",
            "legitimate_f1",
            "macro_f1",
        ],
    )?;
    for (ratio, run) in &runs {
        let mut config = base_config.clone();
        config["ratio"] = json!(ratio.name());
        let stem = ratio.name().to_ascii_lowercase();
        write_model(
            &a.output_dir.join(format!("model_{stem}.json")),
            &ModelFile::new(ratio.name(), &run.tfidf, &run.model, config.clone()),
        )?;
        write_json(
            &a.output_dir.join(format!("report_{stem}.json")),
            &json!({
                "format_version": crate::FORMAT_VERSION,
                "config": config,
                "report": run.report,
                "train": run.train_ids.len(),
                "test": run.test_ids.len(),
                "unused_negatives": run.unused_negatives,
            }),
        )?;
        let mut preds = CsvArtifact::create(
            &a.output_dir.join(format!("predictions_{stem}.csv")),
            &config,
            &["article_id", "gold", "predicted", "score"],
        )?;
        for id in &run.test_ids {
            let t = by_id[id.as_str()];
            let s = score(&run.model, &transform(&run.tfidf, &month_tokens(t)))?;
            let predicted = if s > 0.0 { Label::Hoax } else { Label::Legitimate };
            preds.row([id.clone(), t.label().name().into(), predicted.name().into(), s.to_string()])?;
        }
        preds.finish()?;
        let r = &run.report;
        table.row([
            ratio.name().to_string(),
            run.train_ids.len().to_string(),
            run.test_ids.len().to_string(),
            run.unused_negatives.to_string(),
            r.per_class.hoax.precision.to_string(),
            r.per_class.hoax.recall.to_string(),
            r.per_class.hoax.f1.to_string(),
            r.per_class.legitimate.precision.to_string(),
            r.per_class.legitimate.recall.to_string(),
            r.per_class.legitimate.f1.to_string(),
            r.macro_f1.to_string(),
        ])?;
        log::info!("{ratio}: hoax F1 {:.3}, macro F1 {:.3}", r.per_class.hoax.f1, r.macro_f1);
    }
    table.finish()
}

// ------------------------------------------------------------------ eval

#[derive(Debug, Deserialize)]
struct PredictionRow {
    article_id: String,
    predicted: String,
}

fn read_gold(path: &Path) -> Result<HashMap<String, Label>> {
    let reader = crate::formats::open(path)?;
    let mut gold = HashMap::new();
    for (line, text) in crate::formats::numbered_lines(reader, path)? {
        let v: Value = serde_json::from_str(&text).map_err(|e| Error::parse(path, line, e.to_string()))?;
        let id = v
            .get("id")
            .or_else(|| v.get("article_id"))
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Validation(format!("{}: line {line}: missing id", path.display())))?;
        let label: Label = v
            .get("label")
            .ok_or_else(|| Error::Validation(format!("{}: line {line}: missing label", path.display())))
            .and_then(|l| Label::deserialize(l).map_err(|e| Error::parse(path, line, e.to_string())))?;
        if gold.insert(id.to_string(), label).is_some() {
            return Err(Error::Validation(format!("{}: line {line}: duplicate id {id:?}", path.display())));
        }
    }
    Ok(gold)
}

fn eval(a: EvalArgs) -> Result<()> {
    let gold = read_gold(&a.gold)?;
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(&a.predictions)
        .map_err(|e| Error::io(&a.predictions, e.into()))?;
    let (mut predicted, mut expected) = (Vec::new(), Vec::new());
    let mut seen = BTreeSet::new();
    for (i, row) in reader.deserialize::<PredictionRow>().enumerate() {
        let row = row.map_err(|e| {
            let line = e.position().map_or(i + 2, |p| p.line() as usize);
            Error::parse(&a.predictions, line, e.to_string())
        })?;
        if !seen.insert(row.article_id.clone()) {
            return Err(Error::Validation(format!("duplicate prediction for {}", row.article_id)));
        }
        let label = gold
            .get(&row.article_id)
            .ok_or_else(|| Error::Validation(format!("no gold label for {}", row.article_id)))?;
        predicted.push(row.predicted.parse::<Label>()?);
        expected.push(*label);
    }
    let setting = a
        .predictions
        .file_stem()
        .map_or_else(String::new, |s| s.to_string_lossy().into_owned());
    let report = evaluate(setting, &predicted, &expected)?;
    let doc = json!({
        "format_version": crate::FORMAT_VERSION,
        "config": {"predictions": path_str(&a.predictions), "gold": path_str(&a.gold)},
        "report": report,
    });
    match &a.output {
        Some(p) => write_json(p, &doc),
        None => {
            println!("{}", serde_json::to_string_pretty(&doc).expect("report serializes"));
            Ok(())
        }
    }
}
