//! Stage orchestration. Stages run in dependency order; the prepared corpus
//! is cached under the output directory and reused by later partial runs.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use shibboleth::corpus::{
    apply_filter, dedup, ingest_jsonl, tokenize_corpus, AnyTagFilter, AuthorBlockList, Corpus,
    IngestOptions, Stopwords, Tag, TokenizedDoc, Tokenizer,
};
use shibboleth::derive_seed;
use shibboleth::lexicon::{self, signature_table, write_scores_csv};
use shibboleth::semnet::{
    build_cooccurrence, centralities, clustering_and_paths, er_null, giant_component, louvain,
    small_world_sdelta, write_centralities_csv, write_edge_csv, write_gexf, SemnetError,
};
use shibboleth::topics::{
    coherence, config_for_k, fit_lda, intertopic_map, linear_schedule, relevance_terms, select_k,
    sweep_k, sweep_two_phase, write_intertopic_csv, write_relevance_csv, write_sweep_csv,
    CoherenceOptions, TopicModelConfig,
};
use shibboleth::trends::{
    combine_with, fold_case, merge_exports, onset_year, parse_ngram_tsv, parse_totals,
    relative_series, smooth, write_plot_csv, write_tidy_csv, TrendSeries, YearCounts,
};

use crate::bundle::{sha256_hex, BundleWriter, Manifest};
use crate::config::PipelineConfig;
use crate::Stage;

/// Seed streams split off the master seed.
const TOPICS_STREAM: u64 = 1;
const NETWORK_STREAM: u64 = 2;

pub const STEMMER: &str = "snowball-english (porter2)";

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error(transparent)]
    Config(#[from] crate::ConfigError),
    #[error("stage {stage} failed: {message}")]
    Stage { stage: String, message: String },
}

fn fail(stage: &str) -> impl Fn(String) -> PipelineError + '_ {
    move |message| PipelineError::Stage {
        stage: stage.to_string(),
        message,
    }
}

trait Context<T> {
    fn at(self, stage: &str) -> Result<T, PipelineError>;
}

impl<T, E: std::fmt::Display> Context<T> for Result<T, E> {
    fn at(self, stage: &str) -> Result<T, PipelineError> {
        self.map_err(|e| fail(stage)(e.to_string()))
    }
}

#[derive(Debug, Clone)]
pub struct ReportBundle {
    pub root: std::path::PathBuf,
    pub manifest: Manifest,
}

/// Hash of the resolved config with the output directory left out, so the
/// same analysis written to two places hashes the same.
pub fn config_hash(cfg: &PipelineConfig) -> String {
    let mut c = cfg.clone();
    c.out = Default::default();
    sha256_hex(&serde_json::to_vec(&c).expect("config serialises"))
}

pub fn run_pipeline(cfg: &PipelineConfig, stages: &[Stage]) -> Result<ReportBundle, PipelineError> {
    cfg.validate(stages)?;
    let mut stages = stages.to_vec();
    stages.sort();
    stages.dedup();

    let mut out = BundleWriter::open(&cfg.out).at("output")?;
    let prepared = if stages.iter().any(|s| s.needs_corpus()) {
        Some(prepare_corpus(cfg, &mut out)?)
    } else {
        None
    };
    for &stage in &stages {
        match stage {
            Stage::Ingest => {}
            Stage::Score => run_score(cfg, docs(&prepared), &mut out)?,
            Stage::Topics => run_topics(cfg, docs(&prepared), &mut out)?,
            Stage::Network => run_network(cfg, docs(&prepared), &mut out)?,
            Stage::Trends => run_trends(cfg, &mut out)?,
        }
    }
    let root = out.root().to_path_buf();
    let manifest = out
        .finish(
            config_hash(cfg),
            cfg.seed,
            stages.iter().map(|s| s.name().to_string()).collect(),
            settings(cfg),
        )
        .at("output")?;
    Ok(ReportBundle { root, manifest })
}

fn docs(p: &Option<PreparedCorpus>) -> &[TokenizedDoc] {
    &p.as_ref().expect("corpus prepared for corpus stages").docs
}

fn settings(cfg: &PipelineConfig) -> BTreeMap<String, String> {
    BTreeMap::from([
        (
            "stemmer".into(),
            if cfg.tokenizer.stem {
                STEMMER.into()
            } else {
                "none".into()
            },
        ),
        ("stopwords".into(), stopwords_label(cfg)),
        ("coherence".into(), cfg.topics.coherence.measure.to_string()),
    ])
}

fn stopwords_label(cfg: &PipelineConfig) -> String {
    match &cfg.paths.stopwords {
        None => shibboleth::corpus::DEFAULT_STOPWORDS_VERSION.to_string(),
        Some(p) => p
            .file_name()
            .map_or_else(String::new, |n| n.to_string_lossy().into_owned()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSummary {
    pub documents_read: usize,
    pub documents_kept: usize,
    pub steps: Vec<String>,
    pub tokens: usize,
    pub vocabulary: usize,
    pub stopwords: String,
    pub stemmer: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PreparedCorpus {
    summary: CorpusSummary,
    docs: Vec<TokenizedDoc>,
}

fn load_stopwords(cfg: &PipelineConfig) -> Result<Stopwords, PipelineError> {
    match &cfg.paths.stopwords {
        None => Ok(Stopwords::default()),
        Some(p) => Stopwords::from_file(p).at("ingest"),
    }
}

/// Key of the cached corpus: every input that shapes the token streams.
fn cache_key(
    cfg: &PipelineConfig,
    corpus_path: &Path,
    stopwords: &Stopwords,
) -> Result<String, PipelineError> {
    let bytes = std::fs::read(corpus_path).at("ingest")?;
    let material = serde_json::json!({
        "corpus_sha256": sha256_hex(&bytes),
        "corpus": cfg.corpus,
        "tokenizer": cfg.tokenizer,
        "stopwords": stopwords.sorted(),
        "stopwords_version": stopwords.version,
        "version": env!("CARGO_PKG_VERSION"),
    });
    Ok(sha256_hex(material.to_string().as_bytes()))
}

fn prepare_corpus(
    cfg: &PipelineConfig,
    out: &mut BundleWriter,
) -> Result<PreparedCorpus, PipelineError> {
    let path = cfg.paths.corpus.as_deref().expect("validated");
    let stopwords = load_stopwords(cfg)?;
    let key = cache_key(cfg, path, &stopwords)?;
    let cache_file = out.cache_dir().join(format!("corpus-{}.json", &key[..16]));

    let cached = std::fs::read(&cache_file)
        .ok()
        .and_then(|b| serde_json::from_slice::<PreparedCorpus>(&b).ok());
    let prepared = match cached {
        Some(p) => p,
        None => {
            let p = build_corpus(cfg, path, stopwords)?;
            std::fs::create_dir_all(out.cache_dir()).at("ingest")?;
            let bytes = serde_json::to_vec(&p).at("ingest")?;
            std::fs::write(&cache_file, bytes).at("ingest")?;
            p
        }
    };
    out.write_json("corpus/summary.json", &prepared.summary)
        .at("ingest")?;
    Ok(prepared)
}

fn build_corpus(
    cfg: &PipelineConfig,
    path: &Path,
    stopwords: Stopwords,
) -> Result<PreparedCorpus, PipelineError> {
    let opts = IngestOptions {
        drop_empty_text: cfg.corpus.drop_empty_text,
    };
    let raw = ingest_jsonl(path, &opts).at("ingest")?;
    let mut corpus: Corpus = raw.clone();
    if !cfg.corpus.require_tags.is_empty() {
        let tags: BTreeSet<Tag> = cfg
            .corpus
            .require_tags
            .iter()
            .map(|t| Tag::new(t))
            .collect::<Result<_, _>>()
            .at("ingest")?;
        corpus = apply_filter(&corpus, &AnyTagFilter(tags));
    }
    if !cfg.corpus.blocked_authors.is_empty() {
        let blocked: HashSet<String> = cfg.corpus.blocked_authors.iter().cloned().collect();
        corpus = apply_filter(&corpus, &AuthorBlockList(blocked));
    }
    if cfg.corpus.dedup {
        corpus = dedup(&corpus);
    }
    let stopwords_version = stopwords.version.clone();
    let tokenizer = Tokenizer::new(cfg.tokenizer.clone(), stopwords);
    let docs = tokenize_corpus(&corpus, &tokenizer);
    let vocabulary = docs
        .iter()
        .flat_map(|d| d.tokens.iter())
        .collect::<HashSet<_>>()
        .len();
    let summary = CorpusSummary {
        documents_read: raw.len(),
        documents_kept: corpus.len(),
        steps: corpus.provenance.steps.clone(),
        tokens: docs.iter().map(|d| d.tokens.len()).sum(),
        vocabulary,
        stopwords: stopwords_version,
        stemmer: if cfg.tokenizer.stem {
            STEMMER.into()
        } else {
            "none".into()
        },
    };
    Ok(PreparedCorpus { summary, docs })
}

fn file_stem(name: &str) -> String {
    name.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn run_score(
    cfg: &PipelineConfig,
    docs: &[TokenizedDoc],
    out: &mut BundleWriter,
) -> Result<(), PipelineError> {
    const S: &str = "score";
    let mut seen = HashSet::new();
    for spec in &cfg.paths.lexicons {
        let lex = lexicon::load(spec).at(S)?;
        let stem = file_stem(&lex.name);
        if !seen.insert(stem.clone()) {
            return Err(fail(S)(format!("two lexicons are named {:?}", lex.name)));
        }
        let rows = signature_table(docs, &lex, cfg.score.aggregation).at(S)?;
        let mut csv = Vec::new();
        write_scores_csv(&mut csv, &lex, &rows).at(S)?;
        out.write(&format!("score/{stem}.csv"), &csv).at(S)?;
        let json = serde_json::json!({
            "lexicon": lex.name,
            "categories": lex.category_names(),
            "aggregation": cfg.score.aggregation,
            "rows": rows,
        });
        out.write_json(&format!("score/{stem}.json"), &json).at(S)?;
    }
    Ok(())
}

fn run_topics(
    cfg: &PipelineConfig,
    docs: &[TokenizedDoc],
    out: &mut BundleWriter,
) -> Result<(), PipelineError> {
    const S: &str = "topics";
    let t = &cfg.topics;
    let base = TopicModelConfig {
        k: t.schedule.start,
        alpha: t.alpha,
        beta: t.beta,
        iterations: t.iterations,
        burn_in: t.burn_in,
        seed: derive_seed(cfg.seed, TOPICS_STREAM),
    };
    let opts = CoherenceOptions {
        measure: t.coherence.measure,
        window: t.coherence.window,
        top_n: t.coherence.top_n,
        ..CoherenceOptions::default()
    };
    let schedule = linear_schedule(t.schedule.start, t.schedule.end, t.schedule.step);
    let sweep = match t.fine_step {
        Some(step) => sweep_two_phase(docs, &schedule, step, t.delta, &base, &opts),
        None => sweep_k(docs, &schedule, &base, &opts),
    }
    .at(S)?;
    let selection =
        select_k(&sweep, t.delta, t.acceptance).ok_or_else(|| fail(S)("empty sweep".into()))?;

    let model = fit_lda(docs, &config_for_k(&base, selection.k)).at(S)?;
    let report = coherence(&model, docs, &opts).at(S)?;
    let ranked = relevance_terms(&model, t.lambda, t.relevance_top_n);
    let map = intertopic_map(&model, t.projection).at(S)?;

    let mut buf = Vec::new();
    write_sweep_csv(&mut buf, &sweep).at(S)?;
    out.write("topics/sweep.csv", &buf).at(S)?;
    out.write_json(
        "topics/selection.json",
        &serde_json::json!({
            "selection": selection,
            "coherence": report,
            "sweep": sweep,
            "lambda": t.lambda,
            "projection": t.projection,
        }),
    )
    .at(S)?;
    out.write_json("topics/model.json", &model).at(S)?;
    let mut buf = Vec::new();
    write_relevance_csv(&mut buf, &ranked).at(S)?;
    out.write("topics/relevance.csv", &buf).at(S)?;
    let mut buf = Vec::new();
    write_intertopic_csv(&mut buf, &map).at(S)?;
    out.write("topics/intertopic.csv", &buf).at(S)?;
    Ok(())
}

fn run_network(
    cfg: &PipelineConfig,
    docs: &[TokenizedDoc],
    out: &mut BundleWriter,
) -> Result<(), PipelineError> {
    const S: &str = "network";
    let n = &cfg.network;
    let full = build_cooccurrence(docs, n.min_weight);
    let net = giant_component(&full).at(S)?;
    let cents = centralities(&net).at(S)?;
    let clustering = clustering_and_paths(&net).at(S)?;
    let partition = louvain(&net, n.resolution);
    let seed = derive_seed(cfg.seed, NETWORK_STREAM);
    let small_world = match er_null(net.node_count(), net.edge_count(), n.null_samples, seed)
        .and_then(|null| small_world_sdelta(&net, &null, n.threshold).map(|sw| (null, sw)))
    {
        Ok((null_model, sw)) => serde_json::json!({ "null": null_model, "result": sw }),
        Err(e @ (SemnetError::DegenerateNull(_) | SemnetError::UndefinedPathLength)) => {
            serde_json::json!({ "undefined": e.to_string(), "null_samples": n.null_samples, "seed": seed })
        }
        Err(e) => return Err(fail(S)(e.to_string())),
    };

    let mut buf = Vec::new();
    write_gexf(&mut buf, &net, &cents, &partition).at(S)?;
    out.write("network/network.gexf", &buf).at(S)?;
    let mut buf = Vec::new();
    write_edge_csv(&mut buf, &net).at(S)?;
    out.write("network/edges.csv", &buf).at(S)?;
    let mut buf = Vec::new();
    write_centralities_csv(&mut buf, &cents, Some(&partition)).at(S)?;
    out.write("network/centralities.csv", &buf).at(S)?;
    let isolates = full
        .graph()
        .components()
        .iter()
        .filter(|c| c.len() == 1)
        .count();
    out.write_json(
        "network/stats.json",
        &serde_json::json!({
            "cooccurrence": {
                "nodes": full.node_count(),
                "edges": full.edge_count(),
                "isolates": isolates,
                "min_weight": n.min_weight,
            },
            "giant_component": { "nodes": net.node_count(), "edges": net.edge_count() },
            "clustering": clustering,
            "small_world": small_world,
            "communities": {
                "count": partition.community_count(),
                "modularity": partition.modularity,
                "resolution": partition.resolution,
            },
        }),
    )
    .at(S)?;
    Ok(())
}

fn run_trends(cfg: &PipelineConfig, out: &mut BundleWriter) -> Result<(), PipelineError> {
    const S: &str = "trends";
    let t = &cfg.trends;
    let exports = cfg
        .paths
        .ngrams
        .iter()
        .map(|p| parse_ngram_tsv(p).map_err(|e| format!("{}: {e}", p.display())))
        .collect::<Result<Vec<_>, _>>()
        .map_err(fail(S))?;
    let mut counts = merge_exports(exports);
    if t.case_insensitive {
        counts = fold_case(counts);
    }
    let totals_path = cfg.paths.totals.as_deref().expect("validated");
    let totals = parse_totals(totals_path).at(S)?;
    let (first, last) = match t.years {
        Some([a, b]) => (a, b),
        None => match (totals.keys().next(), totals.keys().next_back()) {
            (Some(&a), Some(&b)) => (a, b),
            _ => return Err(fail(S)("totals file is empty".into())),
        },
    };

    let wanted: Vec<String> = if t.terms.is_empty() {
        counts.keys().cloned().collect()
    } else if t.case_insensitive {
        t.terms.iter().map(|s| s.to_lowercase()).collect()
    } else {
        t.terms.clone()
    };
    if wanted.is_empty() {
        return Err(fail(S)("the ngram exports contain no terms".into()));
    }
    let empty = YearCounts::default();
    let absent: Vec<&String> = wanted.iter().filter(|w| !counts.contains_key(*w)).collect();
    let per_term: Vec<TrendSeries> = wanted
        .iter()
        .map(|w| relative_series(w, counts.get(w).unwrap_or(&empty), &totals, first..=last))
        .collect::<Result<_, _>>()
        .at(S)?;
    let mut combined = combine_with(&per_term, t.combine).at(S)?;
    if let Some(label) = &t.label {
        combined.term_label = label.clone();
    }
    let smoothed_terms: Vec<TrendSeries> =
        per_term.iter().map(|s| smooth(s, t.smoothing)).collect();
    let smoothed = smooth(&combined, t.smoothing);

    let onsets: BTreeMap<&str, Option<i32>> = per_term
        .iter()
        .map(|s| (s.term_label.as_str(), onset_year(s)))
        .collect();

    let mut raw_rows = per_term.clone();
    raw_rows.push(combined.clone());
    let mut buf = Vec::new();
    write_tidy_csv(&mut buf, &raw_rows).at(S)?;
    out.write("trends/series.csv", &buf).at(S)?;
    let mut smooth_rows = smoothed_terms.clone();
    smooth_rows.push(smoothed.clone());
    let mut buf = Vec::new();
    write_tidy_csv(&mut buf, &smooth_rows).at(S)?;
    out.write("trends/smoothed.csv", &buf).at(S)?;
    let mut buf = Vec::new();
    write_plot_csv(&mut buf, std::slice::from_ref(&smoothed)).at(S)?;
    out.write("trends/plot_combined.csv", &buf).at(S)?;
    let mut buf = Vec::new();
    write_plot_csv(&mut buf, &smoothed_terms).at(S)?;
    out.write("trends/plot_per_term.csv", &buf).at(S)?;
    out.write_json(
        "trends/trends.json",
        &serde_json::json!({
            "metadata": {
                "years": [first, last],
                "years_from_totals": t.years.is_none(),
                "smoothing": t.smoothing,
                "case_insensitive": t.case_insensitive,
                "combine": t.combine,
                "note": "smoothing and case handling are not stated for the original figures; these are defaults",
            },
            "combined_label": combined.term_label,
            "onset": { "combined": onset_year(&combined), "terms": onsets },
            "absent_terms": absent,
            "combined": combined,
            "combined_smoothed": smoothed,
        }),
    )
    .at(S)?;
    Ok(())
}
