//! The pipeline configuration: one JSON document, unknown keys rejected.
//! Relative paths resolve against the directory holding the config file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use shibboleth::corpus::TokenizerOptions;
use shibboleth::lexicon::Aggregation;
use shibboleth::topics::{CoherenceMeasure, Projection, DEFAULT_LAMBDA};
use shibboleth::trends::{CombineMode, DEFAULT_SMOOTHING};

use crate::Stage;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("config: {0}")]
    Parse(String),
    #[error("config field `{field}`: {message}")]
    Field { field: String, message: String },
}

fn field(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Field {
        field: field.to_string(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub paths: PathsConfig,
    pub corpus: CorpusConfig,
    pub tokenizer: TokenizerOptions,
    pub score: ScoreConfig,
    pub topics: TopicsConfig,
    pub network: NetworkConfig,
    pub trends: TrendsConfig,
    pub seed: u64,
    pub out: PathBuf,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            paths: PathsConfig::default(),
            corpus: CorpusConfig::default(),
            tokenizer: TokenizerOptions::default(),
            score: ScoreConfig::default(),
            topics: TopicsConfig::default(),
            network: NetworkConfig::default(),
            trends: TrendsConfig::default(),
            seed: 0,
            out: PathBuf::from("out"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathsConfig {
    /// JSONL corpus; needed by score, topics and network.
    pub corpus: Option<PathBuf>,
    /// `builtin:<name>` or a `.dic` / `.json` file.
    pub lexicons: Vec<String>,
    /// Stopword list; the bundled en-v1 list when unset.
    pub stopwords: Option<PathBuf>,
    /// ngram TSV exports; needed by trends.
    pub ngrams: Vec<PathBuf>,
    /// ngram totals file; needed by trends.
    pub totals: Option<PathBuf>,
}

impl Default for PathsConfig {
    fn default() -> Self {
        PathsConfig {
            corpus: None,
            lexicons: vec!["builtin:emotion".into(), "builtin:moral_foundations".into()],
            stopwords: None,
            ngrams: Vec::new(),
            totals: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorpusConfig {
    pub dedup: bool,
    pub drop_empty_text: bool,
    /// Keep only documents carrying one of these tags (empty keeps all).
    pub require_tags: Vec<String>,
    pub blocked_authors: Vec<String>,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig {
            dedup: true,
            drop_empty_text: true,
            require_tags: Vec::new(),
            blocked_authors: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScoreConfig {
    pub aggregation: Aggregation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Schedule {
    pub start: usize,
    pub end: usize,
    pub step: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CoherenceConfig {
    pub measure: CoherenceMeasure,
    pub window: usize,
    pub top_n: usize,
}

impl Default for CoherenceConfig {
    fn default() -> Self {
        CoherenceConfig {
            measure: CoherenceMeasure::CV,
            window: 110,
            top_n: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TopicsConfig {
    pub schedule: Schedule,
    /// Step of the second sweep around the coarse selection; none skips it.
    pub fine_step: Option<usize>,
    pub delta: f64,
    pub acceptance: f64,
    pub alpha: Option<f64>,
    pub beta: f64,
    pub iterations: usize,
    pub burn_in: usize,
    pub coherence: CoherenceConfig,
    pub lambda: f64,
    pub relevance_top_n: usize,
    pub projection: Projection,
}

impl Default for TopicsConfig {
    fn default() -> Self {
        TopicsConfig {
            schedule: Schedule {
                start: 2,
                end: 56,
                step: 6,
            },
            fine_step: Some(1),
            delta: 0.01,
            acceptance: 0.5,
            alpha: None,
            beta: 0.01,
            iterations: 1000,
            burn_in: 200,
            coherence: CoherenceConfig::default(),
            lambda: DEFAULT_LAMBDA,
            relevance_top_n: 30,
            projection: Projection::Mds,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetworkConfig {
    pub min_weight: u64,
    pub null_samples: usize,
    pub threshold: f64,
    pub resolution: f64,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        NetworkConfig {
            min_weight: 1,
            null_samples: shibboleth::semnet::DEFAULT_NULL_SAMPLES,
            threshold: shibboleth::semnet::DEFAULT_S_DELTA_THRESHOLD,
            resolution: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrendsConfig {
    /// Inclusive `[first, last]`; the span of the totals file when unset.
    pub years: Option<[i32; 2]>,
    pub smoothing: usize,
    pub case_insensitive: bool,
    pub combine: CombineMode,
    /// Terms to keep from the exports; all terms when empty.
    pub terms: Vec<String>,
    /// Label of the combined series; the `+`-joined terms when unset.
    pub label: Option<String>,
}

impl Default for TrendsConfig {
    fn default() -> Self {
        TrendsConfig {
            years: None,
            smoothing: DEFAULT_SMOOTHING,
            case_insensitive: true,
            combine: CombineMode::Sum,
            terms: Vec::new(),
            label: None,
        }
    }
}

impl PipelineConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    /// Reads a config file and resolves its relative paths against the
    /// file's directory.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        let mut cfg = Self::from_json(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.resolve_paths(base);
        Ok(cfg)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(p) = self.paths.corpus.as_mut() {
            fix(p);
        }
        if let Some(p) = self.paths.stopwords.as_mut() {
            fix(p);
        }
        if let Some(p) = self.paths.totals.as_mut() {
            fix(p);
        }
        self.paths.ngrams.iter_mut().for_each(fix);
        for l in self.paths.lexicons.iter_mut() {
            if !l.starts_with("builtin:") && Path::new(l).is_relative() {
                *l = base.join(&*l).to_string_lossy().into_owned();
            }
        }
        fix(&mut self.out);
    }

    /// Checks values and the inputs the requested stages need. Nothing is
    /// touched on disk.
    pub fn validate(&self, stages: &[Stage]) -> Result<(), ConfigError> {
        if stages.is_empty() {
            return Err(field("stages", "at least one stage is required"));
        }
        let exists = |name: &str, p: &Path| {
            if p.exists() {
                Ok(())
            } else {
                Err(field(name, format!("{} does not exist", p.display())))
            }
        };
        if let Some(p) = &self.paths.corpus {
            exists("paths.corpus", p)?;
        }
        if let Some(p) = &self.paths.stopwords {
            exists("paths.stopwords", p)?;
        }
        if let Some(p) = &self.paths.totals {
            exists("paths.totals", p)?;
        }
        for p in &self.paths.ngrams {
            exists("paths.ngrams", p)?;
        }
        for l in &self.paths.lexicons {
            match l.strip_prefix("builtin:") {
                Some("emotion" | "moral_foundations") => {}
                Some(other) => {
                    return Err(field(
                        "paths.lexicons",
                        format!("unknown builtin lexicon {other:?}"),
                    ))
                }
                None => exists("paths.lexicons", Path::new(l))?,
            }
        }
        if self.out.as_os_str().is_empty() {
            return Err(field("out", "output directory is empty"));
        }

        let needs_corpus = stages.iter().any(|s| s.needs_corpus());
        if needs_corpus && self.paths.corpus.is_none() {
            return Err(field("paths.corpus", "required by the requested stages"));
        }
        if self.tokenizer.min_len == 0 {
            return Err(field("tokenizer.min_len", "must be at least 1"));
        }
        if stages.contains(&Stage::Score) && self.paths.lexicons.is_empty() {
            return Err(field("paths.lexicons", "score needs at least one lexicon"));
        }
        for t in &self.corpus.require_tags {
            shibboleth::corpus::Tag::new(t)
                .map_err(|e| field("corpus.require_tags", e.to_string()))?;
        }

        let t = &self.topics;
        if stages.contains(&Stage::Topics) {
            if t.schedule.start < 2 {
                return Err(field("topics.schedule.start", "k must be at least 2"));
            }
            if t.schedule.step == 0 {
                return Err(field("topics.schedule.step", "must be positive"));
            }
            if t.schedule.end < t.schedule.start {
                return Err(field("topics.schedule.end", "must not be below start"));
            }
        }
        if t.fine_step == Some(0) {
            return Err(field("topics.fine_step", "must be positive"));
        }
        if !(t.delta > 0.0 && t.delta.is_finite()) {
            return Err(field("topics.delta", "must be positive"));
        }
        if !t.acceptance.is_finite() {
            return Err(field("topics.acceptance", "must be finite"));
        }
        if let Some(a) = t.alpha {
            if !(a > 0.0 && a.is_finite()) {
                return Err(field("topics.alpha", "must be positive"));
            }
        }
        if !(t.beta > 0.0 && t.beta.is_finite()) {
            return Err(field("topics.beta", "must be positive"));
        }
        if t.burn_in >= t.iterations {
            return Err(field(
                "topics.burn_in",
                "must be smaller than topics.iterations",
            ));
        }
        if t.coherence.window == 0 {
            return Err(field("topics.coherence.window", "must be positive"));
        }
        if t.coherence.top_n < 2 {
            return Err(field("topics.coherence.top_n", "must be at least 2"));
        }
        if !(0.0..=1.0).contains(&t.lambda) {
            return Err(field("topics.lambda", "must lie in [0, 1]"));
        }

        let n = &self.network;
        if n.min_weight == 0 {
            return Err(field("network.min_weight", "must be at least 1"));
        }
        if n.null_samples == 0 {
            return Err(field("network.null_samples", "must be at least 1"));
        }
        if !n.threshold.is_finite() {
            return Err(field("network.threshold", "must be finite"));
        }
        if !(n.resolution > 0.0 && n.resolution.is_finite()) {
            return Err(field("network.resolution", "must be positive"));
        }

        if stages.contains(&Stage::Trends) {
            if self.paths.ngrams.is_empty() {
                return Err(field(
                    "paths.ngrams",
                    "trends needs at least one ngram export",
                ));
            }
            if self.paths.totals.is_none() {
                return Err(field("paths.totals", "required by trends"));
            }
        }
        if let Some([a, b]) = self.trends.years {
            if a > b {
                return Err(field("trends.years", "first year is after last year"));
            }
            let ok = shibboleth::trends::MIN_YEAR..=shibboleth::trends::MAX_YEAR;
            if !ok.contains(&a) || !ok.contains(&b) {
                return Err(field("trends.years", "years must lie in [1500, 2100]"));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_named() {
        let err = PipelineConfig::from_json(r#"{"topics": {"dleta": 0.02}}"#).unwrap_err();
        assert!(err.to_string().contains("dleta"), "{err}");
        let err = PipelineConfig::from_json(r#"{"sed": 1}"#).unwrap_err();
        assert!(err.to_string().contains("sed"), "{err}");
    }

    #[test]
    fn empty_object_gives_defaults() {
        let cfg = PipelineConfig::from_json("{}").unwrap();
        assert_eq!(cfg, PipelineConfig::default());
        assert_eq!(cfg.topics.coherence.window, 110);
        assert_eq!(cfg.topics.delta, 0.01);
        assert_eq!(cfg.trends.smoothing, 3);
    }

    #[test]
    fn validation_names_fields() {
        let cfg = PipelineConfig::default();
        assert!(
            matches!(cfg.validate(&[]), Err(ConfigError::Field { field, .. }) if field == "stages")
        );
        assert!(matches!(
            cfg.validate(&[Stage::Score]),
            Err(ConfigError::Field { field, .. }) if field == "paths.corpus"
        ));
        let mut bad = PipelineConfig::default();
        bad.topics.delta = 0.0;
        bad.paths.corpus = Some(PathBuf::from("Cargo.toml"));
        assert!(matches!(
            bad.validate(&[Stage::Topics]),
            Err(ConfigError::Field { field, .. }) if field == "topics.delta"
        ));
    }

    #[test]
    fn relative_paths_follow_the_config() {
        let mut cfg = PipelineConfig::from_json(
            r#"{"paths": {"corpus": "c.jsonl", "lexicons": ["builtin:emotion", "x.dic"]}, "out": "o"}"#,
        )
        .unwrap();
        cfg.resolve_paths(Path::new("/data"));
        assert_eq!(cfg.paths.corpus.unwrap(), Path::new("/data/c.jsonl"));
        assert_eq!(cfg.paths.lexicons, ["builtin:emotion", "/data/x.dic"]);
        assert_eq!(cfg.out, Path::new("/data/o"));
    }
}
