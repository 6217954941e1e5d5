//! LDA topic models fitted by collapsed Gibbs sampling, plus the tools used
//! to choose and read them: coherence, k sweeps, relevance ranking and an
//! intertopic distance map.

mod coherence;
mod intertopic;
mod lda;
mod relevance;
mod select;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use coherence::{
    coherence, coherence_cv, coherence_umass, cv_topic_scores, top_words, CoherenceMeasure,
    CoherenceOptions, CoherenceReport,
};
pub use intertopic::{
    classical_mds, intertopic_map, jensen_shannon, write_intertopic_csv, IntertopicMap, Projection,
};
pub use lda::{fit_lda, GibbsSampler, Vocabulary};
pub use relevance::{relevance_terms, write_relevance_csv, RankedTerm, DEFAULT_LAMBDA};
pub use select::{
    config_for_k, linear_schedule, refine_schedule, select_k, sweep_k, sweep_k_models,
    sweep_two_phase, write_sweep_csv, Selection, SweepPoint, SweepResult,
};

#[derive(Debug, Error)]
pub enum TopicError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("coherence undefined for topic {topic}: top word {word:?} occurs in no window")]
    UndefinedCoherence { topic: usize, word: String },
    #[error("k = {k}: {source}")]
    AtK {
        k: usize,
        #[source]
        source: Box<TopicError>,
    },
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopicModelConfig {
    pub k: usize,
    /// Symmetric document-topic prior; `None` means `1 / k`.
    #[serde(default)]
    pub alpha: Option<f64>,
    /// Symmetric topic-word prior.
    #[serde(default = "default_beta")]
    pub beta: f64,
    /// Total Gibbs sweeps, burn-in included.
    #[serde(default = "default_iterations")]
    pub iterations: usize,
    #[serde(default = "default_burn_in")]
    pub burn_in: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_beta() -> f64 {
    0.01
}
fn default_iterations() -> usize {
    1000
}
fn default_burn_in() -> usize {
    200
}

impl TopicModelConfig {
    pub fn new(k: usize, seed: u64) -> Self {
        TopicModelConfig {
            k,
            alpha: None,
            beta: default_beta(),
            iterations: default_iterations(),
            burn_in: default_burn_in(),
            seed,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha.unwrap_or(1.0 / self.k as f64)
    }

    pub fn validate(&self) -> Result<(), TopicError> {
        let bad = |m: &str| Err(TopicError::Config(m.to_string()));
        if self.k < 1 {
            return bad("k must be at least 1");
        }
        if !(self.alpha() > 0.0 && self.alpha().is_finite()) {
            return bad("alpha must be positive");
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return bad("beta must be positive");
        }
        if self.burn_in >= self.iterations {
            return bad("burn_in must be smaller than iterations");
        }
        Ok(())
    }
}

/// A fitted topic model. Rows of `phi` (k x V) and `theta` (D x k) are
/// probability distributions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicModel {
    pub config: TopicModelConfig,
    pub vocab: Vec<String>,
    pub phi: Vec<Vec<f64>>,
    pub theta: Vec<Vec<f64>>,
    pub doc_ids: Vec<String>,
    /// Occurrences of each vocabulary item in the training corpus.
    pub corpus_term_counts: Vec<u64>,
    /// Share of corpus tokens assigned to each topic (posterior mean).
    pub weights: Vec<f64>,
}

impl TopicModel {
    pub fn k(&self) -> usize {
        self.phi.len()
    }

    pub fn vocab_len(&self) -> usize {
        self.vocab.len()
    }
}
