//! Batch pipeline wiring corpus preparation, lexicon scoring, topic models,
//! co-occurrence networks and ngram trends into one reproducible report
//! bundle.

#![forbid(unsafe_code)]

pub mod bundle;
pub mod config;
pub mod explain;
pub mod pipeline;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use bundle::{BundleWriter, Manifest, ManifestEntry};
pub use config::{ConfigError, PipelineConfig};
pub use explain::explain_config;
pub use pipeline::{run_pipeline, PipelineError, ReportBundle};

/// Exit status for a validation failure (bad config, missing input).
pub const EXIT_VALIDATION: u8 = 2;
/// Exit status for a failure inside a stage.
pub const EXIT_STAGE: u8 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Ingest,
    Score,
    Topics,
    Network,
    Trends,
}

impl Stage {
    pub const ANALYSES: [Stage; 4] = [Stage::Score, Stage::Topics, Stage::Network, Stage::Trends];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Ingest => "ingest",
            Stage::Score => "score",
            Stage::Topics => "topics",
            Stage::Network => "network",
            Stage::Trends => "trends",
        }
    }

    pub fn needs_corpus(self) -> bool {
        !matches!(self, Stage::Trends)
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Stage {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "ingest" => Ok(Stage::Ingest),
            "score" => Ok(Stage::Score),
            "topics" => Ok(Stage::Topics),
            "network" => Ok(Stage::Network),
            "trends" => Ok(Stage::Trends),
            other => Err(format!("unknown stage {other:?}")),
        }
    }
}

/// Parses a comma-separated stage list into dependency order without
/// repeats. An empty string gives an empty list.
pub fn parse_stages(list: &str) -> Result<Vec<Stage>, String> {
    let mut stages: Vec<Stage> = list
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(str::parse)
        .collect::<Result<_, _>>()?;
    stages.sort();
    stages.dedup();
    Ok(stages)
}
