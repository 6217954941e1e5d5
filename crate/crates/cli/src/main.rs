use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use shibboleth_cli::{
    explain_config, parse_stages, run_pipeline, PipelineConfig, PipelineError, Stage, EXIT_STAGE,
    EXIT_VALIDATION,
};

#[derive(Parser)]
#[command(
    name = "shibboleth",
    version,
    about = "Lexicon, topic, network and trend analysis of tagged corpora"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Pipeline config (JSON)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed, overriding the config
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory, overriding the config
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Read, filter and deduplicate the corpus
    Ingest(Common),
    /// Lexicon category signatures
    Score(Common),
    /// Topic model sweep, selection, relevance and intertopic map
    Topics(Common),
    /// Co-occurrence network statistics
    Network(Common),
    /// ngram trend series
    Trends(Common),
    /// Several stages in one run
    Run {
        #[command(flatten)]
        common: Common,
        /// Comma-separated subset of score,topics,network,trends
        #[arg(long, default_value = "score,topics,network,trends")]
        stages: String,
    },
    /// Print the resolved settings
    Explain(Common),
}

fn load(common: &Common) -> Result<PipelineConfig, String> {
    let mut cfg = match &common.config {
        Some(p) => PipelineConfig::load(p).map_err(|e| e.to_string())?,
        None => PipelineConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &common.out {
        cfg.out = out.clone();
    }
    Ok(cfg)
}

fn execute(common: &Common, stages: Result<Vec<Stage>, String>) -> ExitCode {
    let cfg = match load(common) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_VALIDATION);
        }
    };
    let stages = match stages {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: --stages: {e}");
            return ExitCode::from(EXIT_VALIDATION);
        }
    };
    match run_pipeline(&cfg, &stages) {
        Ok(bundle) => {
            println!(
                "wrote {} files to {}",
                bundle.manifest.files.len() + 1,
                bundle.root.display()
            );
            ExitCode::SUCCESS
        }
        Err(e @ PipelineError::Config(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_VALIDATION)
        }
        Err(e @ PipelineError::Stage { .. }) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_STAGE)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::Ingest(c) => execute(c, Ok(vec![Stage::Ingest])),
        Command::Score(c) => execute(c, Ok(vec![Stage::Score])),
        Command::Topics(c) => execute(c, Ok(vec![Stage::Topics])),
        Command::Network(c) => execute(c, Ok(vec![Stage::Network])),
        Command::Trends(c) => execute(c, Ok(vec![Stage::Trends])),
        Command::Run { common, stages } => execute(common, parse_stages(stages)),
        Command::Explain(c) => match load(c) {
            Ok(cfg) => {
                print!("{}", explain_config(&cfg));
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(EXIT_VALIDATION)
            }
        },
    }
}
