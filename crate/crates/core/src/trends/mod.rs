//! Diachronic term frequencies from ngram-corpus exports.
//!
//! Inputs are a per-term TSV (`ngram<TAB>year<TAB>match_count<TAB>volume_count`)
//! and a yearly totals file (`year,match_count,page_count,volume_count`
//! records separated by whitespace). Series are relative frequencies per
//! year; combined queries add per-term frequencies.

mod parse;
mod series;

use thiserror::Error;

pub use parse::{
    fold_case, merge_exports, parse_ngram_str, parse_ngram_tsv, parse_totals, parse_totals_str,
    YearCounts, YearRecord,
};
pub use series::{
    combine, combine_with, onset_year, relative_series, smooth, write_plot_csv, write_tidy_csv,
    CombineMode, TrendSeries, DEFAULT_SMOOTHING,
};

pub const MIN_YEAR: i32 = 1500;
pub const MAX_YEAR: i32 = 2100;

#[derive(Debug, Error)]
pub enum TrendError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("totals do not cover year {0}")]
    Coverage(i32),
    #[error("total match count for year {0} is zero")]
    ZeroTotal(i32),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("output: {0}")]
    Output(#[from] std::io::Error),
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
}
