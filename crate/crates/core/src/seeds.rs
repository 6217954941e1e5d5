//! The default list of 60 seed terms used to scope collection and trend
//! queries, shipped as `data/seed_terms.tsv` (phrase and hashtag columns).

use crate::corpus::{to_hashtag, Tag};

const SEED_TERMS_TSV: &str = include_str!("../data/seed_terms.tsv");

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedTerm {
    pub phrase: String,
    pub tag: Tag,
}

/// Parses a `phrase<TAB>hashtag` table with a header row. The hashtag column
/// is optional; when absent it is derived from the phrase.
pub fn parse_seed_terms(text: &str) -> Result<Vec<SeedTerm>, String> {
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let mut cols = line.split('\t');
        let phrase = cols.next().unwrap_or_default().trim();
        let tag = match cols.next().map(str::trim).filter(|s| !s.is_empty()) {
            Some(h) => Tag::new(h),
            None => to_hashtag(phrase),
        }
        .map_err(|e| format!("line {}: {e}", idx + 1))?;
        out.push(SeedTerm {
            phrase: phrase.to_string(),
            tag,
        });
    }
    Ok(out)
}

pub fn default_seed_terms() -> Vec<SeedTerm> {
    parse_seed_terms(SEED_TERMS_TSV).expect("bundled seed term table is valid")
}
