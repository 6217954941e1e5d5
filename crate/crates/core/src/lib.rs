//! Corpus analytics for hashtag-scoped social-media discourse.
//!
//! The crate is organised as a pipeline of independent stages:
//!
//! - [`corpus`]: JSONL ingestion, text normalisation, retweet-aware
//!   deduplication, pluggable document filters and stemmed tokenisation.
//! - [`lexicon`]: LIWC-style `.dic` dictionaries and percentage-of-words
//!   category scoring (emotion and moral-foundation signatures).
//! - [`topics`]: LDA via collapsed Gibbs sampling, c_v / UMass coherence,
//!   k sweeps with an explicit elbow rule, term relevance and an intertopic
//!   distance map.
//! - [`semnet`]: document co-occurrence networks, centralities, clustering,
//!   G(n, m) null models, the triangle-based small-world coefficient and
//!   Louvain communities.
//! - [`trends`]: ngram-export parsing, relative frequency series, combined
//!   queries, smoothing and onset detection.
//!
//! Every stage is a set of pure functions over immutable values; all
//! randomness is driven by explicit 64-bit seeds.

#![forbid(unsafe_code)]

pub mod corpus;
pub mod lexicon;
pub mod linalg;
pub mod seeds;
pub mod semnet;
pub mod topics;
pub mod trends;

/// Mixes a base seed with a stream index so that parallel work items get
/// independent, reproducible generators (SplitMix64 finaliser).
pub fn derive_seed(base: u64, stream: u64) -> u64 {
    let mut z = base
        .wrapping_add(stream.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
