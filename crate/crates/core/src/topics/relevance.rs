use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{TopicError, TopicModel};

pub const DEFAULT_LAMBDA: f64 = 0.6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedTerm {
    pub term: String,
    pub relevance: f64,
    /// Topic-word probability.
    pub probability: f64,
    /// Probability divided by the term's corpus frequency.
    pub lift: f64,
}

/// Ranks each topic's terms by
/// `lambda * ln phi[t][w] + (1 - lambda) * ln(phi[t][w] / p(w))`,
/// where `p(w)` is the corpus frequency of `w`. Ties keep vocabulary order.
pub fn relevance_terms(model: &TopicModel, lambda: f64, top_n: usize) -> Vec<Vec<RankedTerm>> {
    let total: u64 = model.corpus_term_counts.iter().sum();
    let marginal: Vec<f64> = model
        .corpus_term_counts
        .iter()
        .map(|&c| c as f64 / total as f64)
        .collect();
    model
        .phi
        .iter()
        .map(|row| {
            let mut scored: Vec<(usize, f64)> = row
                .iter()
                .zip(&marginal)
                .enumerate()
                .map(|(w, (&p, &pw))| (w, lambda * p.ln() + (1.0 - lambda) * (p / pw).ln()))
                .collect();
            scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
            scored
                .into_iter()
                .take(top_n)
                .map(|(w, relevance)| RankedTerm {
                    term: model.vocab[w].clone(),
                    relevance,
                    probability: row[w],
                    lift: row[w] / marginal[w],
                })
                .collect()
        })
        .collect()
}

/// Long format: `topic,rank,term,relevance,probability,lift`.
pub fn write_relevance_csv<W: Write>(out: W, ranked: &[Vec<RankedTerm>]) -> Result<(), TopicError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["topic", "rank", "term", "relevance", "probability", "lift"])?;
    for (t, terms) in ranked.iter().enumerate() {
        for (r, term) in terms.iter().enumerate() {
            w.write_record([
                t.to_string(),
                (r + 1).to_string(),
                term.term.clone(),
                term.relevance.to_string(),
                term.probability.to_string(),
                term.lift.to_string(),
            ])?;
        }
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}
