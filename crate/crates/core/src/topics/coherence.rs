use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::{TopicError, TopicModel};
use crate::corpus::TokenizedDoc;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoherenceMeasure {
    /// Boolean sliding window, NPMI context vectors, cosine against the
    /// topic's summed vector.
    #[default]
    #[serde(rename = "c_v")]
    CV,
    /// Document co-occurrence log-conditional measure.
    #[serde(rename = "umass")]
    UMass,
}

impl std::fmt::Display for CoherenceMeasure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CoherenceMeasure::CV => "c_v",
            CoherenceMeasure::UMass => "umass",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CoherenceOptions {
    pub measure: CoherenceMeasure,
    pub window: usize,
    pub top_n: usize,
    pub epsilon: f64,
}

impl Default for CoherenceOptions {
    fn default() -> Self {
        CoherenceOptions {
            measure: CoherenceMeasure::CV,
            window: 110,
            top_n: 10,
            epsilon: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoherenceReport {
    pub measure: CoherenceMeasure,
    /// Unclamped per-topic values.
    pub per_topic: Vec<f64>,
    /// Mean over topics; clamped to [0, 1] for c_v.
    pub score: f64,
}

/// Highest-probability terms of every topic, ties broken by vocabulary order.
pub fn top_words(model: &TopicModel, top_n: usize) -> Vec<Vec<String>> {
    model
        .phi
        .iter()
        .map(|row| {
            let mut idx: Vec<usize> = (0..row.len()).collect();
            idx.sort_by(|&a, &b| row[b].total_cmp(&row[a]).then(a.cmp(&b)));
            idx.into_iter()
                .take(top_n)
                .map(|w| model.vocab[w].clone())
                .collect()
        })
        .collect()
}

/// Window and co-occurrence counts restricted to a set of words of interest.
struct WindowCounts {
    windows: u64,
    single: Vec<u64>,
    joint: Vec<u64>,
    n: usize,
}

impl WindowCounts {
    fn joint(&self, i: usize, j: usize) -> u64 {
        self.joint[i * self.n + j]
    }
}

/// Boolean sliding-window counts. A document shorter than the window is a
/// single window; longer documents contribute `len - window + 1` windows.
/// Empty documents contribute none.
fn sliding_window_counts(
    docs: &[TokenizedDoc],
    index: &HashMap<&str, usize>,
    window: usize,
) -> WindowCounts {
    let n = index.len();
    let mut counts = WindowCounts {
        windows: 0,
        single: vec![0; n],
        joint: vec![0; n * n],
        n,
    };
    let mut in_window = vec![0usize; n];
    let mut present: Vec<usize> = Vec::new();

    let record = |present: &[usize], counts: &mut WindowCounts| {
        counts.windows += 1;
        for (a, &i) in present.iter().enumerate() {
            counts.single[i] += 1;
            counts.joint[i * n + i] += 1;
            for &j in &present[a + 1..] {
                counts.joint[i * n + j] += 1;
                counts.joint[j * n + i] += 1;
            }
        }
    };

    for doc in docs {
        let ids: Vec<Option<usize>> = doc
            .tokens
            .iter()
            .map(|t| index.get(t.as_str()).copied())
            .collect();
        if ids.is_empty() {
            continue;
        }
        let width = window.min(ids.len());
        present.clear();
        in_window.iter_mut().for_each(|c| *c = 0);
        for id in ids[..width].iter().flatten() {
            if in_window[*id] == 0 {
                present.push(*id);
            }
            in_window[*id] += 1;
        }
        record(&present, &mut counts);
        for start in 1..=ids.len() - width {
            if let Some(out) = ids[start - 1] {
                in_window[out] -= 1;
                if in_window[out] == 0 {
                    present.retain(|&p| p != out);
                }
            }
            if let Some(inc) = ids[start + width - 1] {
                if in_window[inc] == 0 {
                    present.push(inc);
                }
                in_window[inc] += 1;
            }
            record(&present, &mut counts);
        }
    }
    counts
}

fn npmi(joint: f64, pi: f64, pj: f64, eps: f64) -> f64 {
    ((joint + eps) / (pi * pj)).ln() / -(joint + eps).ln()
}

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

/// Unclamped c_v value of each topic given as a list of top words.
pub fn cv_topic_scores(
    topics: &[Vec<String>],
    docs: &[TokenizedDoc],
    window: usize,
    epsilon: f64,
) -> Result<Vec<f64>, TopicError> {
    if window == 0 {
        return Err(TopicError::Input("window must be positive".into()));
    }
    let mut index: HashMap<&str, usize> = HashMap::new();
    for w in topics.iter().flatten() {
        let next = index.len();
        index.entry(w.as_str()).or_insert(next);
    }
    let counts = sliding_window_counts(docs, &index, window);
    let n_windows = counts.windows as f64;

    topics
        .iter()
        .enumerate()
        .map(|(t, words)| {
            let ids: Vec<usize> = words.iter().map(|w| index[w.as_str()]).collect();
            if let Some(pos) = ids.iter().position(|&i| counts.single[i] == 0) {
                return Err(TopicError::UndefinedCoherence {
                    topic: t,
                    word: words[pos].clone(),
                });
            }
            let p = |i: usize| counts.single[i] as f64 / n_windows;
            let vectors: Vec<Vec<f64>> = ids
                .iter()
                .map(|&i| {
                    ids.iter()
                        .map(|&j| npmi(counts.joint(i, j) as f64 / n_windows, p(i), p(j), epsilon))
                        .collect()
                })
                .collect();
            let mut sum = vec![0.0; ids.len()];
            for v in &vectors {
                for (s, x) in sum.iter_mut().zip(v) {
                    *s += x;
                }
            }
            let total: f64 = vectors.iter().map(|v| cosine(v, &sum)).sum();
            Ok(total / ids.len() as f64)
        })
        .collect()
}

fn check_top_n(model: &TopicModel, top_n: usize) -> Result<(), TopicError> {
    if top_n < 2 {
        return Err(TopicError::Input("top_n must be at least 2".into()));
    }
    if model.vocab_len() < top_n {
        return Err(TopicError::Input(format!(
            "top_n = {top_n} exceeds the vocabulary size {}",
            model.vocab_len()
        )));
    }
    Ok(())
}

/// c_v coherence of a model with the default window (110) and epsilon.
pub fn coherence_cv(
    model: &TopicModel,
    docs: &[TokenizedDoc],
    top_n: usize,
) -> Result<f64, TopicError> {
    let opts = CoherenceOptions {
        top_n,
        ..CoherenceOptions::default()
    };
    coherence(model, docs, &opts).map(|r| r.score)
}

/// UMass coherence per topic: mean over ordered top-word pairs of
/// `ln((D(wi, wj) + 1) / D(wj))` with document counts.
pub fn coherence_umass(
    topics: &[Vec<String>],
    docs: &[TokenizedDoc],
) -> Result<Vec<f64>, TopicError> {
    let doc_sets: Vec<HashSet<&str>> = docs
        .iter()
        .map(|d| d.tokens.iter().map(String::as_str).collect())
        .collect();
    let df = |w: &str| doc_sets.iter().filter(|s| s.contains(w)).count() as f64;
    let co = |a: &str, b: &str| {
        doc_sets
            .iter()
            .filter(|s| s.contains(a) && s.contains(b))
            .count() as f64
    };
    topics
        .iter()
        .enumerate()
        .map(|(t, words)| {
            let mut total = 0.0;
            let mut pairs = 0usize;
            for i in 1..words.len() {
                for j in 0..i {
                    let dj = df(&words[j]);
                    if dj == 0.0 {
                        return Err(TopicError::UndefinedCoherence {
                            topic: t,
                            word: words[j].clone(),
                        });
                    }
                    total += ((co(&words[i], &words[j]) + 1.0) / dj).ln();
                    pairs += 1;
                }
            }
            Ok(if pairs == 0 {
                0.0
            } else {
                total / pairs as f64
            })
        })
        .collect()
}

pub fn coherence(
    model: &TopicModel,
    docs: &[TokenizedDoc],
    opts: &CoherenceOptions,
) -> Result<CoherenceReport, TopicError> {
    check_top_n(model, opts.top_n)?;
    let topics = top_words(model, opts.top_n);
    let per_topic = match opts.measure {
        CoherenceMeasure::CV => cv_topic_scores(&topics, docs, opts.window, opts.epsilon)?,
        CoherenceMeasure::UMass => coherence_umass(&topics, docs)?,
    };
    let mean = per_topic.iter().sum::<f64>() / per_topic.len() as f64;
    let score = match opts.measure {
        CoherenceMeasure::CV => mean.clamp(0.0, 1.0),
        CoherenceMeasure::UMass => mean,
    };
    Ok(CoherenceReport {
        measure: opts.measure,
        per_topic,
        score,
    })
}
