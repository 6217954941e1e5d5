use std::collections::HashMap;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{TopicError, TopicModel, TopicModelConfig};
use crate::corpus::TokenizedDoc;

/// Sorted, duplicate-free term list with a reverse index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    terms: Vec<String>,
    index: HashMap<String, u32>,
}

impl Vocabulary {
    pub fn from_docs(docs: &[TokenizedDoc]) -> Self {
        let mut terms: Vec<String> = docs.iter().flat_map(|d| d.tokens.iter().cloned()).collect();
        terms.sort_unstable();
        terms.dedup();
        let index = terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as u32))
            .collect();
        Vocabulary { terms, index }
    }

    pub fn id(&self, term: &str) -> Option<u32> {
        self.index.get(term).copied()
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn encode(&self, doc: &TokenizedDoc) -> Vec<u32> {
        doc.tokens.iter().filter_map(|t| self.id(t)).collect()
    }
}

/// Collapsed Gibbs sampler state: one topic assignment per token plus the
/// document-topic, topic-word and topic count tables.
#[derive(Debug, Clone)]
pub struct GibbsSampler {
    k: usize,
    v: usize,
    alpha: f64,
    beta: f64,
    docs: Vec<Vec<u32>>,
    z: Vec<Vec<u32>>,
    n_dt: Vec<u32>,
    /// Word-major: `n_wt[w * k + t]`.
    n_wt: Vec<u32>,
    n_t: Vec<u32>,
    rng: ChaCha8Rng,
    cumulative: Vec<f64>,
}

impl GibbsSampler {
    /// Initialises assignments uniformly at random.
    pub fn new(docs: Vec<Vec<u32>>, vocab_len: usize, config: &TopicModelConfig) -> Self {
        let k = config.k;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut n_dt = vec![0u32; docs.len() * k];
        let mut n_wt = vec![0u32; vocab_len * k];
        let mut n_t = vec![0u32; k];
        let z = docs
            .iter()
            .enumerate()
            .map(|(d, words)| {
                words
                    .iter()
                    .map(|&w| {
                        let t = rng.random_range(0..k);
                        n_dt[d * k + t] += 1;
                        n_wt[w as usize * k + t] += 1;
                        n_t[t] += 1;
                        t as u32
                    })
                    .collect()
            })
            .collect();
        GibbsSampler {
            k,
            v: vocab_len,
            alpha: config.alpha(),
            beta: config.beta,
            docs,
            z,
            n_dt,
            n_wt,
            n_t,
            rng,
            cumulative: vec![0.0; k],
        }
    }

    /// One full pass resampling every token's topic from its conditional.
    pub fn sweep(&mut self) {
        let k = self.k;
        let v_beta = self.v as f64 * self.beta;
        for d in 0..self.docs.len() {
            for i in 0..self.docs[d].len() {
                let w = self.docs[d][i] as usize;
                let old = self.z[d][i] as usize;
                self.n_dt[d * k + old] -= 1;
                self.n_wt[w * k + old] -= 1;
                self.n_t[old] -= 1;

                let dt = &self.n_dt[d * k..(d + 1) * k];
                let wt = &self.n_wt[w * k..(w + 1) * k];
                let mut total = 0.0;
                for t in 0..k {
                    total += (dt[t] as f64 + self.alpha) * (wt[t] as f64 + self.beta)
                        / (self.n_t[t] as f64 + v_beta);
                    self.cumulative[t] = total;
                }
                let u = self.rng.random::<f64>() * total;
                let new = self.cumulative.iter().position(|&c| u < c).unwrap_or(k - 1);

                self.z[d][i] = new as u32;
                self.n_dt[d * k + new] += 1;
                self.n_wt[w * k + new] += 1;
                self.n_t[new] += 1;
            }
        }
    }

    /// Number of tokens currently assigned to some topic.
    pub fn total_assigned(&self) -> u64 {
        self.n_t.iter().map(|&c| c as u64).sum()
    }

    pub fn total_tokens(&self) -> u64 {
        self.docs.iter().map(|d| d.len() as u64).sum()
    }

    pub fn topic_counts(&self) -> &[u32] {
        &self.n_t
    }

    fn accumulate(&self, acc_wt: &mut [f64], acc_dt: &mut [f64]) {
        for (a, &c) in acc_wt.iter_mut().zip(&self.n_wt) {
            *a += c as f64;
        }
        for (a, &c) in acc_dt.iter_mut().zip(&self.n_dt) {
            *a += c as f64;
        }
    }
}

/// Fits LDA by collapsed Gibbs sampling. `phi` and `theta` are estimated
/// from count tables averaged over the post-burn-in sweeps:
/// `phi[t][w] = (n_tw + beta) / (n_t + V beta)` and
/// `theta[d][t] = (n_dt + alpha) / (n_d + k alpha)`.
pub fn fit_lda(docs: &[TokenizedDoc], config: &TopicModelConfig) -> Result<TopicModel, TopicError> {
    config.validate()?;
    let vocab = Vocabulary::from_docs(docs);
    if vocab.is_empty() {
        return Err(TopicError::Input("corpus has no tokens".into()));
    }
    let encoded: Vec<Vec<u32>> = docs.iter().map(|d| vocab.encode(d)).collect();
    let total: usize = encoded.iter().map(Vec::len).sum();
    if config.k > total {
        return Err(TopicError::Input(format!(
            "k = {} exceeds the {total} tokens in the corpus",
            config.k
        )));
    }
    let (k, v) = (config.k, vocab.len());
    let mut corpus_term_counts = vec![0u64; v];
    for &w in encoded.iter().flatten() {
        corpus_term_counts[w as usize] += 1;
    }
    let doc_lens: Vec<usize> = encoded.iter().map(Vec::len).collect();

    let mut sampler = GibbsSampler::new(encoded, v, config);
    let mut acc_wt = vec![0.0; v * k];
    let mut acc_dt = vec![0.0; docs.len() * k];
    for it in 0..config.iterations {
        sampler.sweep();
        if it >= config.burn_in {
            sampler.accumulate(&mut acc_wt, &mut acc_dt);
        }
    }
    let samples = (config.iterations - config.burn_in) as f64;
    let (alpha, beta) = (config.alpha(), config.beta);

    let mut acc_t = vec![0.0; k];
    for w in 0..v {
        for t in 0..k {
            acc_t[t] += acc_wt[w * k + t];
        }
    }
    let phi = (0..k)
        .map(|t| {
            let denom = acc_t[t] / samples + v as f64 * beta;
            (0..v)
                .map(|w| (acc_wt[w * k + t] / samples + beta) / denom)
                .collect()
        })
        .collect();
    let theta = (0..docs.len())
        .map(|d| {
            let denom = doc_lens[d] as f64 + k as f64 * alpha;
            (0..k)
                .map(|t| (acc_dt[d * k + t] / samples + alpha) / denom)
                .collect()
        })
        .collect();
    let weights = acc_t.iter().map(|c| c / samples / total as f64).collect();

    Ok(TopicModel {
        config: config.clone(),
        vocab: vocab.terms().to_vec(),
        phi,
        theta,
        doc_ids: docs.iter().map(|d| d.doc_id.clone()).collect(),
        corpus_term_counts,
        weights,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(tokens: &[&str]) -> TokenizedDoc {
        TokenizedDoc {
            doc_id: String::new(),
            tokens: tokens.iter().map(|s| s.to_string()).collect(),
            words: tokens.iter().map(|s| s.to_string()).collect(),
            raw_token_count: tokens.len(),
            ..Default::default()
        }
    }

    fn small_config(k: usize, seed: u64) -> TopicModelConfig {
        TopicModelConfig {
            iterations: 60,
            burn_in: 20,
            ..TopicModelConfig::new(k, seed)
        }
    }

    #[test]
    fn single_word_vocabulary() {
        let docs = vec![doc(&["woke", "woke"]), doc(&["woke"])];
        let m = fit_lda(&docs, &small_config(2, 1)).unwrap();
        assert_eq!(m.vocab, ["woke"]);
        for row in &m.phi {
            assert_eq!(row.len(), 1);
            assert!((row[0] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rows_are_distributions() {
        let docs = vec![
            doc(&["a", "b", "c", "a"]),
            doc(&["c", "d", "e"]),
            doc(&[]),
            doc(&["e", "a", "f", "f", "b"]),
        ];
        let m = fit_lda(&docs, &small_config(3, 9)).unwrap();
        for row in m.phi.iter().chain(&m.theta) {
            let s: f64 = row.iter().sum();
            assert!((s - 1.0).abs() < 1e-9, "{s}");
            assert!(row.iter().all(|&x| x >= 0.0));
        }
        let w: f64 = m.weights.iter().sum();
        assert!((w - 1.0).abs() < 1e-9);
        assert_eq!(m.theta[2], vec![1.0 / 3.0; 3]);
        assert_eq!(m.corpus_term_counts.iter().sum::<u64>(), 12);
    }

    #[test]
    fn deterministic_under_seed() {
        let docs = vec![doc(&["a", "b", "c", "a"]), doc(&["c", "d", "e", "d"])];
        let a = fit_lda(&docs, &small_config(2, 5)).unwrap();
        let b = fit_lda(&docs, &small_config(2, 5)).unwrap();
        assert_eq!(a, b);
        let c = fit_lda(&docs, &small_config(2, 6)).unwrap();
        assert_ne!(a.phi, c.phi);
    }

    #[test]
    fn sampler_conserves_tokens() {
        let docs: Vec<Vec<u32>> = vec![vec![0, 1, 2, 1], vec![3, 3, 0], vec![], vec![2, 4]];
        let mut s = GibbsSampler::new(docs, 5, &small_config(3, 2));
        assert_eq!(s.total_assigned(), 9);
        for _ in 0..50 {
            s.sweep();
            assert_eq!(s.total_assigned(), s.total_tokens());
        }
    }

    #[test]
    fn input_errors() {
        assert!(matches!(
            fit_lda(&[], &small_config(2, 0)),
            Err(TopicError::Input(_))
        ));
        assert!(matches!(
            fit_lda(&[doc(&[])], &small_config(2, 0)),
            Err(TopicError::Input(_))
        ));
        assert!(matches!(
            fit_lda(&[doc(&["a", "b"])], &small_config(3, 0)),
            Err(TopicError::Input(_))
        ));
        let mut bad = small_config(2, 0);
        bad.burn_in = bad.iterations;
        assert!(matches!(
            fit_lda(&[doc(&["a", "b"])], &bad),
            Err(TopicError::Config(_))
        ));
    }
}
