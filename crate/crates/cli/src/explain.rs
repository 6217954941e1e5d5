//! Plain-text listing of every resolved setting, enough to write a methods
//! paragraph from.

use std::fmt::Write;

use shibboleth::corpus::{Stopwords, DEFAULT_STOPWORDS_VERSION};
use shibboleth::topics::CoherenceOptions;

use crate::config::PipelineConfig;
use crate::pipeline::STEMMER;

fn or_unset(p: &Option<std::path::PathBuf>) -> String {
    p.as_ref()
        .map_or("(unset)".into(), |p| p.display().to_string())
}

pub fn explain_config(cfg: &PipelineConfig) -> String {
    let mut s = String::new();
    let c = &cfg.corpus;
    let t = &cfg.topics;
    let n = &cfg.network;
    let tr = &cfg.trends;
    let w = &mut s;
    let _ = writeln!(w, "seed: {}", cfg.seed);
    let _ = writeln!(w, "out: {}", cfg.out.display());
    let _ = writeln!(w, "corpus: {}", or_unset(&cfg.paths.corpus));
    let _ = writeln!(
        w,
        "corpus filters: require_tags [{}], blocked_authors {}, drop_empty_text {}",
        c.require_tags.join(", "),
        c.blocked_authors.len(),
        c.drop_empty_text
    );
    let _ = writeln!(
        w,
        "dedup: {} (leading \"RT @handle:\" removed, then normalised text compared)",
        if c.dedup { "on" } else { "off" }
    );
    let _ = writeln!(
        w,
        "normalisation: lowercase, NFC, urls and @mentions dropped, '#' stripped"
    );
    let stop = match &cfg.paths.stopwords {
        None => format!(
            "{DEFAULT_STOPWORDS_VERSION} ({} words, bundled)",
            Stopwords::default().len()
        ),
        Some(p) => p.display().to_string(),
    };
    let _ = writeln!(w, "stopwords: {stop}");
    let _ = writeln!(
        w,
        "tokenizer: min_len {}, stemmer {}",
        cfg.tokenizer.min_len,
        if cfg.tokenizer.stem { STEMMER } else { "none" }
    );
    let _ = writeln!(w, "lexicons: {}", cfg.paths.lexicons.join(", "));
    let _ = writeln!(
        w,
        "score: percent of raw tokens per category, {:?} aggregation, unstemmed prefix matching",
        cfg.score.aggregation
    );
    let _ = writeln!(
        w,
        "topics: collapsed gibbs lda, schedule {}..{} step {}, fine_step {}",
        t.schedule.start,
        t.schedule.end,
        t.schedule.step,
        t.fine_step.map_or("none".into(), |x| x.to_string())
    );
    let _ = writeln!(
        w,
        "lda: alpha {}, beta {}, iterations {}, burn_in {}",
        t.alpha.map_or("1/k".into(), |a| a.to_string()),
        t.beta,
        t.iterations,
        t.burn_in
    );
    let _ = writeln!(
        w,
        "coherence: {}, window {}, top_n {}, epsilon {:e}",
        t.coherence.measure,
        t.coherence.window,
        t.coherence.top_n,
        CoherenceOptions::default().epsilon
    );
    let _ = writeln!(
        w,
        "selection: smallest k with later gains below delta {}, accepted at coherence >= {}",
        t.delta, t.acceptance
    );
    let _ = writeln!(
        w,
        "relevance: lambda {}, top_n {}",
        t.lambda, t.relevance_top_n
    );
    let _ = writeln!(
        w,
        "intertopic map: jensen-shannon divergence, {:?} projection",
        t.projection
    );
    let _ = writeln!(
        w,
        "network: document co-occurrence, min_weight {}, isolates removed, giant component",
        n.min_weight
    );
    let _ = writeln!(
        w,
        "centrality: degree, weighted degree, eigencentrality (max = 1), triangles"
    );
    let _ = writeln!(
        w,
        "small world: transitivity and mean path length vs G(n, m), null_samples {}, threshold {}",
        n.null_samples, n.threshold
    );
    let _ = writeln!(w, "louvain: resolution {}", n.resolution);
    let _ = writeln!(
        w,
        "ngrams: {} export(s), totals {}",
        cfg.paths.ngrams.len(),
        or_unset(&cfg.paths.totals)
    );
    let _ = writeln!(
        w,
        "trends: years {}, smoothing {}, case_insensitive {}, combine {:?}",
        tr.years
            .map_or("from totals".into(), |[a, b]| format!("{a}..{b}")),
        tr.smoothing,
        tr.case_insensitive,
        tr.combine
    );
    s
}
