use std::collections::BTreeSet;

use rand::{seq::index, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Graph, SemanticNetwork, SemnetError};
use crate::derive_seed;

pub const DEFAULT_NULL_SAMPLES: usize = 100;
pub const DEFAULT_S_DELTA_THRESHOLD: f64 = 10.0;

fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Index of the unordered pair `(i, j)`, `i < j`, in row-major order.
fn decode_pair(n: usize, p: usize) -> (usize, usize) {
    let offset = |i: usize| i * n - i * (i + 1) / 2;
    let (mut lo, mut hi) = (0usize, n - 1);
    while lo + 1 < hi {
        let mid = (lo + hi) / 2;
        if offset(mid) <= p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let i = if offset(hi) <= p && hi < n - 1 {
        hi
    } else {
        lo
    };
    (i, i + 1 + (p - offset(i)))
}

/// Uniform sample from the graphs with exactly `n` nodes and `m` edges.
pub fn gnm_random(n: usize, m: usize, seed: u64) -> Result<Graph, SemnetError> {
    let total = pair_count(n);
    if m > total {
        return Err(SemnetError::Input(format!(
            "{m} edges do not fit in a simple graph on {n} nodes (max {total})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picked = index::sample(&mut rng, total, m);
    Ok(Graph::from_edges(
        n,
        picked
            .into_iter()
            .map(|p| decode_pair(n, p))
            .collect::<Vec<_>>(),
    ))
}

/// Ring lattice on `n` nodes, each joined to its `k / 2` nearest neighbours
/// on both sides, with every lattice edge rewired to a uniformly chosen new
/// endpoint with probability `p`. The edge count stays `n * (k / 2)`.
pub fn watts_strogatz(n: usize, k: usize, p: f64, seed: u64) -> Result<Graph, SemnetError> {
    if k >= n || k < 2 {
        return Err(SemnetError::Input(format!(
            "need 2 <= k < n, got k = {k}, n = {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for u in 0..n {
        for j in 1..=k / 2 {
            let v = (u + j) % n;
            adj[u].insert(v);
            adj[v].insert(u);
        }
    }
    for j in 1..=k / 2 {
        for u in 0..n {
            if rng.random::<f64>() >= p {
                continue;
            }
            let v = (u + j) % n;
            if !adj[u].contains(&v) || adj[u].len() >= n - 1 {
                continue;
            }
            let w = loop {
                let w = rng.random_range(0..n);
                if w != u && !adj[u].contains(&w) {
                    break w;
                }
            };
            adj[u].remove(&v);
            adj[v].remove(&u);
            adj[u].insert(w);
            adj[w].insert(u);
        }
    }
    let edges: Vec<(usize, usize)> = adj
        .iter()
        .enumerate()
        .flat_map(|(u, s)| s.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
        .collect();
    Ok(Graph::from_edges(n, edges))
}

/// Transitivity and mean path length statistics of a G(n, m) ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullModelStats {
    pub n: usize,
    pub m: usize,
    pub samples: usize,
    pub seed: u64,
    pub c_mean: f64,
    pub c_std: f64,
    pub l_mean: f64,
    pub l_std: f64,
    /// How L is defined on samples that come out disconnected.
    pub path_length_convention: String,
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Samples `samples` G(n, m) graphs (sample `i` seeded from `seed` and `i`)
/// and summarises transitivity and mean path length. Path length is taken on
/// each sample's giant component. Standard deviations use `n - 1`.
pub fn er_null(
    n: usize,
    m: usize,
    samples: usize,
    seed: u64,
) -> Result<NullModelStats, SemnetError> {
    if samples == 0 {
        return Err(SemnetError::Input("need at least one null sample".into()));
    }
    if m > pair_count(n) {
        return Err(SemnetError::Input(format!(
            "{m} edges do not fit on {n} nodes"
        )));
    }
    if m == 0 {
        return Err(SemnetError::UndefinedPathLength);
    }
    let stats: Vec<(f64, f64)> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let g = gnm_random(n, m, derive_seed(seed, i as u64))?;
            let l = g.giant_component().mean_shortest_path()?;
            Ok((g.transitivity(), l))
        })
        .collect::<Result<_, SemnetError>>()?;
    let cs: Vec<f64> = stats.iter().map(|s| s.0).collect();
    let ls: Vec<f64> = stats.iter().map(|s| s.1).collect();
    let (c_mean, c_std) = mean_std(&cs);
    let (l_mean, l_std) = mean_std(&ls);
    Ok(NullModelStats {
        n,
        m,
        samples,
        seed,
        c_mean,
        c_std,
        l_mean,
        l_std,
        path_length_convention: "giant component of each sample".into(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmallWorldStats {
    pub c_obs: f64,
    pub l_obs: f64,
    pub c_rand: f64,
    pub l_rand: f64,
    pub s_delta: f64,
    pub threshold: f64,
    pub small_world: bool,
    pub null_samples: usize,
    pub seed: u64,
}

/// Small-world coefficient `(C / C_rand) / (L / L_rand)` with C the
/// transitivity of a connected graph.
pub fn small_world_from_graph(
    graph: &Graph,
    null: &NullModelStats,
    threshold: f64,
) -> Result<SmallWorldStats, SemnetError> {
    if !graph.is_connected() {
        return Err(SemnetError::Disconnected);
    }
    let c_obs = graph.transitivity();
    let l_obs = graph.mean_shortest_path()?;
    if null.c_mean <= 0.0 {
        return Err(SemnetError::DegenerateNull("null transitivity is 0".into()));
    }
    if null.l_mean <= 0.0 || l_obs <= 0.0 {
        return Err(SemnetError::DegenerateNull("mean path length is 0".into()));
    }
    let s_delta = (c_obs / null.c_mean) / (l_obs / null.l_mean);
    Ok(SmallWorldStats {
        c_obs,
        l_obs,
        c_rand: null.c_mean,
        l_rand: null.l_mean,
        s_delta,
        threshold,
        small_world: s_delta > threshold,
        null_samples: null.samples,
        seed: null.seed,
    })
}

pub fn small_world_sdelta(
    net: &SemanticNetwork,
    null: &NullModelStats,
    threshold: f64,
) -> Result<SmallWorldStats, SemnetError> {
    small_world_from_graph(&net.graph(), null, threshold)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_decoding_is_a_bijection() {
        for n in [2usize, 3, 7, 20] {
            let mut seen = BTreeSet::new();
            for p in 0..pair_count(n) {
                let (i, j) = decode_pair(n, p);
                assert!(i < j && j < n, "n={n} p={p} -> ({i},{j})");
                assert!(seen.insert((i, j)));
            }
            assert_eq!(seen.len(), pair_count(n));
        }
    }

    #[test]
    fn gnm_has_exact_edge_count() {
        let g = gnm_random(50, 200, 7).unwrap();
        assert_eq!(g.node_count(), 50);
        assert_eq!(g.edge_count(), 200);
        assert_eq!(g, gnm_random(50, 200, 7).unwrap());
        assert!(gnm_random(4, 7, 0).is_err());
    }

    #[test]
    fn complete_null() {
        let s = er_null(6, 15, 5, 1).unwrap();
        assert_eq!((s.c_mean, s.l_mean, s.c_std, s.l_std), (1.0, 1.0, 0.0, 0.0));
    }

    #[test]
    fn empty_null_has_no_path_length() {
        assert!(matches!(
            er_null(10, 0, 3, 1),
            Err(SemnetError::UndefinedPathLength)
        ));
        assert!(matches!(er_null(4, 7, 3, 1), Err(SemnetError::Input(_))));
    }

    #[test]
    fn single_sample_reproducible() {
        assert_eq!(
            er_null(30, 60, 1, 9).unwrap(),
            er_null(30, 60, 1, 9).unwrap()
        );
    }

    #[test]
    fn watts_strogatz_preserves_edges() {
        let g = watts_strogatz(100, 6, 0.2, 3).unwrap();
        assert_eq!(g.edge_count(), 300);
        let lattice = watts_strogatz(30, 4, 0.0, 3).unwrap();
        assert!((lattice.transitivity() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn identical_stats_give_unit_coefficient() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]);
        let null = NullModelStats {
            n: 3,
            m: 3,
            samples: 1,
            seed: 0,
            c_mean: 1.0,
            c_std: 0.0,
            l_mean: 1.0,
            l_std: 0.0,
            path_length_convention: String::new(),
        };
        let s = small_world_from_graph(&g, &null, 10.0).unwrap();
        assert_eq!(s.s_delta, 1.0);
        assert!(!s.small_world);
        let degenerate = NullModelStats {
            c_mean: 0.0,
            ..null
        };
        assert!(matches!(
            small_world_from_graph(&g, &degenerate, 10.0),
            Err(SemnetError::DegenerateNull(_))
        ));
    }
}
