//! Concept co-occurrence networks and the statistics computed on them.
//!
//! Nodes are tokens; an edge joins two tokens that occur in the same
//! document, weighted by the number of documents in which they co-occur.
//! Structural measures (degree, triangles, eigencentrality, clustering,
//! path length) are computed on the unweighted graph; weights are reported
//! as weighted degree and drive the Louvain partition.

mod export;
mod graph;
mod louvain;
mod null;

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::TokenizedDoc;

pub use export::{write_centralities_csv, write_edge_csv, write_gexf};
pub use graph::Graph;
pub use louvain::{louvain, louvain_weighted, modularity, Partition};
pub use null::{
    er_null, gnm_random, small_world_from_graph, small_world_sdelta, watts_strogatz,
    NullModelStats, SmallWorldStats, DEFAULT_NULL_SAMPLES, DEFAULT_S_DELTA_THRESHOLD,
};

/// Power-iteration stopping tolerance for eigencentrality.
pub const EIGEN_TOLERANCE: f64 = 1e-10;
const EIGEN_MAX_ITER: usize = 1_000_000;

#[derive(Debug, Error)]
pub enum SemnetError {
    #[error("network is empty")]
    EmptyNetwork,
    #[error("network is disconnected; run giant_component first")]
    Disconnected,
    #[error("eigencentrality did not converge in {0} iterations")]
    NotConverged(usize),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("degenerate null model: {0}")]
    DegenerateNull(String),
    #[error("mean path length undefined: null samples have no edges")]
    UndefinedPathLength,
    #[error("output: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub weight: u64,
}

/// Weighted undirected concept graph. Edges satisfy `u < v`, are sorted and
/// unique, and carry weight >= 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemanticNetwork {
    nodes: Vec<String>,
    edges: Vec<Edge>,
}

impl SemanticNetwork {
    pub fn new(nodes: Vec<String>, edges: Vec<Edge>) -> Result<Self, SemnetError> {
        let n = nodes.len();
        let distinct: BTreeSet<&String> = nodes.iter().collect();
        if distinct.len() != n {
            return Err(SemnetError::Input("duplicate node labels".into()));
        }
        let mut edges = edges;
        edges.sort_by_key(|e| (e.u, e.v));
        for (i, e) in edges.iter().enumerate() {
            if e.u >= e.v || e.v >= n || e.weight == 0 {
                return Err(SemnetError::Input(format!("invalid edge {e:?}")));
            }
            if i > 0 && (edges[i - 1].u, edges[i - 1].v) == (e.u, e.v) {
                return Err(SemnetError::Input(format!("parallel edge {e:?}")));
            }
        }
        Ok(SemanticNetwork { nodes, edges })
    }

    /// Labels nodes `n0, n1, ...` and gives every edge weight 1.
    pub fn from_graph(graph: &Graph) -> Self {
        SemanticNetwork {
            nodes: (0..graph.node_count()).map(|i| format!("n{i}")).collect(),
            edges: graph
                .edges()
                .into_iter()
                .map(|(u, v)| Edge { u, v, weight: 1 })
                .collect(),
        }
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn graph(&self) -> Graph {
        Graph::from_edges(self.nodes.len(), self.edges.iter().map(|e| (e.u, e.v)))
    }

    pub fn weighted_degrees(&self) -> Vec<u64> {
        let mut wd = vec![0u64; self.nodes.len()];
        for e in &self.edges {
            wd[e.u] += e.weight;
            wd[e.v] += e.weight;
        }
        wd
    }

    /// Keeps `keep` (indices in increasing order) and the edges among them.
    fn restrict(&self, keep: &[usize]) -> SemanticNetwork {
        let mut map = vec![usize::MAX; self.nodes.len()];
        for (i, &u) in keep.iter().enumerate() {
            map[u] = i;
        }
        SemanticNetwork {
            nodes: keep.iter().map(|&u| self.nodes[u].clone()).collect(),
            edges: self
                .edges
                .iter()
                .filter(|e| map[e.u] != usize::MAX && map[e.v] != usize::MAX)
                .map(|e| Edge {
                    u: map[e.u],
                    v: map[e.v],
                    weight: e.weight,
                })
                .collect(),
        }
    }
}

/// Co-occurrence network over documents: one node per distinct token (sorted),
/// edge weight = number of documents containing both tokens. Edges lighter
/// than `min_weight` are dropped; their endpoints stay as nodes.
pub fn build_cooccurrence(docs: &[TokenizedDoc], min_weight: u64) -> SemanticNetwork {
    let vocab: BTreeSet<&str> = docs
        .iter()
        .flat_map(|d| d.tokens.iter().map(String::as_str))
        .collect();
    let index: HashMap<&str, usize> = vocab.iter().enumerate().map(|(i, &t)| (t, i)).collect();
    let mut weights: HashMap<(usize, usize), u64> = HashMap::new();
    for d in docs {
        let mut ids: Vec<usize> = d.tokens.iter().map(|t| index[t.as_str()]).collect();
        ids.sort_unstable();
        ids.dedup();
        for (a, &u) in ids.iter().enumerate() {
            for &v in &ids[a + 1..] {
                *weights.entry((u, v)).or_default() += 1;
            }
        }
    }
    let mut edges: Vec<Edge> = weights
        .into_iter()
        .filter(|&(_, w)| w >= min_weight.max(1))
        .map(|((u, v), weight)| Edge { u, v, weight })
        .collect();
    edges.sort_by_key(|e| (e.u, e.v));
    SemanticNetwork {
        nodes: vocab.into_iter().map(str::to_string).collect(),
        edges,
    }
}

/// Drops isolates and returns the largest connected component. Ties go to
/// the component whose sorted label set is lexicographically smallest.
pub fn giant_component(net: &SemanticNetwork) -> Result<SemanticNetwork, SemnetError> {
    let g = net.graph();
    let comps: Vec<Vec<usize>> = g.components().into_iter().filter(|c| c.len() > 1).collect();
    let label_set = |c: &[usize]| {
        let mut l: Vec<&str> = c.iter().map(|&u| net.nodes[u].as_str()).collect();
        l.sort_unstable();
        l
    };
    let best = comps
        .iter()
        .max_by(|a, b| {
            a.len()
                .cmp(&b.len())
                .then_with(|| label_set(b).cmp(&label_set(a)))
        })
        .ok_or(SemnetError::EmptyNetwork)?;
    Ok(net.restrict(best))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeCentrality {
    pub node: String,
    pub degree: usize,
    pub weighted_degree: u64,
    pub eigencentrality: f64,
    pub triangles: u64,
}

fn require_connected(g: &Graph) -> Result<(), SemnetError> {
    if g.node_count() == 0 {
        return Err(SemnetError::EmptyNetwork);
    }
    if !g.is_connected() {
        return Err(SemnetError::Disconnected);
    }
    Ok(())
}

/// Degree, weighted degree, max-normalised eigencentrality and triangle
/// count of every node of a connected network.
pub fn centralities(net: &SemanticNetwork) -> Result<Vec<NodeCentrality>, SemnetError> {
    let g = net.graph();
    require_connected(&g)?;
    let eig = g.eigenvector_centrality(EIGEN_TOLERANCE, EIGEN_MAX_ITER)?;
    let tri = g.triangles();
    let wd = net.weighted_degrees();
    Ok((0..g.node_count())
        .map(|u| NodeCentrality {
            node: net.nodes[u].clone(),
            degree: g.degree(u),
            weighted_degree: wd[u],
            eigencentrality: eig[u],
            triangles: tri[u],
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClusteringStats {
    /// Transitivity: 3 x triangles / connected triples.
    pub transitivity: f64,
    pub average_clustering: f64,
    pub mean_path_length: f64,
}

pub fn clustering_and_paths(net: &SemanticNetwork) -> Result<ClusteringStats, SemnetError> {
    let g = net.graph();
    Ok(ClusteringStats {
        transitivity: g.transitivity(),
        average_clustering: g.average_clustering(),
        mean_path_length: g.mean_shortest_path()?,
    })
}
