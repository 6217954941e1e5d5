use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::SemanticNetwork;

/// Community assignment for every node plus the partition's modularity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    /// Community id per node; ids are numbered by first appearance.
    pub communities: Vec<usize>,
    pub modularity: f64,
    pub resolution: f64,
    pub levels: usize,
}

impl Partition {
    pub fn community_count(&self) -> usize {
        self.communities.iter().max().map_or(0, |m| m + 1)
    }
}

/// Weighted modularity with resolution `gamma`:
/// `sum_c [ w_in(c) / m - gamma * (deg(c) / 2m)^2 ]`.
/// Self-loops count once toward `w_in` and twice toward degree.
pub fn modularity(
    n: usize,
    edges: &[(usize, usize, f64)],
    communities: &[usize],
    gamma: f64,
) -> f64 {
    let mut degree = vec![0.0; n];
    let mut total = 0.0;
    let groups = communities.iter().max().map_or(0, |m| m + 1);
    let mut inside = vec![0.0; groups];
    for &(u, v, w) in edges {
        degree[u] += w;
        degree[v] += w;
        total += w;
        if communities[u] == communities[v] {
            inside[communities[u]] += w;
        }
    }
    if total == 0.0 {
        return 0.0;
    }
    let mut deg_c = vec![0.0; groups];
    for u in 0..n {
        deg_c[communities[u]] += degree[u];
    }
    (0..groups)
        .map(|c| inside[c] / total - gamma * (deg_c[c] / (2.0 * total)).powi(2))
        .sum()
}

struct Level {
    /// Neighbour lists without self-loops, sorted by neighbour.
    adj: Vec<Vec<(usize, f64)>>,
    loops: Vec<f64>,
}

impl Level {
    fn degree(&self, u: usize) -> f64 {
        self.adj[u].iter().map(|&(_, w)| w).sum::<f64>() + 2.0 * self.loops[u]
    }
}

fn renumber(labels: &mut [usize]) -> usize {
    let mut map = vec![usize::MAX; labels.iter().max().map_or(0, |&m| m + 1)];
    let mut next = 0;
    for l in labels.iter_mut() {
        if map[*l] == usize::MAX {
            map[*l] = next;
            next += 1;
        }
        *l = map[*l];
    }
    next
}

/// Moves nodes between communities until no single move improves
/// modularity. Returns the labels and whether anything moved.
fn local_moving(level: &Level, gamma: f64) -> (Vec<usize>, bool) {
    let n = level.adj.len();
    let k: Vec<f64> = (0..n).map(|u| level.degree(u)).collect();
    let m2: f64 = k.iter().sum();
    let mut comm: Vec<usize> = (0..n).collect();
    let mut tot = k.clone();
    let mut link = vec![0.0; n];
    let mut is_touched = vec![false; n];
    let mut touched: Vec<usize> = Vec::new();
    let mut any_move = false;
    loop {
        let mut moved = false;
        for u in 0..n {
            let own = comm[u];
            for &(v, w) in &level.adj[u] {
                let c = comm[v];
                if !is_touched[c] {
                    is_touched[c] = true;
                    touched.push(c);
                }
                link[c] += w;
            }
            tot[own] -= k[u];
            let gain = |c: usize, link: &[f64], tot: &[f64]| link[c] - gamma * tot[c] * k[u] / m2;
            let mut best = own;
            let mut best_gain = gain(own, &link, &tot);
            for &c in &touched {
                let g = gain(c, &link, &tot);
                if g > best_gain + 1e-12 {
                    best = c;
                    best_gain = g;
                }
            }
            tot[best] += k[u];
            comm[u] = best;
            if best != own {
                moved = true;
            }
            for &c in &touched {
                link[c] = 0.0;
                is_touched[c] = false;
            }
            touched.clear();
        }
        if !moved {
            break;
        }
        any_move = true;
    }
    (comm, any_move)
}

fn aggregate(level: &Level, comm: &[usize], groups: usize) -> Level {
    let mut loops = vec![0.0; groups];
    let mut between: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for (u, nbrs) in level.adj.iter().enumerate() {
        loops[comm[u]] += level.loops[u];
        for &(v, w) in nbrs {
            if v <= u {
                continue;
            }
            let (a, b) = (comm[u], comm[v]);
            if a == b {
                loops[a] += w;
            } else {
                *between.entry((a.min(b), a.max(b))).or_default() += w;
            }
        }
    }
    let mut adj = vec![Vec::new(); groups];
    for ((a, b), w) in between {
        adj[a].push((b, w));
        adj[b].push((a, w));
    }
    for list in &mut adj {
        list.sort_by_key(|&(v, _)| v);
    }
    Level { adj, loops }
}

/// Louvain community detection on a weighted edge list over nodes `0..n`.
/// Nodes are visited in index order, so the result is deterministic.
pub fn louvain_weighted(n: usize, edges: &[(usize, usize, f64)], resolution: f64) -> Partition {
    let mut acc: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut loops = vec![0.0; n];
    for &(u, v, w) in edges {
        if u == v {
            loops[u] += w;
        } else {
            *acc.entry((u.min(v), u.max(v))).or_default() += w;
        }
    }
    let mut adj = vec![Vec::new(); n];
    for (&(u, v), &w) in &acc {
        adj[u].push((v, w));
        adj[v].push((u, w));
    }
    for list in &mut adj {
        list.sort_by_key(|&(v, _)| v);
    }
    let mut level = Level { adj, loops };
    let mut membership: Vec<usize> = (0..n).collect();
    let mut levels = 0;
    if edges.iter().any(|e| e.2 > 0.0) {
        loop {
            let (mut comm, moved) = local_moving(&level, resolution);
            if !moved {
                break;
            }
            levels += 1;
            let groups = renumber(&mut comm);
            for m in membership.iter_mut() {
                *m = comm[*m];
            }
            level = aggregate(&level, &comm, groups);
        }
    }
    renumber(&mut membership);
    let q = modularity(n, edges, &membership, resolution);
    Partition {
        communities: membership,
        modularity: q,
        resolution,
        levels,
    }
}

/// Louvain partition of a co-occurrence network using its edge weights.
pub fn louvain(net: &SemanticNetwork, resolution: f64) -> Partition {
    let edges: Vec<(usize, usize, f64)> = net
        .edges()
        .iter()
        .map(|e| (e.u, e.v, e.weight as f64))
        .collect();
    louvain_weighted(net.node_count(), &edges, resolution)
}
