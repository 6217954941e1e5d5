use std::collections::VecDeque;

use super::SemnetError;

/// Simple undirected graph on nodes `0..n` with sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<u32>>,
}

impl Graph {
    /// Builds from an edge list. Self-loops and repeated edges are ignored.
    ///
    /// Panics if an endpoint is `>= n`.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            assert!(u < n && v < n, "edge ({u}, {v}) out of range for {n} nodes");
            if u != v {
                adj[u].push(v as u32);
                adj[v].push(u as u32);
            }
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        Graph { adj }
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adj[u].len()
    }

    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[u].iter().map(|&v| v as usize)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&(v as u32)).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.node_count())
            .flat_map(|u| {
                self.neighbors(u)
                    .filter(move |&v| v > u)
                    .map(move |v| (u, v))
            })
            .collect()
    }

    /// Connected components, each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.node_count();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        let mut queue = VecDeque::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            queue.push_back(s);
            let mut comp = Vec::new();
            while let Some(u) = queue.pop_front() {
                comp.push(u);
                for v in self.neighbors(u) {
                    if !seen[v] {
                        seen[v] = true;
                        queue.push_back(v);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.node_count() > 0 && self.components().len() == 1
    }

    /// Subgraph induced by `nodes`, relabelled `0..nodes.len()` in the given order.
    pub fn induced(&self, nodes: &[usize]) -> Graph {
        let mut map = vec![usize::MAX; self.node_count()];
        for (i, &u) in nodes.iter().enumerate() {
            map[u] = i;
        }
        let edges = nodes.iter().enumerate().flat_map(|(i, &u)| {
            let map = &map;
            self.neighbors(u)
                .filter(move |&v| map[v] != usize::MAX && map[v] > i)
                .map(move |v| (i, map[v]))
        });
        Graph::from_edges(nodes.len(), edges.collect::<Vec<_>>())
    }

    /// Largest component (ties: smallest first member) as an induced subgraph.
    pub fn giant_component(&self) -> Graph {
        let comps = self.components();
        match comps
            .iter()
            .max_by(|a, b| a.len().cmp(&b.len()).then(b[0].cmp(&a[0])))
        {
            Some(c) => self.induced(c),
            None => self.clone(),
        }
    }

    /// Number of triangles through each node.
    pub fn triangles(&self) -> Vec<u64> {
        let n = self.node_count();
        let mut tri = vec![0u64; n];
        let mut mark = vec![false; n];
        for u in 0..n {
            for v in self.neighbors(u) {
                mark[v] = true;
            }
            for v in self.neighbors(u).filter(|&v| v > u) {
                for w in self.neighbors(v).filter(|&w| w > v) {
                    if mark[w] {
                        tri[u] += 1;
                        tri[v] += 1;
                        tri[w] += 1;
                    }
                }
            }
            for v in self.neighbors(u) {
                mark[v] = false;
            }
        }
        tri
    }

    /// Global clustering: 3 x triangles / connected triples (0 without triples).
    pub fn transitivity(&self) -> f64 {
        let closed: u64 = self.triangles().iter().sum();
        let triples: u64 = self
            .adj
            .iter()
            .map(|a| {
                let d = a.len() as u64;
                d * d.saturating_sub(1) / 2
            })
            .sum();
        if triples == 0 {
            0.0
        } else {
            closed as f64 / triples as f64
        }
    }

    /// Mean of local clustering coefficients; nodes of degree < 2 count as 0.
    pub fn average_clustering(&self) -> f64 {
        let n = self.node_count();
        if n == 0 {
            return 0.0;
        }
        let tri = self.triangles();
        let total: f64 = (0..n)
            .map(|u| {
                let d = self.degree(u) as f64;
                if d < 2.0 {
                    0.0
                } else {
                    2.0 * tri[u] as f64 / (d * (d - 1.0))
                }
            })
            .sum();
        total / n as f64
    }

    fn bfs_distance_sum(
        &self,
        source: usize,
        dist: &mut [u32],
        queue: &mut Vec<u32>,
    ) -> (u64, usize) {
        dist.iter_mut().for_each(|d| *d = u32::MAX);
        queue.clear();
        dist[source] = 0;
        queue.push(source as u32);
        let mut head = 0;
        let mut sum = 0u64;
        while head < queue.len() {
            let u = queue[head] as usize;
            head += 1;
            let du = dist[u];
            sum += du as u64;
            for &v in &self.adj[u] {
                if dist[v as usize] == u32::MAX {
                    dist[v as usize] = du + 1;
                    queue.push(v);
                }
            }
        }
        (sum, queue.len())
    }

    /// Mean unweighted shortest-path length over all node pairs.
    /// A single node has mean path length 0.
    pub fn mean_shortest_path(&self) -> Result<f64, SemnetError> {
        let n = self.node_count();
        if n == 0 {
            return Err(SemnetError::EmptyNetwork);
        }
        if n == 1 {
            return Ok(0.0);
        }
        let mut dist = vec![u32::MAX; n];
        let mut queue = Vec::with_capacity(n);
        let mut total = 0u64;
        for s in 0..n {
            let (sum, reached) = self.bfs_distance_sum(s, &mut dist, &mut queue);
            if reached != n {
                return Err(SemnetError::Disconnected);
            }
            total += sum;
        }
        Ok(total as f64 / (n as f64 * (n as f64 - 1.0)))
    }

    /// Principal eigenvector of the adjacency matrix, scaled so its largest
    /// entry is 1. Power iteration on `A + I` from the all-ones vector (the
    /// shift keeps bipartite graphs from oscillating), stopping when the
    /// max-norm change drops below `tolerance`.
    pub fn eigenvector_centrality(
        &self,
        tolerance: f64,
        max_iter: usize,
    ) -> Result<Vec<f64>, SemnetError> {
        let n = self.node_count();
        if n == 0 {
            return Err(SemnetError::EmptyNetwork);
        }
        let mut x = vec![1.0; n];
        let mut next = vec![0.0; n];
        for _ in 0..max_iter {
            for u in 0..n {
                next[u] = x[u] + self.adj[u].iter().map(|&v| x[v as usize]).sum::<f64>();
            }
            let max = next.iter().copied().fold(0.0, f64::max);
            next.iter_mut().for_each(|v| *v /= max);
            let change = x
                .iter()
                .zip(&next)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            std::mem::swap(&mut x, &mut next);
            if change < tolerance {
                return Ok(x);
            }
        }
        Err(SemnetError::NotConverged(max_iter))
    }
}
