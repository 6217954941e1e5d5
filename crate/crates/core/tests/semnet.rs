use std::collections::VecDeque;

use nalgebra::DMatrix;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shibboleth::semnet::{
    centralities, er_null, gnm_random, louvain, small_world_from_graph, watts_strogatz, Edge,
    Graph, SemanticNetwork,
};

const KARATE: [(usize, usize); 78] = [
    (0, 1),
    (0, 2),
    (0, 3),
    (0, 4),
    (0, 5),
    (0, 6),
    (0, 7),
    (0, 8),
    (0, 10),
    (0, 11),
    (0, 12),
    (0, 13),
    (0, 17),
    (0, 19),
    (0, 21),
    (0, 31),
    (1, 2),
    (1, 3),
    (1, 7),
    (1, 13),
    (1, 17),
    (1, 19),
    (1, 21),
    (1, 30),
    (2, 3),
    (2, 7),
    (2, 8),
    (2, 9),
    (2, 13),
    (2, 27),
    (2, 28),
    (2, 32),
    (3, 7),
    (3, 12),
    (3, 13),
    (4, 6),
    (4, 10),
    (5, 6),
    (5, 10),
    (5, 16),
    (6, 16),
    (8, 30),
    (8, 32),
    (8, 33),
    (9, 33),
    (13, 33),
    (14, 32),
    (14, 33),
    (15, 32),
    (15, 33),
    (18, 32),
    (18, 33),
    (19, 33),
    (20, 32),
    (20, 33),
    (22, 32),
    (22, 33),
    (23, 25),
    (23, 27),
    (23, 29),
    (23, 32),
    (23, 33),
    (24, 25),
    (24, 27),
    (24, 31),
    (25, 31),
    (26, 29),
    (26, 33),
    (27, 33),
    (28, 31),
    (28, 33),
    (29, 32),
    (29, 33),
    (30, 32),
    (30, 33),
    (31, 32),
    (31, 33),
    (32, 33),
];

// networkx 3.x reference values
const KARATE_TRANSITIVITY: f64 = 0.2556818181818182;
const KARATE_AVG_CLUSTERING: f64 = 0.5706384782076823;
const KARATE_PATH_LENGTH: f64 = 2.408199643493761;
const KARATE_TRIANGLES: [u64; 34] = [
    18, 12, 11, 10, 2, 3, 3, 6, 5, 0, 2, 0, 1, 6, 1, 1, 1, 1, 1, 1, 1, 1, 1, 4, 1, 1, 1, 1, 1, 4,
    3, 3, 13, 15,
];
const KARATE_GREEDY_MODULARITY: f64 = 0.41096493693896297;

fn karate_net() -> SemanticNetwork {
    let nodes = (0..34).map(|i| format!("n{i:02}")).collect();
    let edges = KARATE
        .iter()
        .map(|&(u, v)| Edge { u, v, weight: 1 })
        .collect();
    SemanticNetwork::new(nodes, edges).unwrap()
}

fn adjacency(g: &Graph) -> Vec<Vec<bool>> {
    let n = g.node_count();
    let mut a = vec![vec![false; n]; n];
    for (u, v) in g.edges() {
        a[u][v] = true;
        a[v][u] = true;
    }
    a
}

/// Triangles per node and connected triples, by enumerating every triple.
fn brute_triangles(a: &[Vec<bool>]) -> (Vec<u64>, f64, f64) {
    let n = a.len();
    let mut tri = vec![0u64; n];
    let mut closed = 0.0;
    let mut triples = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let e = [a[i][j], a[j][k], a[i][k]];
                let c = e.iter().filter(|&&x| x).count();
                if c == 3 {
                    tri[i] += 1;
                    tri[j] += 1;
                    tri[k] += 1;
                    closed += 3.0;
                    triples += 3.0;
                } else if c == 2 {
                    triples += 1.0;
                }
            }
        }
    }
    (tri, closed, triples)
}

fn brute_path_length(a: &[Vec<bool>]) -> f64 {
    let n = a.len();
    let mut total = 0.0;
    for s in 0..n {
        let mut dist = vec![usize::MAX; n];
        dist[s] = 0;
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            for v in 0..n {
                if a[u][v] && dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    q.push_back(v);
                }
            }
        }
        total += dist.iter().map(|&d| d as f64).sum::<f64>();
    }
    total / (n * (n - 1)) as f64
}

/// Leading eigenvector of the adjacency matrix, max-normalised.
fn dense_eigencentrality(a: &[Vec<bool>]) -> Vec<f64> {
    let n = a.len();
    let m = DMatrix::from_fn(n, n, |i, j| if a[i][j] { 1.0 } else { 0.0 });
    let eig = m.symmetric_eigen();
    let top = eig.eigenvalues.imax();
    let v: Vec<f64> = eig
        .eigenvectors
        .column(top)
        .iter()
        .map(|x: &f64| x.abs())
        .collect();
    let max = v.iter().cloned().fold(0.0, f64::max);
    v.iter().map(|x| x / max).collect()
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300) || (a - b).abs() <= 1e-14
}

#[test]
fn karate_club_matches_reference() {
    let net = karate_net();
    let g = net.graph();
    assert!((g.transitivity() - KARATE_TRANSITIVITY).abs() < 1e-12);
    assert!((g.average_clustering() - KARATE_AVG_CLUSTERING).abs() < 1e-12);
    assert!((g.mean_shortest_path().unwrap() - KARATE_PATH_LENGTH).abs() < 1e-12);
    assert_eq!(g.triangles(), KARATE_TRIANGLES);

    let cents = centralities(&net).unwrap();
    let dense = dense_eigencentrality(&adjacency(&g));
    for (c, d) in cents.iter().zip(&dense) {
        assert!(
            rel_close(c.eigencentrality, *d, 1e-8),
            "{}: {} vs {d}",
            c.node,
            c.eigencentrality
        );
    }
    assert_eq!(cents[33].eigencentrality, 1.0);
    assert_eq!(cents[0].degree, 16);
}

#[test]
fn karate_louvain_beats_greedy_baseline() {
    let p = louvain(&karate_net(), 1.0);
    assert!(p.modularity >= 0.40, "Q = {}", p.modularity);
    assert!(
        p.modularity >= KARATE_GREEDY_MODULARITY - 1e-12,
        "Q = {}",
        p.modularity
    );
    assert!((2..=6).contains(&p.community_count()));
}

fn random_connected_graph(rng: &mut ChaCha8Rng) -> Graph {
    loop {
        let n = rng.random_range(5..=60usize);
        let p = rng.random_range(0.05..0.5);
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if rng.random::<f64>() < p {
                    edges.push((i, j));
                }
            }
        }
        let g = Graph::from_edges(n, edges);
        if g.is_connected() {
            return g;
        }
    }
}

#[test]
fn random_graphs_match_dense_oracles() {
    let mut rng = ChaCha8Rng::seed_from_u64(2019);
    for _ in 0..25 {
        let g = random_connected_graph(&mut rng);
        let a = adjacency(&g);
        let n = g.node_count();
        for (u, row) in a.iter().enumerate() {
            assert_eq!(g.degree(u), row.iter().filter(|&&x| x).count());
        }
        let (tri, closed, triples) = brute_triangles(&a);
        assert_eq!(g.triangles(), tri);
        let expected_c = if triples == 0.0 {
            0.0
        } else {
            closed / triples
        };
        assert!(rel_close(g.transitivity(), expected_c, 1e-8));
        assert!(rel_close(
            g.mean_shortest_path().unwrap(),
            brute_path_length(&a),
            1e-8
        ));
        let eig = g.eigenvector_centrality(1e-12, 100_000).unwrap();
        for (x, y) in eig.iter().zip(dense_eigencentrality(&a)) {
            assert!(rel_close(*x, y, 1e-8), "n={n}: {x} vs {y}");
        }
    }
}

#[test]
fn er_null_transitivity_matches_density() {
    let (n, m) = (200usize, 1000usize);
    let stats = er_null(n, m, 100, 7).unwrap();
    let expected = 2.0 * m as f64 / (n * (n - 1)) as f64;
    let se = stats.c_std / (stats.samples as f64).sqrt();
    assert!(
        (stats.c_mean - expected).abs() <= 3.0 * se,
        "mean {} expected {expected} se {se}",
        stats.c_mean
    );
}

#[test]
fn small_world_separates_lattices_from_random_graphs() {
    let (n, k) = (300, 10);
    let m = n * k / 2;
    let null = er_null(n, m, 20, 11).unwrap();
    let ws = watts_strogatz(n, k, 0.1, 5).unwrap();
    let s = small_world_from_graph(&ws, &null, 10.0).unwrap();
    assert!(s.s_delta > 3.0, "{s:?}");
    let er = gnm_random(n, m, 99).unwrap().giant_component();
    let r = small_world_from_graph(&er, &null, 10.0).unwrap();
    assert!((0.5..1.5).contains(&r.s_delta), "{r:?}");
    assert!(!r.small_world);
}
