//! Test-graph generators: exhaustive small connected graphs, seeded random
//! multigraphs with dangling and free edges, and the benchmark families.
//!
//! Random generation uses ChaCha8 so that a seed reproduces the same corpus on
//! every platform.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{EdgeId, Endpoints, Graph, VertexId};

/// Largest vertex count the exhaustive enumerator supports (upper-triangle
/// codes must fit in a `u64`).
pub const MAX_EXHAUSTIVE_VERTICES: usize = 11;

fn pair_index(n: usize, i: usize, j: usize) -> usize {
    // position of (i, j), i < j, in row-major upper-triangle order
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

/// Canonical code of a simple graph given as adjacency bitmasks: the largest
/// upper-triangle code over all relabelings that list vertices by a
/// degree-based invariant.
fn canonical_code(adj: &[u16]) -> u64 {
    let n = adj.len();
    let degree = |v: usize| adj[v].count_ones();
    let invariant = |v: usize| {
        let mut nbr: Vec<u32> = (0..n)
            .filter(|&w| adj[v] >> w & 1 == 1)
            .map(degree)
            .collect();
        nbr.sort_unstable();
        (degree(v), nbr)
    };
    let keys: Vec<_> = (0..n).map(invariant).collect();
    let mut slots: Vec<usize> = (0..n).collect();
    slots.sort_by(|&a, &b| keys[b].cmp(&keys[a]));
    // class[p] lists the vertices allowed at position p
    let class_of: Vec<Vec<usize>> = slots
        .iter()
        .map(|&s| (0..n).filter(|&v| keys[v] == keys[s]).collect())
        .collect();

    fn search(
        adj: &[u16],
        class_of: &[Vec<usize>],
        perm: &mut Vec<usize>,
        used: u16,
        best: &mut u64,
    ) {
        let n = adj.len();
        if perm.len() == n {
            let mut code = 0u64;
            for i in 0..n {
                for j in i + 1..n {
                    code <<= 1;
                    code |= (adj[perm[i]] >> perm[j] & 1) as u64;
                }
            }
            *best = (*best).max(code);
            return;
        }
        for &v in &class_of[perm.len()] {
            if used >> v & 1 == 0 {
                perm.push(v);
                search(adj, class_of, perm, used | 1 << v, best);
                perm.pop();
            }
        }
    }

    let mut best = 0;
    search(adj, &class_of, &mut Vec::with_capacity(n), 0, &mut best);
    best
}

fn decode(n: usize, code: u64) -> Vec<u16> {
    let total = n * (n - 1) / 2;
    let mut adj = vec![0u16; n];
    for i in 0..n {
        for j in i + 1..n {
            let bit = total - 1 - pair_index(n, i, j);
            if code >> bit & 1 == 1 {
                adj[i] |= 1 << j;
                adj[j] |= 1 << i;
            }
        }
    }
    adj
}

fn to_graph(adj: &[u16]) -> Graph {
    let n = adj.len();
    let mut edges = Vec::new();
    for (i, row) in adj.iter().enumerate() {
        for j in i + 1..n {
            if row >> j & 1 == 1 {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edges(n, &edges).expect("decoded graphs are simple")
}

/// Every connected simple graph with `2..=max_vertices` vertices and at most
/// `max_edges` edges, one per isomorphism class, ordered by vertex count and
/// then by canonical code.
pub fn connected_graphs(max_vertices: usize, max_edges: usize) -> Vec<Graph> {
    assert!(max_vertices <= MAX_EXHAUSTIVE_VERTICES);
    let mut out = Vec::new();
    // Connected graphs on n vertices, by canonical code.
    let mut level: Vec<(u64, Vec<u16>)> = vec![(0, vec![0])];
    for n in 2..=max_vertices {
        let mut next: HashMap<u64, Vec<u16>> = HashMap::new();
        for (_, parent) in &level {
            let parent_edges: u32 = parent.iter().map(|a| a.count_ones()).sum::<u32>() / 2;
            for subset in 1u16..1 << (n - 1) {
                if (parent_edges + subset.count_ones()) as usize > max_edges {
                    continue;
                }
                let mut adj = parent.clone();
                adj.push(subset);
                for (v, row) in adj.iter_mut().enumerate().take(n - 1) {
                    if subset >> v & 1 == 1 {
                        *row |= 1 << (n - 1);
                    }
                }
                let code = canonical_code(&adj);
                next.entry(code).or_insert_with(|| decode(n, code));
            }
        }
        let mut sorted: Vec<(u64, Vec<u16>)> = next.into_iter().collect();
        sorted.sort_by_key(|(code, _)| *code);
        out.extend(sorted.iter().map(|(_, adj)| to_graph(adj)));
        level = sorted;
    }
    out
}

/// Knobs of the random multigraph generator.
#[derive(Clone, Copy, Debug)]
pub struct RandomGraphParams {
    pub max_vertices: usize,
    pub max_edges: usize,
    /// Probability that a vertex pair gets a first normal edge.
    pub edge_probability: f64,
    /// Probability of each further parallel copy once a pair has an edge.
    pub parallel_probability: f64,
    /// Independent probability of a dangling edge at each vertex.
    pub dangling_probability: f64,
    pub max_free: usize,
}

impl Default for RandomGraphParams {
    fn default() -> Self {
        Self {
            max_vertices: 6,
            max_edges: 14,
            edge_probability: 0.45,
            parallel_probability: 0.2,
            dangling_probability: 0.3,
            max_free: 2,
        }
    }
}

#[derive(Clone, Copy)]
enum EdgeSpec {
    Normal(usize, usize),
    Dangling(usize),
    Free,
}

/// Erdős–Rényi-style multigraph: each pair gets an edge with
/// `edge_probability`, then further parallel copies with
/// `parallel_probability`; each vertex independently gets a dangling edge;
/// a uniform number of free edges is added. Any vertex still isolated gets a
/// dangling edge, so the result always has at least one cover. Edge ids are
/// shuffled. Draws are repeated until `1..=max_edges` edges result.
pub fn random_multigraph<R: Rng>(rng: &mut R, params: &RandomGraphParams) -> Graph {
    loop {
        let n = rng.gen_range(1..=params.max_vertices);
        let mut specs = Vec::new();
        let mut degree = vec![0usize; n];
        for i in 0..n {
            for j in i + 1..n {
                if rng.gen_bool(params.edge_probability) {
                    specs.push(EdgeSpec::Normal(i, j));
                    while rng.gen_bool(params.parallel_probability) {
                        specs.push(EdgeSpec::Normal(i, j));
                        degree[i] += 1;
                        degree[j] += 1;
                    }
                    degree[i] += 1;
                    degree[j] += 1;
                }
            }
        }
        for (v, d) in degree.iter_mut().enumerate() {
            if rng.gen_bool(params.dangling_probability) || *d == 0 {
                specs.push(EdgeSpec::Dangling(v));
                *d += 1;
            }
        }
        for _ in 0..rng.gen_range(0..=params.max_free) {
            specs.push(EdgeSpec::Free);
        }
        if specs.is_empty() || specs.len() > params.max_edges {
            continue;
        }
        specs.shuffle(rng);
        let mut g = Graph::with_vertices(n);
        for spec in specs {
            match spec {
                EdgeSpec::Normal(a, b) => g.add_normal(VertexId(a), VertexId(b)).map(|_| ()),
                EdgeSpec::Dangling(a) => g.add_dangling(VertexId(a)).map(|_| ()),
                EdgeSpec::Free => {
                    g.add_free();
                    Ok(())
                }
            }
            .expect("generated endpoints are valid");
        }
        return g;
    }
}

/// `count` random multigraphs from one seed.
pub fn random_corpus(seed: u64, count: usize, params: &RandomGraphParams) -> Vec<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| random_multigraph(&mut rng, params))
        .collect()
}

/// A copy of `g` whose edges are inserted in the given order, so that edge
/// `order[k]` receives id `k`. Vertices keep their ids; `order` must list
/// every live edge exactly once.
pub fn with_edge_order(g: &Graph, order: &[EdgeId]) -> Graph {
    assert_eq!(order.len(), g.edge_count());
    let mut h = Graph::with_vertices(g.vertex_slots());
    for &e in order {
        match g.endpoints(e).expect("order lists live edges") {
            Endpoints::Free => {
                h.add_free();
            }
            Endpoints::Dangling(u) => {
                h.add_dangling(u).unwrap();
            }
            Endpoints::Normal(a, b) => {
                h.add_normal(a, b).unwrap();
            }
        }
    }
    // Drop slots that were not live in `g`.
    let dead: Vec<VertexId> = (0..g.vertex_slots())
        .map(VertexId)
        .filter(|&v| !g.contains_vertex(v))
        .collect();
    for v in dead {
        h = h.detach_vertex(v).expect("slot exists in h");
    }
    h
}

pub fn cycle(n: usize) -> Graph {
    assert!(n >= 3, "cycles need at least 3 vertices");
    let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    Graph::from_edges(n, &edges).unwrap()
}

pub fn path(n: usize) -> Graph {
    let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    Graph::from_edges(n, &edges).unwrap()
}

/// `K_{1, n-1}` with the centre at vertex 0.
pub fn star(n: usize) -> Graph {
    let edges: Vec<_> = (1..n).map(|i| (0, i)).collect();
    Graph::from_edges(n, &edges).unwrap()
}

/// A random spanning tree on `n` vertices plus `extra` random chords.
/// Chords may duplicate tree edges.
pub fn random_sparse(n: usize, extra: usize, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::with_capacity(n + extra);
    for v in 1..n {
        edges.push((rng.gen_range(0..v), v));
    }
    if n >= 2 {
        for _ in 0..extra {
            let a = rng.gen_range(0..n);
            let mut b = rng.gen_range(0..n - 1);
            if b >= a {
                b += 1;
            }
            edges.push((a, b));
        }
    }
    Graph::from_edges(n, &edges).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn connected_graph_counts_match_known_sequence() {
        // Connected unlabeled graphs on n = 2..=7 vertices.
        let all = connected_graphs(7, 21);
        let mut by_n = [0usize; 8];
        for g in &all {
            by_n[g.vertex_count()] += 1;
        }
        assert_eq!(&by_n[2..], &[1, 2, 6, 21, 112, 853]);
    }

    #[test]
    fn edge_cap_is_respected() {
        let capped = connected_graphs(5, 5);
        assert!(capped.iter().all(|g| g.edge_count() <= 5));
        // Trees on 5 vertices (3) plus unicyclic ones (5) plus smaller graphs.
        let five: Vec<_> = capped.iter().filter(|g| g.vertex_count() == 5).collect();
        assert_eq!(five.len(), 3 + 5);
    }

    #[test]
    fn random_corpus_is_reproducible_and_bounded() {
        let params = RandomGraphParams::default();
        let a = random_corpus(7, 50, &params);
        let b = random_corpus(7, 50, &params);
        assert_eq!(a, b);
        for g in &a {
            assert!((1..=14).contains(&g.edge_count()));
            assert!(!g.has_isolated_vertex());
        }
        assert!(a
            .iter()
            .any(|g| g.edges().any(|(_, e)| e == Endpoints::Free)));
    }

    #[test]
    fn reordering_edges() {
        let g = cycle(4);
        let order = [EdgeId(3), EdgeId(0), EdgeId(2), EdgeId(1)];
        let h = with_edge_order(&g, &order);
        assert_eq!(
            h.endpoints(EdgeId(0)).unwrap(),
            g.endpoints(EdgeId(3)).unwrap()
        );
        assert_eq!(h.edge_count(), 4);

        let sparse = g.detach_vertex(VertexId(1)).unwrap();
        let h = with_edge_order(&sparse, &sparse.edge_ids());
        assert_eq!(h.vertex_count(), 3);
        assert_eq!(
            h.edges().map(|(_, e)| e).collect::<Vec<_>>(),
            sparse.edges().map(|(_, e)| e).collect::<Vec<_>>()
        );
    }

    #[test]
    fn families() {
        assert_eq!(cycle(5).edge_count(), 5);
        assert_eq!(path(5).edge_count(), 4);
        assert_eq!(star(5).degree(VertexId(0)).unwrap(), 4);
        let g = random_sparse(20, 5, 1);
        assert_eq!(g.edge_count(), 24);
        assert!(!g.has_isolated_vertex());
    }
}
