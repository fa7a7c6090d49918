use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use edge_cover::corpus::{
    path, random_corpus, random_sparse, star, with_edge_order, RandomGraphParams,
};
use edge_cover::counter::{estimate_count, Accuracy};
use edge_cover::estimator::{estimate_marginal, Depth};
use edge_cover::graph::{parse_graph, render_graph, EdgeId, Endpoints, Graph, VertexId};
use edge_cover::oracle::{exact_count, exact_marginal, Oracle};

/// Up to 6 vertices and 10 edges. Pairs with equal ends become dangling
/// edges; `None` becomes a free edge.
fn multigraph() -> impl Strategy<Value = Graph> {
    (1usize..=6).prop_flat_map(|n| {
        prop::collection::vec(prop::option::weighted(0.9, (0..n, 0..n)), 1..=10).prop_map(
            move |specs| {
                let mut g = Graph::with_vertices(n);
                for spec in specs {
                    match spec {
                        None => {
                            g.add_free();
                        }
                        Some((a, b)) if a == b => {
                            g.add_dangling(VertexId(a)).unwrap();
                        }
                        Some((a, b)) => {
                            g.add_normal(VertexId(a), VertexId(b)).unwrap();
                        }
                    }
                }
                g
            },
        )
    })
}

proptest! {
    #[test]
    fn operators_commute(g in multigraph(), pick in any::<prop::sample::Index>()) {
        let edges = g.edge_ids();
        let e = edges[pick.index(edges.len())];
        for u in g.vertices() {
            let a = g.remove_edge(e).unwrap().detach_vertex(u).unwrap();
            let b = g.detach_vertex(u).unwrap().remove_edge(e).unwrap();
            prop_assert_eq!(a, b);
        }
        let vs: Vec<_> = g.vertices().collect();
        for &u in &vs {
            for &v in &vs {
                let a = g.detach_vertex(u).unwrap().detach_vertex(v);
                let b = g.detach_vertex(v).unwrap().detach_vertex(u);
                if u == v {
                    prop_assert!(a.is_err());
                } else {
                    prop_assert_eq!(a.unwrap(), b.unwrap());
                }
            }
        }
    }

    #[test]
    fn detaching_demotes_incident_edges(g in multigraph()) {
        for u in g.vertices() {
            let h = g.detach_vertex(u).unwrap();
            prop_assert!(!h.contains_vertex(u));
            prop_assert_eq!(h.edge_count(), g.edge_count());
            for (e, ends) in g.edges() {
                let after = h.endpoints(e).unwrap();
                if ends.contains(u) {
                    prop_assert_eq!(after.arity() + 1, ends.arity());
                } else {
                    prop_assert_eq!(after, ends);
                }
            }
            for v in h.vertices() {
                let inc = h.incident_edges(v).unwrap();
                prop_assert!(inc.windows(2).all(|w| w[0] < w[1]));
            }
        }
    }

    #[test]
    fn estimates_stay_in_range(g in multigraph(), depth in 0i64..8) {
        prop_assume!(!g.has_isolated_vertex());
        for e in g.edge_ids() {
            let p = estimate_marginal(&g, e, Depth(depth)).unwrap().value();
            prop_assert!((0.0..=0.5 + 1e-12).contains(&p), "{p}");
        }
    }

    #[test]
    fn text_format_round_trips(g in multigraph()) {
        let text = render_graph(&g);
        let parsed = parse_graph(&text).unwrap();
        prop_assert_eq!(&parsed.graph, &g);
        prop_assert_eq!(render_graph(&parsed.graph), text);
    }

    #[test]
    fn labels_survive_holes(g in multigraph(), pick in any::<prop::sample::Index>()) {
        let edges = g.edge_ids();
        let gone = edges[pick.index(edges.len())];
        let h = g.remove_edge(gone).unwrap();
        let parsed = parse_graph(&render_graph(&h)).unwrap();
        prop_assert_eq!(parsed.graph.edge_count(), h.edge_count());
        for (e, ends) in h.edges() {
            let id = parsed.edge_by_label(e.0 as u64).unwrap();
            let kind = parsed.graph.classify(id).unwrap();
            prop_assert_eq!(kind, ends.kind());
        }
        prop_assert!(parsed.edge_by_label(gone.0 as u64).is_none());
    }
}

/// Depth at which the computation tree of an acyclic graph is never cut.
fn full_depth(g: &Graph) -> Depth {
    let mut steps = 0;
    let mut reach = 1;
    while reach < g.max_degree() + 1 {
        reach *= 6;
        steps += 1;
    }
    Depth((g.edge_count() * steps.max(1) + 1) as i64)
}

fn assert_converged(g: &Graph) {
    let depth = full_depth(g);
    for e in g.edge_ids() {
        let exact = exact_marginal(g, e).unwrap().to_f64();
        let est = estimate_marginal(g, e, depth).unwrap().value();
        assert!((est - exact).abs() <= 1e-12, "edge {e}: {est} vs {exact}");
    }
}

#[test]
fn trees_converge_to_the_exact_marginal() {
    for n in 2..=12 {
        assert_converged(&path(n));
        assert_converged(&star(n));
    }
    for seed in 0..40 {
        let mut g = random_sparse(2 + seed as usize % 11, 0, seed);
        // Hang a dangling edge and a free edge off the tree as well.
        g.add_dangling(VertexId(seed as usize % g.vertex_count()))
            .unwrap();
        g.add_free();
        assert_converged(&g);
    }
}

#[test]
fn edge_order_changes_nothing_exact_and_stays_within_epsilon() {
    let params = RandomGraphParams {
        max_vertices: 7,
        max_edges: 14,
        ..RandomGraphParams::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let acc = Accuracy::new(0.1).unwrap();
    for g in random_corpus(5, 60, &params) {
        let exact = exact_count(&g).unwrap();
        let mut order = g.edge_ids();
        for _ in 0..3 {
            order.shuffle(&mut rng);
            let h = with_edge_order(&g, &order);
            assert_eq!(exact_count(&h).unwrap(), exact);
            let approx = estimate_count(&h, acc).unwrap().value;
            assert!((approx / exact.to_f64() - 1.0).abs() <= 0.1);
        }
    }
}

#[test]
fn profile_agrees_with_single_marginals() {
    let oracle = Oracle::default();
    for g in random_corpus(9, 40, &RandomGraphParams::default()) {
        let profile = oracle.profile(&g).unwrap();
        assert_eq!(profile.count(), oracle.count(&g).unwrap());
        for e in g.edge_ids() {
            assert_eq!(
                profile.marginal(e).unwrap(),
                oracle.marginal(&g, e).unwrap()
            );
        }
    }
}

#[test]
fn parallel_edges_are_kept_apart() {
    let mut g = Graph::with_vertices(2);
    let a = g.add_normal(VertexId(0), VertexId(1)).unwrap();
    let b = g.add_normal(VertexId(1), VertexId(0)).unwrap();
    assert_ne!(a, b);
    assert_eq!(
        g.endpoints(b).unwrap(),
        Endpoints::Normal(VertexId(0), VertexId(1))
    );
    assert_eq!(exact_count(&g).unwrap().0, 3u32.into());
    assert_eq!(exact_marginal(&g, EdgeId(0)).unwrap().to_string(), "1/3");
}
