use knownet::genmodel::{generate, link_type_stats, synthetic_seed_graph, GenParams, LinkKind, DEFAULT_VECTOR_DENSITY};
use knownet::topo::is_acyclic;
use knownet::Dag;

fn seed_graph() -> Dag {
    synthetic_seed_graph(100, DEFAULT_VECTOR_DENSITY, 0).unwrap()
}

fn mean_links(p: f64, q: f64, seeds: u64) -> f64 {
    let seed = seed_graph();
    (0..seeds)
        .map(|s| generate(&GenParams::new(p, 0.3, 1.0, q, 3000, s), &seed).unwrap().dag.edge_count() as f64)
        .sum::<f64>()
        / seeds as f64
}

#[test]
fn link_count_grows_with_copying() {
    let m: Vec<f64> = [0.0, 0.05, 0.15, 0.3].iter().map(|&q| mean_links(0.5, q, 4)).collect();
    assert!(m.windows(2).all(|w| w[0] < w[1]), "{m:?}");
}

/// Process A runs a geometric number of rounds with mean 1/p; a round that
/// draws an already-linked target adds nothing.
fn logical_mean(p: f64, w: f64, a: f64) -> f64 {
    let seed = seed_graph();
    let mut total = 0.0;
    for s in 0..4 {
        let g = generate(&GenParams::new(p, w, a, 0.1, 5000, s), &seed).unwrap();
        let st = link_type_stats(&g);
        total += st.logical_links as f64 / st.generated_nodes as f64;
    }
    total / 4.0
}

#[test]
fn logical_links_per_node_average_one_over_p() {
    for p in [0.2, 0.5, 0.8] {
        // near-uniform attachment over a growing world makes repeats rare;
        // the standard error of the mean is below 0.02
        let mean = logical_mean(p, 0.0, 1e4);
        assert!((mean - 1.0 / p).abs() < 0.08, "p={p} mean={mean}");
        let concentrated = logical_mean(p, 0.6, 0.5);
        assert!(concentrated < 1.0 / p + 0.06 && concentrated > 1.0, "p={p} mean={concentrated}");
    }
}

#[test]
fn generated_graphs_are_well_formed() {
    let seed = seed_graph();
    for (s, q) in [(0, 0.0), (1, 0.1), (2, 0.5)] {
        let g = generate(&GenParams::new(0.4, 0.5, 2.0, q, 2000, s), &seed).unwrap();
        assert!(is_acyclic(&g.dag));
        assert_eq!(g.dag.node_count(), 2000);
        assert_eq!(g.kinds.len(), g.dag.edge_count());
        let st = link_type_stats(&g);
        assert_eq!(st.generated_nodes, 1900);
        assert_eq!(st.generated_links, st.logical_links + st.societal_links);
        assert_eq!(st.generated_links + seed.edge_count(), g.dag.edge_count());
        for (src, dst, kind, birth) in g.labeled_edges() {
            assert!(dst < src, "edges point to older nodes");
            if src.index() < 100 {
                assert_eq!((kind, birth), (LinkKind::Logical, 0));
            } else {
                assert_eq!(birth as usize, src.index() - 99);
            }
        }
        if q == 0.0 {
            assert_eq!(st.societal_links, 0);
        }
        // every new node makes at least one logical link
        assert_eq!(st.logical_out_histogram.first().copied().unwrap_or(0), 0);
    }
}

fn out_degree_survival(q: f64, k: usize) -> f64 {
    let g = generate(&GenParams::new(0.65, 0.7, 0.5, q, 27_400, 0), &seed_graph()).unwrap();
    let outs = g.dag.out_degrees();
    outs.iter().filter(|&&d| d >= k).count() as f64 / outs.len() as f64
}

#[test]
fn copying_fattens_out_degree_tail() {
    // without copying, out-degree ≥ 50 needs ~50 consecutive logical rounds
    let (plain, copied) = (out_degree_survival(0.0, 50), out_degree_survival(0.125, 50));
    assert!(copied >= 10.0 * plain.max(1e-6), "S(50): q=0 {plain:e}, q=0.125 {copied:e}");
}
