//! Randomized oracle suites. Each function panics on the first mismatch.

use std::collections::{BTreeMap, BTreeSet};

use knownet::disruption::{disruption_by_date, disruption_full, disruption_windowed, reference_metrics};
use knownet::metrics::{clustering_directed, clustering_undirected};
use knownet::nullmodel::randomize_dag;
use knownet::topo::{is_acyclic, topological_generations};
use knownet::{Dag, Digraph, NodeDate, NodeId};
use rand::Rng;

use super::{adjacency, oracle_generations, random_dag, random_digraph, rng};

// ---------------------------------------------------------------------------
// generations

/// Every DAG on `n` nodes, labelled so that edges run from higher to lower index.
fn for_each_dag(n: usize, mut f: impl FnMut(&Dag)) {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|s| (0..s).map(move |t| (s, t))).collect();
    for mask in 0u32..(1 << pairs.len()) {
        let edges = pairs.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, &e)| e);
        let (g, _) = Dag::from_edges(n, edges).unwrap();
        f(&g);
    }
}

fn check_generations(g: &Dag) {
    let gen = topological_generations(g).unwrap();
    let want = oracle_generations(g);
    assert_eq!(gen.as_slice(), want.as_slice(), "edges {:?}", g.edges().collect::<Vec<_>>());
    let layers = gen.layer_sizes();
    assert_eq!(layers.iter().sum::<usize>(), g.node_count());
    assert_eq!(gen.generation_count() as usize, layers.len());
    assert_eq!(layers.len() as u32, want.iter().max().map_or(0, |m| m + 1));
}

/// Returns the number of graphs checked.
pub fn generations_exhaustive(max_n: usize) -> usize {
    let mut count = 0usize;
    for n in 1..=max_n {
        for_each_dag(n, |g| {
            check_generations(g);
            count += 1;
        });
    }
    count
}

pub fn generations_sampled(n: usize, samples: usize, seed: u64) {
    let mut r = rng(seed);
    for k in 0..samples {
        let p = [0.1, 0.3, 0.5, 0.8][k % 4];
        let g = loop {
            let g = random_dag(&mut r, n, p);
            if g.node_count() == n {
                break g;
            }
        };
        check_generations(&g);
    }
}

// ---------------------------------------------------------------------------
// disruption

/// Disruption of `i` from explicit citer sets; `window = None` keeps every generation.
fn disruption_oracle(a: &[Vec<bool>], gen: &[u32], i: usize, window: Option<u32>) -> (Option<f64>, usize) {
    let n = a.len();
    let keep = |k: usize| gen[k] > gen[i] && window.map_or(true, |w| gen[k] <= gen[i] + w);
    let p: BTreeSet<usize> = (0..n).filter(|&k| a[k][i] && keep(k)).collect();
    let p_tilde: BTreeSet<usize> = (0..n)
        .filter(|&k| keep(k) && (0..n).any(|j| a[i][j] && a[k][j]))
        .collect();
    set_disruption(&p, &p_tilde)
}

fn set_disruption(p: &BTreeSet<usize>, p_tilde: &BTreeSet<usize>) -> (Option<f64>, usize) {
    let union = p.union(p_tilde).count();
    let both = p.intersection(p_tilde).count();
    let only = p.difference(p_tilde).count();
    let d = (union > 0).then(|| (only as f64 - both as f64) / union as f64);
    (d, p.len())
}

/// Full and windowed generation-mode disruption on `cases` random DAGs.
pub fn disruption_generations(cases: usize, max_n: usize, seed: u64) {
    let mut r = rng(seed);
    for case in 0..cases {
        let p = r.gen_range(0.1..0.6);
        let g = random_dag(&mut r, max_n, p);
        let gen = topological_generations(&g).unwrap();
        let want_gen = oracle_generations(&g);
        let a = adjacency(&g);
        let full = disruption_full(&g, &gen).unwrap();
        for v in 0..g.node_count() {
            assert_eq!(full[v].node, NodeId::from(v));
            let want = disruption_oracle(&a, &want_gen, v, None);
            assert_eq!((full[v].disruption, full[v].citations), want, "case {case} node {v}");
        }
        for w in [1, 2, 3, 10] {
            let rec = disruption_windowed(&g, &gen, w).unwrap();
            for v in 0..g.node_count() {
                let want = disruption_oracle(&a, &want_gen, v, Some(w));
                assert_eq!((rec[v].disruption, rec[v].citations), want, "case {case} node {v} window {w}");
            }
        }
    }
}

/// (year, month, day) with zeros for missing parts, plus the precision level.
fn date_key(d: &NodeDate) -> ([i32; 3], usize) {
    match (d.month, d.day) {
        (None, _) => ([d.year, 0, 0], 1),
        (Some(m), None) => ([d.year, i32::from(m), 0], 2),
        (Some(m), Some(day)) => ([d.year, i32::from(m), i32::from(day)], 3),
    }
}

fn later(a: &NodeDate, b: &NodeDate) -> bool {
    let ((ka, pa), (kb, pb)) = (date_key(a), date_key(b));
    let p = pa.min(pb);
    ka[..p] > kb[..p]
}

/// Date-mode disruption with mixed date precision on `cases` random DAGs.
pub fn disruption_dates(cases: usize, max_n: usize, seed: u64) {
    let mut r = rng(seed);
    for case in 0..cases {
        let p = r.gen_range(0.1..0.6);
        let mut g = random_dag(&mut r, max_n, p);
        let n = g.node_count();
        let dates: Vec<NodeDate> = (0..n)
            .map(|_| {
                let y = r.gen_range(2000..2006);
                match r.gen_range(0..3) {
                    0 => NodeDate::year(y),
                    1 => NodeDate {
                        year: y,
                        month: Some(r.gen_range(1..=3)),
                        day: None,
                    },
                    _ => NodeDate::ymd(y, r.gen_range(1..=3), r.gen_range(1..=2)),
                }
            })
            .collect();
        for (v, d) in dates.iter().enumerate() {
            g.meta_mut().dates[v] = Some(*d);
        }
        let a = adjacency(&g);
        for window in [None, Some(0), Some(2)] {
            let rec = disruption_by_date(&g, window).unwrap();
            for i in 0..n {
                let keep = |k: usize| window.map_or(true, |w| dates[k].year <= dates[i].year + w as i32);
                let p: BTreeSet<usize> = (0..n).filter(|&k| a[k][i] && keep(k)).collect();
                let p_tilde: BTreeSet<usize> = (0..n)
                    .filter(|&k| keep(k) && later(&dates[k], &dates[i]) && (0..n).any(|j| a[i][j] && a[k][j]))
                    .collect();
                let want = set_disruption(&p, &p_tilde);
                assert_eq!((rec[i].disruption, rec[i].citations), want, "case {case} node {i} {window:?}");
            }
        }
    }
}

pub fn reference_metrics_definition(cases: usize, max_n: usize, seed: u64) {
    let mut r = rng(seed);
    for _ in 0..cases {
        let p = r.gen_range(0.1..0.6);
        let g = random_dag(&mut r, max_n, p);
        let gen = topological_generations(&g).unwrap();
        let want_gen = oracle_generations(&g);
        let a = adjacency(&g);
        let n = a.len();
        let rec = reference_metrics(&g, &gen).unwrap();
        let mut it = rec.iter();
        for i in 0..n {
            let refs: Vec<usize> = (0..n).filter(|&j| a[i][j]).collect();
            if refs.is_empty() {
                continue;
            }
            let got = it.next().expect("record for every citing node");
            assert_eq!(got.node, NodeId::from(i));
            let cites = |j: usize| (0..n).filter(|&k| a[k][j]).count() as f64;
            let pop = refs.iter().map(|&j| cites(j)).sum::<f64>() / refs.len() as f64;
            let age = refs.iter().map(|&j| f64::from(want_gen[i] - want_gen[j])).sum::<f64>() / refs.len() as f64;
            assert!((got.reference_popularity - pop).abs() < 1e-12);
            assert!((got.reference_age - age).abs() < 1e-12);
        }
        assert!(it.next().is_none());
    }
}

// ---------------------------------------------------------------------------
// clustering

fn cube_diagonal(w: &[Vec<f64>]) -> Vec<f64> {
    let n = w.len();
    let mul = |x: &[Vec<f64>], y: &[Vec<f64>]| -> Vec<Vec<f64>> {
        (0..n)
            .map(|i| (0..n).map(|j| (0..n).map(|k| x[i][k] * y[k][j]).sum()).collect())
            .collect()
    };
    let w3 = mul(&mul(w, w), w);
    (0..n).map(|i| w3[i][i]).collect()
}

/// Directed clustering against [(A+Aᵀ)³]_ii / 2(d(d−1) − 2d↔).
pub fn clustering_dense_matrix(cases: usize, max_n: usize, seed: u64) {
    let mut r = rng(seed);
    for case in 0..cases {
        let p = r.gen_range(0.05..0.7);
        let g = random_digraph(&mut r, max_n, p);
        let a = adjacency(&g);
        let n = a.len();
        let w: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| f64::from(u8::from(a[i][j]) + u8::from(a[j][i]))).collect())
            .collect();
        let diag = cube_diagonal(&w);
        let got = clustering_directed(&g);
        let mut per_node = Vec::new();
        for i in 0..n {
            let d_out = (0..n).filter(|&j| a[i][j]).count() as f64;
            let d_in = (0..n).filter(|&j| a[j][i]).count() as f64;
            let recip = (0..n).filter(|&j| a[i][j] && a[j][i]).count() as f64;
            let d = d_out + d_in;
            let denom = 2.0 * (d * (d - 1.0) - 2.0 * recip);
            per_node.push(if denom > 0.0 { diag[i] / denom } else { 0.0 });
        }
        for i in 0..n {
            assert!((got.per_node[i] - per_node[i]).abs() < 1e-12, "case {case} node {i}");
        }
        let avg = per_node.iter().sum::<f64>() / n as f64;
        assert!((got.average - avg).abs() < 1e-12, "case {case}");
    }
}

pub fn clustering_triangles(cases: usize, max_n: usize, seed: u64) {
    let mut r = rng(seed);
    for case in 0..cases {
        let p = r.gen_range(0.05..0.7);
        let g = random_digraph(&mut r, max_n, p);
        let a = adjacency(&g);
        let n = a.len();
        let adj = |i: usize, j: usize| a[i][j] || a[j][i];
        let (mut closed, mut triples) = (0.0, 0.0);
        let got = clustering_undirected(&g);
        for i in 0..n {
            let nb: Vec<usize> = (0..n).filter(|&j| j != i && adj(i, j)).collect();
            let k = nb.len() as f64;
            let mut t = 0.0;
            for x in 0..nb.len() {
                for y in x + 1..nb.len() {
                    if adj(nb[x], nb[y]) {
                        t += 1.0;
                    }
                }
            }
            let pairs = k * (k - 1.0) / 2.0;
            let c = if pairs > 0.0 { t / pairs } else { 0.0 };
            assert!((got.per_node[i] - c).abs() < 1e-12, "case {case} node {i}");
            closed += t;
            triples += pairs;
        }
        let global = if triples > 0.0 { closed / triples } else { 0.0 };
        assert!((got.global - global).abs() < 1e-12, "case {case}");
    }
}

// ---------------------------------------------------------------------------
// null model

pub fn edge_set(g: &Digraph) -> BTreeSet<(u32, u32)> {
    g.edges().map(|(s, t)| (s.0, t.0)).collect()
}

/// Realization `case` of random DAG `case` keeps degrees, acyclicity and simplicity.
pub fn null_preserves_degrees(cases: u64, max_n: usize, seed: u64) {
    let mut r = rng(seed);
    for case in 0..cases {
        let p = r.gen_range(0.02..0.4);
        let g = random_dag(&mut r, max_n, p);
        let h = randomize_dag(&g, case).unwrap();
        assert_eq!(h.node_count(), g.node_count());
        assert_eq!(h.edge_count(), g.edge_count(), "case {case}");
        assert_eq!(h.out_degrees(), g.out_degrees(), "case {case}");
        assert_eq!(h.in_degrees(), g.in_degrees(), "case {case}");
        assert!(is_acyclic(&h));
        assert!(h.edges().all(|(s, t)| s != t));
        assert_eq!(edge_set(&h).len(), h.edge_count());
    }
}

/// DAGs with the same degree sequences as `g` that share a topological order
/// with it, i.e. whose union with `g` is acyclic. These are the graphs the
/// construction can reach, since it wires along a topological sort of `g`.
pub fn reachable_dags(g: &Dag) -> BTreeSet<BTreeSet<(u32, u32)>> {
    let (n, out, inn) = (g.node_count(), g.out_degrees(), g.in_degrees());
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|s| (0..n).filter(move |&t| t != s).map(move |t| (s, t))).collect();
    let m: usize = out.iter().sum();
    let mut found = BTreeSet::new();
    for mask in 0u32..(1 << pairs.len()) {
        if mask.count_ones() as usize != m {
            continue;
        }
        let edges: Vec<(usize, usize)> = pairs.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, &e)| e).collect();
        let mut o = vec![0; n];
        let mut i = vec![0; n];
        for &(s, t) in &edges {
            o[s] += 1;
            i[t] += 1;
        }
        if o != out || i != inn {
            continue;
        }
        let union = edges.iter().copied().chain(g.edges().map(|(s, t)| (s.index(), t.index())));
        if Dag::from_edges(n, union).is_ok() {
            found.insert(edges.iter().map(|&(s, t)| (s as u32, t as u32)).collect());
        }
    }
    found
}

/// Every realization of a small DAG lies in its reachable set and every
/// member of that set shows up.
pub fn null_covers_reachable_set(realizations: u64) {
    let (g, _) = Dag::from_edges(5, [(1, 0), (2, 0), (2, 1), (3, 1), (4, 2), (4, 3)]).unwrap();
    let targets = reachable_dags(&g);
    assert!(targets.len() > 1);
    let mut seen: BTreeMap<BTreeSet<(u32, u32)>, usize> = BTreeMap::new();
    for seed in 0..realizations {
        *seen.entry(edge_set(&randomize_dag(&g, seed).unwrap())).or_default() += 1;
    }
    for got in seen.keys() {
        assert!(targets.contains(got), "{got:?} is not reachable");
    }
    let missing: Vec<_> = targets.iter().filter(|t| !seen.contains_key(*t)).collect();
    assert!(missing.is_empty(), "never produced: {missing:?}; counts {seen:?}");
}
