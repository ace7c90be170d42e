#![allow(dead_code)]

pub mod oracles;

use knownet::{Dag, Digraph};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random DAG on 1..=max_n nodes: edges point from later to earlier
/// positions of a shuffled order, each present with probability `p`.
pub fn random_dag(r: &mut impl Rng, max_n: usize, p: f64) -> Dag {
    let n = r.gen_range(1..=max_n);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(r);
    let mut edges = Vec::new();
    for a in 0..n {
        for b in 0..a {
            if r.gen_bool(p) {
                edges.push((order[a], order[b]));
            }
        }
    }
    Dag::from_edges(n, edges).unwrap().0
}

/// Random simple digraph, reciprocated pairs allowed.
pub fn random_digraph(r: &mut impl Rng, max_n: usize, p: f64) -> Digraph {
    let n = r.gen_range(1..=max_n);
    let mut edges = Vec::new();
    for s in 0..n {
        for t in 0..n {
            if s != t && r.gen_bool(p) {
                edges.push((s, t));
            }
        }
    }
    Digraph::from_edges(n, edges).unwrap().0
}

pub fn adjacency(g: &Digraph) -> Vec<Vec<bool>> {
    let n = g.node_count();
    let mut a = vec![vec![false; n]; n];
    for (s, t) in g.edges() {
        a[s.index()][t.index()] = true;
    }
    a
}

/// Length of the longest directed path leaving `v`, by enumerating every path.
pub fn longest_path_from(a: &[Vec<bool>], v: usize) -> u32 {
    (0..a.len())
        .filter(|&t| a[v][t])
        .map(|t| 1 + longest_path_from(a, t))
        .max()
        .unwrap_or(0)
}

pub fn oracle_generations(g: &Digraph) -> Vec<u32> {
    let a = adjacency(g);
    (0..a.len()).map(|v| longest_path_from(&a, v)).collect()
}
