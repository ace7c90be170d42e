//! Clustering coefficients from one pass of triangle enumeration.

use serde::{Deserialize, Serialize};

use crate::graph::{Digraph, NodeId};

/// Directed-total clustering (Fagiolo): `C_i = [(A+Aᵀ)³]_ii / (2·[d(d−1) − 2·d↔])`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectedClustering {
    pub per_node: Vec<f64>,
    pub average: f64,
    pub global: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UndirectedClustering {
    pub per_node: Vec<f64>,
    pub average: f64,
    /// Transitivity: closed over connected triples.
    pub global: f64,
}

/// Undirected projection with edge weights 1, or 2 for reciprocated pairs.
struct Projection {
    offsets: Vec<usize>,
    neighbours: Vec<(u32, u8)>,
}

impl Projection {
    fn new(g: &Digraph) -> Self {
        let mut offsets = Vec::with_capacity(g.node_count() + 1);
        let mut neighbours = Vec::with_capacity(2 * g.edge_count());
        offsets.push(0);
        for v in g.nodes() {
            // both lists are sorted; merge them
            let (out, inn) = (g.successors(v), g.predecessors(v));
            let (mut i, mut j) = (0, 0);
            while i < out.len() || j < inn.len() {
                match (out.get(i), inn.get(j)) {
                    (Some(a), Some(b)) if a == b => {
                        neighbours.push((a.0, 2));
                        i += 1;
                        j += 1;
                    }
                    (Some(a), Some(b)) if a < b => {
                        neighbours.push((a.0, 1));
                        i += 1;
                    }
                    (Some(a), None) => {
                        neighbours.push((a.0, 1));
                        i += 1;
                    }
                    (_, Some(b)) => {
                        neighbours.push((b.0, 1));
                        j += 1;
                    }
                    (None, None) => unreachable!(),
                }
            }
            offsets.push(neighbours.len());
        }
        Projection { offsets, neighbours }
    }

    fn of(&self, v: usize) -> &[(u32, u8)] {
        &self.neighbours[self.offsets[v]..self.offsets[v + 1]]
    }

    fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }
}

/// Per-node triangle counts: plain, and weighted by `w_ij·w_jk·w_ki`.
fn triangles(p: &Projection, n: usize) -> (Vec<u64>, Vec<u64>) {
    // orient each edge towards the higher (degree, index) rank
    let rank = |v: usize| (p.degree(v), v);
    let forward: Vec<Vec<(u32, u8)>> = (0..n)
        .map(|u| p.of(u).iter().copied().filter(|&(v, _)| rank(v as usize) > rank(u)).collect())
        .collect();
    let mut plain = vec![0u64; n];
    let mut weighted = vec![0u64; n];
    let mut mark = vec![0u8; n];
    for u in 0..n {
        for &(v, w) in &forward[u] {
            mark[v as usize] = w;
        }
        for &(v, w_uv) in &forward[u] {
            for &(x, w_vx) in &forward[v as usize] {
                let w_ux = mark[x as usize];
                if w_ux > 0 {
                    let prod = u64::from(w_uv) * u64::from(w_vx) * u64::from(w_ux);
                    for t in [u, v as usize, x as usize] {
                        plain[t] += 1;
                        weighted[t] += prod;
                    }
                }
            }
        }
        for &(v, _) in &forward[u] {
            mark[v as usize] = 0;
        }
    }
    (plain, weighted)
}

fn reciprocated(g: &Digraph, v: NodeId) -> usize {
    g.successors(v).iter().filter(|&&t| g.has_edge(t, v)).count()
}

fn mean_or_zero(x: &[f64]) -> f64 {
    if x.is_empty() {
        0.0
    } else {
        x.iter().sum::<f64>() / x.len() as f64
    }
}

/// Nodes whose denominator vanishes get 0.
pub fn clustering_directed(g: &Digraph) -> DirectedClustering {
    let n = g.node_count();
    let p = Projection::new(g);
    let (_, weighted) = triangles(&p, n);
    let mut per_node = vec![0.0; n];
    let (mut closed, mut triplets) = (0.0, 0.0);
    for v in g.nodes() {
        let d = g.degree(v) as f64;
        let denom = d * (d - 1.0) - 2.0 * reciprocated(g, v) as f64;
        // [(A+Aᵀ)³]_ii counts each triangle twice, once per orientation
        let cycles = 2.0 * weighted[v.index()] as f64;
        if denom > 0.0 {
            per_node[v.index()] = cycles / (2.0 * denom);
        }
        closed += cycles / 2.0;
        triplets += denom;
    }
    DirectedClustering {
        average: mean_or_zero(&per_node),
        global: if triplets > 0.0 { closed / triplets } else { 0.0 },
        per_node,
    }
}

pub fn clustering_undirected(g: &Digraph) -> UndirectedClustering {
    let n = g.node_count();
    let p = Projection::new(g);
    let (plain, _) = triangles(&p, n);
    let mut per_node = vec![0.0; n];
    let (mut closed, mut triples) = (0.0, 0.0);
    for v in 0..n {
        let k = p.degree(v) as f64;
        let pairs = k * (k - 1.0) / 2.0;
        if pairs > 0.0 {
            per_node[v] = plain[v] as f64 / pairs;
        }
        closed += plain[v] as f64;
        triples += pairs;
    }
    UndirectedClustering {
        average: mean_or_zero(&per_node),
        global: if triples > 0.0 { closed / triples } else { 0.0 },
        per_node,
    }
}
