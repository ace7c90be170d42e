//! Degree assortativity and average shortest-path length.

use rand::seq::index::sample;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Digraph, NodeId};
use crate::stats::{pearson, rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AssortativityMode {
    Undirected,
    OutOut,
    OutIn,
    InOut,
    InIn,
}

impl AssortativityMode {
    pub const ALL: [AssortativityMode; 5] = [
        AssortativityMode::Undirected,
        AssortativityMode::OutOut,
        AssortativityMode::OutIn,
        AssortativityMode::InOut,
        AssortativityMode::InIn,
    ];
}

/// Pearson correlation of degrees across edges. Directed modes pair the
/// citer's degree (first kind) with the cited node's (second kind); the
/// undirected mode uses total degree and counts each edge both ways.
/// `None` for zero variance or fewer than two edges.
pub fn assortativity(g: &Digraph, mode: AssortativityMode) -> Option<f64> {
    if g.edge_count() < 2 {
        return None;
    }
    let out = |v: NodeId| g.out_degree(v) as f64;
    let inn = |v: NodeId| g.in_degree(v) as f64;
    let tot = |v: NodeId| g.degree(v) as f64;
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (s, t) in g.edges() {
        let (x, y) = match mode {
            AssortativityMode::Undirected => {
                xs.push(tot(t));
                ys.push(tot(s));
                (tot(s), tot(t))
            }
            AssortativityMode::OutOut => (out(s), out(t)),
            AssortativityMode::OutIn => (out(s), inn(t)),
            AssortativityMode::InOut => (inn(s), out(t)),
            AssortativityMode::InIn => (inn(s), inn(t)),
        };
        xs.push(x);
        ys.push(y);
    }
    pearson(&xs, &ys)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PathInterpretation {
    /// Ordered pairs (u, v) with v reachable from u along citations.
    DirectedReachable,
    /// Pairs of the undirected projection.
    Undirected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PathSampling {
    /// Largest node count for which every node is a BFS source.
    pub exact_limit: usize,
    pub sample_sources: usize,
    pub seed: u64,
}

impl Default for PathSampling {
    fn default() -> Self {
        PathSampling {
            exact_limit: 50_000,
            sample_sources: 10_000,
            seed: 0,
        }
    }
}

/// Sum of distances and number of nodes reached from `src`, excluding itself.
fn bfs(g: &Digraph, src: NodeId, undirected: bool, dist: &mut [u32], queue: &mut Vec<u32>) -> (u64, u64) {
    queue.clear();
    queue.push(src.0);
    dist[src.index()] = 0;
    let (mut total, mut reached) = (0u64, 0u64);
    let mut head = 0;
    while head < queue.len() {
        let u = NodeId(queue[head]);
        head += 1;
        let du = dist[u.index()];
        let mut visit = |v: &NodeId| {
            if dist[v.index()] == u32::MAX {
                dist[v.index()] = du + 1;
                total += u64::from(du + 1);
                reached += 1;
                queue.push(v.0);
            }
        };
        g.successors(u).iter().for_each(&mut visit);
        if undirected {
            g.predecessors(u).iter().for_each(&mut visit);
        }
    }
    for &v in queue.iter() {
        dist[v as usize] = u32::MAX;
    }
    (total, reached)
}

/// Mean shortest-path length over connected pairs. Exact up to
/// `exact_limit` nodes, otherwise from a seeded sample of sources.
pub fn average_path_length_with(g: &Digraph, interp: PathInterpretation, sampling: &PathSampling) -> Result<f64> {
    let n = g.node_count();
    let sources: Vec<NodeId> = if n <= sampling.exact_limit {
        g.nodes().collect()
    } else {
        let mut picked = sample(&mut rng(sampling.seed), n, sampling.sample_sources.min(n)).into_vec();
        picked.sort_unstable();
        picked.into_iter().map(NodeId::from).collect()
    };
    let undirected = interp == PathInterpretation::Undirected;
    let (total, pairs) = sources
        .par_iter()
        .map_init(
            || (vec![u32::MAX; n], Vec::new()),
            |(dist, queue), &s| bfs(g, s, undirected, dist, queue),
        )
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    if pairs == 0 {
        return Err(Error::InvalidArgument("no connected node pairs".into()));
    }
    Ok(total as f64 / pairs as f64)
}

pub fn average_path_length(g: &Digraph, interp: PathInterpretation) -> Result<f64> {
    average_path_length_with(g, interp, &PathSampling::default())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_paths() {
        let (g, _) = Digraph::from_edges(3, [(2, 1), (1, 0)]).unwrap();
        let d = average_path_length(&g, PathInterpretation::DirectedReachable).unwrap();
        assert!((d - 4.0 / 3.0).abs() < 1e-12);
        let u = average_path_length(&g, PathInterpretation::Undirected).unwrap();
        assert!((u - 4.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn no_pairs_is_error() {
        let (g, _) = Digraph::from_edges(2, []).unwrap();
        assert!(average_path_length(&g, PathInterpretation::Undirected).is_err());
    }

    #[test]
    fn sampled_sources_are_seeded() {
        let edges: Vec<(usize, usize)> = (1..200).map(|i| (i, i / 2)).collect();
        let (g, _) = Digraph::from_edges(200, edges).unwrap();
        let s = PathSampling { exact_limit: 10, sample_sources: 50, seed: 4 };
        let a = average_path_length_with(&g, PathInterpretation::Undirected, &s).unwrap();
        let b = average_path_length_with(&g, PathInterpretation::Undirected, &s).unwrap();
        assert_eq!(a, b);
        let exact = average_path_length(&g, PathInterpretation::Undirected).unwrap();
        assert!((a - exact).abs() < 0.1 * exact);
    }

    #[test]
    fn assortativity_hand_example() {
        // 0→1, 0→2, 1→2, 3→2
        let (g, _) = Digraph::from_edges(4, [(0, 1), (0, 2), (1, 2), (3, 2)]).unwrap();
        // out(s) = [2,2,1,1], in(t) = [1,3,3,3]
        let want = pearson(&[2.0, 2.0, 1.0, 1.0], &[1.0, 3.0, 3.0, 3.0]).unwrap();
        assert_eq!(assortativity(&g, AssortativityMode::OutIn), Some(want));
        assert!((want + 0.57735).abs() < 1e-5);
    }

    #[test]
    fn regular_graph_is_undefined() {
        let (g, _) = Digraph::from_edges(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        assert_eq!(assortativity(&g, AssortativityMode::OutOut), None);
        assert_eq!(assortativity(&g, AssortativityMode::Undirected), None);
    }
}
