//! Topological order, topological generations, connectivity, and cycle removal.
//!
//! Orders use the citation convention: a node comes after every node it
//! points to, so cited (older) nodes appear first.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Dag, Digraph, NodeId};

/// Kahn's algorithm from the sinks upward. Returns the emitted order, which
/// is shorter than the node count iff the graph has a cycle.
fn kahn(g: &Digraph, seed: Option<u64>) -> Vec<NodeId> {
    let n = g.node_count();
    let mut remaining: Vec<usize> = g.out_degrees();
    let mut order = Vec::with_capacity(n);
    match seed {
        None => {
            let mut ready: BinaryHeap<Reverse<NodeId>> =
                g.nodes().filter(|&v| remaining[v.index()] == 0).map(Reverse).collect();
            while let Some(Reverse(v)) = ready.pop() {
                order.push(v);
                for &u in g.predecessors(v) {
                    remaining[u.index()] -= 1;
                    if remaining[u.index()] == 0 {
                        ready.push(Reverse(u));
                    }
                }
            }
        }
        Some(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut ready: Vec<NodeId> = g.nodes().filter(|&v| remaining[v.index()] == 0).collect();
            while !ready.is_empty() {
                let v = ready.swap_remove(rng.gen_range(0..ready.len()));
                order.push(v);
                for &u in g.predecessors(v) {
                    remaining[u.index()] -= 1;
                    if remaining[u.index()] == 0 {
                        ready.push(u);
                    }
                }
            }
        }
    }
    order
}

pub fn is_acyclic(g: &Digraph) -> bool {
    kahn(g, None).len() == g.node_count()
}

/// One edge lying on a directed cycle, if any exists.
pub fn find_cycle_edge(g: &Digraph) -> Option<(NodeId, NodeId)> {
    let order = kahn(g, None);
    if order.len() == g.node_count() {
        return None;
    }
    let mut done = vec![false; g.node_count()];
    for v in order {
        done[v.index()] = true;
    }
    // Every unfinished node keeps at least one unfinished successor, so
    // walking those successors must revisit a node.
    let start = g.nodes().find(|v| !done[v.index()])?;
    let mut step_of = vec![usize::MAX; g.node_count()];
    let mut cur = start;
    let mut step = 0;
    loop {
        step_of[cur.index()] = step;
        let next = *g.successors(cur).iter().find(|s| !done[s.index()])?;
        if step_of[next.index()] != usize::MAX {
            return Some((cur, next));
        }
        cur = next;
        step += 1;
    }
}

/// Topological order with cited nodes first. Without a seed, ties go to the
/// smallest index; with a seed, each pick is uniform among the ready nodes.
pub fn topological_sort(g: &Digraph, seed: Option<u64>) -> Result<Vec<NodeId>> {
    let order = kahn(g, seed);
    if order.len() == g.node_count() {
        Ok(order)
    } else {
        let (from, to) = find_cycle_edge(g).expect("incomplete order implies a cycle");
        Err(Error::Cycle { from, to })
    }
}

/// Layer index per node: 0 for nodes without successors, otherwise one more
/// than the largest layer among its successors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationAssignment {
    generations: Vec<u32>,
    generation_count: u32,
}

impl GenerationAssignment {
    #[inline]
    pub fn of(&self, v: NodeId) -> u32 {
        self.generations[v.index()]
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.generations
    }

    /// Largest generation plus one (zero for an empty graph).
    pub fn generation_count(&self) -> u32 {
        self.generation_count
    }

    pub fn layer_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.generation_count as usize];
        for &g in &self.generations {
            sizes[g as usize] += 1;
        }
        sizes
    }

    /// Wraps externally supplied generations after checking them against `g`.
    pub fn from_vec(g: &Digraph, generations: Vec<u32>) -> Result<Self> {
        if generations.len() != g.node_count() {
            return Err(Error::InvalidArgument(format!(
                "{} generations for {} nodes",
                generations.len(),
                g.node_count()
            )));
        }
        for (s, t) in g.edges() {
            if generations[s.index()] <= generations[t.index()] {
                return Err(Error::InvalidArgument(format!(
                    "edge {s} -> {t} does not increase the generation"
                )));
            }
        }
        let generation_count = generations.iter().max().map_or(0, |&m| m + 1);
        Ok(GenerationAssignment {
            generations,
            generation_count,
        })
    }
}

pub fn topological_generations(g: &Digraph) -> Result<GenerationAssignment> {
    let order = topological_sort(g, None)?;
    let mut generations = vec![0u32; g.node_count()];
    for v in order {
        generations[v.index()] = g
            .successors(v)
            .iter()
            .map(|s| generations[s.index()] + 1)
            .max()
            .unwrap_or(0);
    }
    let generation_count = generations.iter().max().map_or(0, |&m| m + 1);
    Ok(GenerationAssignment {
        generations,
        generation_count,
    })
}

impl Dag {
    pub fn topological_order(&self, seed: Option<u64>) -> Vec<NodeId> {
        kahn(self, seed)
    }

    pub fn generations(&self) -> GenerationAssignment {
        topological_generations(self).expect("Dag is acyclic")
    }
}

/// Component label per node (edges taken as undirected). Labels are assigned
/// in order of each component's smallest node index.
pub fn weak_components(g: &Digraph) -> (Vec<u32>, Vec<usize>) {
    let n = g.node_count();
    let mut label = vec![u32::MAX; n];
    let mut sizes = Vec::new();
    let mut stack = Vec::new();
    for root in g.nodes() {
        if label[root.index()] != u32::MAX {
            continue;
        }
        let c = sizes.len() as u32;
        label[root.index()] = c;
        stack.push(root);
        let mut size = 0;
        while let Some(v) = stack.pop() {
            size += 1;
            for &u in g.successors(v).iter().chain(g.predecessors(v)) {
                if label[u.index()] == u32::MAX {
                    label[u.index()] = c;
                    stack.push(u);
                }
            }
        }
        sizes.push(size);
    }
    (label, sizes)
}

/// Largest weakly connected component, ties going to the component holding
/// the smallest index. Returns the induced subgraph and, per new node, its
/// original index.
pub fn largest_weakly_connected_component(g: &Digraph) -> Result<(Digraph, Vec<NodeId>)> {
    if g.node_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    let (label, sizes) = weak_components(g);
    let best = sizes
        .iter()
        .enumerate()
        .max_by_key(|&(c, &s)| (s, Reverse(c)))
        .map(|(c, _)| c as u32)
        .expect("non-empty");
    let keep: Vec<NodeId> = g.nodes().filter(|v| label[v.index()] == best).collect();
    Ok((g.induced(&keep), keep))
}

pub fn remove_isolates(g: &Digraph) -> (Digraph, Vec<NodeId>) {
    let keep: Vec<NodeId> = g.nodes().filter(|&v| g.degree(v) > 0).collect();
    (g.induced(&keep), keep)
}

/// Edges removed by [`break_cycles`], by phase.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleBreakReport {
    /// Edges whose cited node is dated strictly later than the citing node.
    pub date_violations: Vec<(NodeId, NodeId)>,
    /// DFS back edges.
    pub back_edges: Vec<(NodeId, NodeId)>,
}

/// Makes `g` acyclic. First drops every edge pointing to a node dated
/// strictly later than its source (when both carry dates), then drops the
/// back edges of a depth-first search rooted at ascending node indices with
/// successors visited in ascending order.
pub fn break_cycles(g: &Digraph) -> (Dag, CycleBreakReport) {
    let mut report = CycleBreakReport::default();
    let dated = if g.has_dates() {
        let out = g.without_edges(|s, t| match (g.date(s), g.date(t)) {
            (Some(ds), Some(dt)) if dt.is_later_than(&ds) => {
                report.date_violations.push((s, t));
                true
            }
            _ => false,
        });
        out
    } else {
        g.clone()
    };

    const NEW: u8 = 0;
    const ACTIVE: u8 = 1;
    const DONE: u8 = 2;
    let n = dated.node_count();
    let mut state = vec![NEW; n];
    let mut back = Vec::new();
    // (node, next successor position)
    let mut stack: Vec<(NodeId, usize)> = Vec::new();
    for root in dated.nodes() {
        if state[root.index()] != NEW {
            continue;
        }
        state[root.index()] = ACTIVE;
        stack.push((root, 0));
        while let Some(top) = stack.last_mut() {
            let (v, pos) = *top;
            let succ = dated.successors(v);
            if pos == succ.len() {
                state[v.index()] = DONE;
                stack.pop();
                continue;
            }
            top.1 += 1;
            let u = succ[pos];
            match state[u.index()] {
                NEW => {
                    state[u.index()] = ACTIVE;
                    stack.push((u, 0));
                }
                ACTIVE => back.push((v, u)),
                _ => {}
            }
        }
    }
    let acyclic = if back.is_empty() {
        dated
    } else {
        back.sort_unstable();
        dated.without_edges(|s, t| back.binary_search(&(s, t)).is_ok())
    };
    report.back_edges = back;
    (Dag::new_unchecked(acyclic), report)
}
