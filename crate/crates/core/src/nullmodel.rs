//! Degree-preserving random DAGs and Z-scores against null ensembles.
//!
//! A realization draws a random topological order, then wires each node's
//! out-stubs, oldest node first, to in-stubs of nodes already placed. Every
//! edge therefore points back in the order and the result is acyclic with
//! the input's exact in- and out-degrees.

use std::collections::HashMap;
use std::io::Write;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::disruption::{defined_pairs, disruption_full, disruption_windowed};
use crate::error::{Error, Result};
use crate::format::fmt_opt;
use crate::graph::{Dag, Digraph, NodeId};
use crate::metrics::clustering_directed;
use crate::stats::{derive_seed, mean, pearson, rng, sample_sd};
use crate::topo::topological_sort;

pub const DEFAULT_ENSEMBLE_SIZE: usize = 10;
/// Redraws allowed per stub before a duplicate is accepted for repair.
pub const MAX_REDRAWS: usize = 100;
/// Repair swap budget per edge.
pub const REPAIR_BUDGET_PER_EDGE: usize = 10;
/// Fresh stub draws tried after a failed repair.
pub const MAX_RESTARTS: u64 = 20;

/// Swap-compatibility of `(i,j),(u,v) → (i,v),(u,j)`: both new edges point
/// back in the order and neither exists yet.
fn can_swap(count: &HashMap<(u32, u32), u32>, pos: &[u32], (i, j): (u32, u32), (u, v): (u32, u32)) -> bool {
    u != i
        && pos[v as usize] < pos[i as usize]
        && pos[j as usize] < pos[u as usize]
        && !count.contains_key(&(i, v))
        && !count.contains_key(&(u, j))
}

fn swap(count: &mut HashMap<(u32, u32), u32>, edges: &mut [(u32, u32)], e: usize, f: usize) {
    let ((i, j), (u, v)) = (edges[e], edges[f]);
    for old in [(i, j), (u, v)] {
        let c = count.get_mut(&old).unwrap();
        *c -= 1;
        if *c == 0 {
            count.remove(&old);
        }
    }
    count.insert((i, v), 1);
    count.insert((u, j), 1);
    edges[e] = (i, v);
    edges[f] = (u, j);
}

/// Resolves duplicate edges by target swaps. A duplicate is swapped with a
/// random edge when possible; otherwise a random swap between two other
/// edges reshuffles the configuration so a later attempt can succeed.
fn repair(edges: &mut [(u32, u32)], pos: &[u32], rng: &mut impl Rng) -> Result<()> {
    let mut count: HashMap<(u32, u32), u32> = HashMap::new();
    let mut pending = Vec::new();
    for (k, &e) in edges.iter().enumerate() {
        let c = count.entry(e).or_insert(0);
        *c += 1;
        if *c > 1 {
            pending.push(k);
        }
    }
    if pending.is_empty() {
        return Ok(());
    }
    let m = edges.len();
    let budget = REPAIR_BUDGET_PER_EDGE * m;
    let mut attempts = 0;
    while let Some(&e) = pending.last() {
        if count[&edges[e]] <= 1 {
            pending.pop();
            continue;
        }
        attempts += 1;
        if attempts > budget {
            return Err(Error::RepairFailed { attempts: budget });
        }
        let f = rng.gen_range(0..m);
        if can_swap(&count, pos, edges[e], edges[f]) {
            swap(&mut count, edges, e, f);
            pending.pop();
            continue;
        }
        let h = rng.gen_range(0..m);
        if count[&edges[f]] == 1 && count[&edges[h]] == 1 && can_swap(&count, pos, edges[f], edges[h]) {
            swap(&mut count, edges, f, h);
        }
    }
    Ok(())
}

/// Stub draws for a fixed order; `Err` when repair fails.
fn wire(g: &Dag, order: &[NodeId], pos: &[u32], rng: &mut impl Rng) -> Result<Vec<(u32, u32)>> {
    let mut pool: Vec<u32> = Vec::with_capacity(g.edge_count());
    let mut edges: Vec<(u32, u32)> = Vec::with_capacity(g.edge_count());
    // linked_from[t] == s + 1 when s already points to t
    let mut linked_from = vec![0u32; g.node_count()];
    for &u in order {
        for _ in 0..g.out_degree(u) {
            debug_assert!(!pool.is_empty(), "earlier nodes always hold enough in-stubs");
            let mut pick = rng.gen_range(0..pool.len());
            let mut redraws = 0;
            while linked_from[pool[pick] as usize] == u.0 + 1 && redraws < MAX_REDRAWS {
                pick = rng.gen_range(0..pool.len());
                redraws += 1;
            }
            let t = pool.swap_remove(pick);
            linked_from[t as usize] = u.0 + 1;
            edges.push((u.0, t));
        }
        pool.extend(std::iter::repeat(u.0).take(g.in_degree(u)));
    }
    repair(&mut edges, pos, rng)?;
    Ok(edges)
}

/// One degree-preserving acyclic randomization of `g`. Node metadata is kept.
///
/// If duplicate repair fails, the stubs are redrawn from a fresh stream up to
/// [`MAX_RESTARTS`] times before giving up.
pub fn randomize_dag(g: &Dag, seed: u64) -> Result<Dag> {
    let n = g.node_count();
    let order = topological_sort(g, Some(derive_seed(seed, 0)))?;
    let mut pos = vec![0u32; n];
    for (p, v) in order.iter().enumerate() {
        pos[v.index()] = p as u32;
    }
    let mut attempt = 0;
    let mut edges = loop {
        match wire(g, &order, &pos, &mut rng(derive_seed(seed, 1 + attempt))) {
            Ok(edges) => break edges,
            Err(Error::RepairFailed { .. }) if attempt < MAX_RESTARTS => attempt += 1,
            Err(e) => return Err(e),
        }
    };
    edges.sort_unstable();
    let pairs: Vec<(NodeId, NodeId)> = edges.into_iter().map(|(s, t)| (NodeId(s), NodeId(t))).collect();
    Ok(Dag::new_unchecked(Digraph::from_sorted_edges(n, &pairs, g.meta().clone())))
}

/// A metric evaluated on the real network and on each null realization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NullMetric {
    LinkCount,
    /// Average directed clustering.
    Clustering,
    /// Pearson correlation of disruption with citations; `None` window
    /// means full history. Generations are recomputed per graph.
    DisruptionCorrelation(Option<u32>),
    MeanDisruption(Option<u32>),
}

impl NullMetric {
    pub fn name(&self) -> String {
        let suffix = |w: &Option<u32>| w.map_or_else(|| "-full".to_string(), |w| format!("-w{w}"));
        match self {
            NullMetric::LinkCount => "link-count".into(),
            NullMetric::Clustering => "clustering".into(),
            NullMetric::DisruptionCorrelation(w) => format!("disruption-corr{}", suffix(w)),
            NullMetric::MeanDisruption(w) => format!("mean-disruption{}", suffix(w)),
        }
    }

    pub fn evaluate(&self, g: &Dag) -> Result<Option<f64>> {
        let disruption = |w: &Option<u32>| {
            let gen = g.generations();
            match w {
                Some(w) => disruption_windowed(g, &gen, *w),
                None => disruption_full(g, &gen),
            }
        };
        Ok(match self {
            NullMetric::LinkCount => Some(g.edge_count() as f64),
            NullMetric::Clustering => Some(clustering_directed(g).average),
            NullMetric::DisruptionCorrelation(w) => {
                let (d, c) = defined_pairs(&disruption(w)?);
                pearson(&d, &c)
            }
            NullMetric::MeanDisruption(w) => mean(&defined_pairs(&disruption(w)?).0),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullEnsemble {
    pub metric: String,
    pub base_seed: u64,
    /// Seed of realization i is `base_seed + i`.
    pub seeds: Vec<u64>,
    pub values: Vec<Option<f64>>,
}

impl NullEnsemble {
    pub fn defined_values(&self) -> Vec<f64> {
        self.values.iter().flatten().copied().collect()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["realization", "seed", "metric", "value"])?;
        for (i, (seed, v)) in self.seeds.iter().zip(&self.values).enumerate() {
            w.write_record([i.to_string(), seed.to_string(), self.metric.clone(), fmt_opt(*v)])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Evaluates `metric` on `size` realizations.
pub fn ensemble(g: &Dag, size: usize, base_seed: u64, metric: NullMetric) -> Result<NullEnsemble> {
    let seeds: Vec<u64> = (0..size as u64).map(|i| base_seed.wrapping_add(i)).collect();
    let values = seeds
        .par_iter()
        .map(|&s| metric.evaluate(&randomize_dag(g, s)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(NullEnsemble {
        metric: metric.name(),
        base_seed,
        seeds,
        values,
    })
}

/// `(real − mean) / sample sd`; `None` below two values or for zero spread.
pub fn zscore(real: f64, null: &[f64]) -> Option<f64> {
    let sd = sample_sd(null)?;
    let m = mean(null)?;
    (sd > 0.0).then(|| (real - m) / sd)
}
