//! Disruption, citation counts and reference preferences per node.
//!
//! Undefined disruption values (empty `P ∪ P̃`) are kept in the records but
//! excluded from every aggregate.

mod groups;

pub use groups::{
    gini, gini_of_disruption, grouped_by_preference, grouped_evolution, write_groups_csv, GroupStat, PreferenceKey,
    EVOLUTION_MARGIN,
};

use std::fmt;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::{fmt_g, fmt_opt};
use crate::graph::{Digraph, NodeDate, NodeId};
use crate::topo::GenerationAssignment;

pub const DEFAULT_WINDOW: u32 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DisruptionMode {
    Full,
    Windowed(u32),
    Date(Option<u32>),
}

impl fmt::Display for DisruptionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DisruptionMode::Full => f.write_str("full"),
            DisruptionMode::Windowed(w) => write!(f, "windowed-{w}"),
            DisruptionMode::Date(None) => f.write_str("date"),
            DisruptionMode::Date(Some(y)) => write!(f, "date-{y}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DisruptionRecord {
    pub node: NodeId,
    /// `None` when no citer of the node or of its references is in scope.
    pub disruption: Option<f64>,
    /// Citers in scope.
    pub citations: usize,
    pub mode: DisruptionMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PreferenceRecord {
    pub node: NodeId,
    pub reference_popularity: f64,
    pub reference_age: f64,
}

/// Combines `|P|`, `|P̃|` and `|P ∩ P̃|` into the disruption score.
pub fn combine(p: usize, p_tilde: usize, both: usize) -> Option<f64> {
    let union = p + p_tilde - both;
    (union > 0).then(|| ((p - both) as f64 - both as f64) / union as f64)
}

/// Stamp arrays reused across nodes; a node's index + 1 is its epoch.
struct Scratch {
    in_p: Vec<u32>,
    seen: Vec<u32>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Scratch {
            in_p: vec![0; n],
            seen: vec![0; n],
        }
    }

    fn evaluate(
        &mut self,
        i: NodeId,
        citers: impl Iterator<Item = NodeId>,
        later_citers_of_refs: impl Iterator<Item = NodeId>,
    ) -> (Option<f64>, usize) {
        let epoch = i.0 + 1;
        let mut p = 0;
        for k in citers {
            self.in_p[k.index()] = epoch;
            p += 1;
        }
        let (mut p_tilde, mut both) = (0, 0);
        for k in later_citers_of_refs {
            if self.seen[k.index()] != epoch {
                self.seen[k.index()] = epoch;
                p_tilde += 1;
                if self.in_p[k.index()] == epoch {
                    both += 1;
                }
            }
        }
        (combine(p, p_tilde, both), p)
    }
}

/// In-neighbour lists ordered by generation, for range queries.
struct ByGeneration<'a> {
    g: &'a Digraph,
    gen: &'a [u32],
    sorted: Vec<Vec<NodeId>>,
}

impl<'a> ByGeneration<'a> {
    fn new(g: &'a Digraph, gen: &'a GenerationAssignment) -> Self {
        let gen = gen.as_slice();
        let sorted = g
            .nodes()
            .map(|v| {
                let mut p = g.predecessors(v).to_vec();
                p.sort_by_key(|k| (gen[k.index()], k.0));
                p
            })
            .collect();
        ByGeneration { g, gen, sorted }
    }

    /// Citers of `v` with `lo < g ≤ hi`.
    fn citers_between(&self, v: NodeId, lo: u32, hi: u32) -> &[NodeId] {
        let list = &self.sorted[v.index()];
        let a = list.partition_point(|k| self.gen[k.index()] <= lo);
        let b = list.partition_point(|k| self.gen[k.index()] <= hi);
        &list[a..b.max(a)]
    }

    fn records(&self, window: Option<u32>) -> Vec<DisruptionRecord> {
        let mode = window.map_or(DisruptionMode::Full, DisruptionMode::Windowed);
        let n = self.g.node_count();
        (0..n)
            .into_par_iter()
            .map_init(
                || Scratch::new(n),
                |scratch, k| {
                    let i = NodeId::from(k);
                    let gi = self.gen[k];
                    let hi = window.map_or(u32::MAX, |w| gi.saturating_add(w));
                    let citers = self.citers_between(i, gi, hi).iter().copied();
                    let later = self
                        .g
                        .successors(i)
                        .iter()
                        .flat_map(|&j| self.citers_between(j, gi, hi).iter().copied());
                    let (disruption, citations) = scratch.evaluate(i, citers, later);
                    DisruptionRecord {
                        node: i,
                        disruption,
                        citations,
                        mode,
                    }
                },
            )
            .collect()
    }
}

fn check_generations(g: &Digraph, gen: &GenerationAssignment) -> Result<()> {
    if gen.as_slice().len() != g.node_count() {
        return Err(Error::InvalidArgument(format!(
            "generation assignment covers {} nodes, graph has {}",
            gen.as_slice().len(),
            g.node_count()
        )));
    }
    Ok(())
}

/// Disruption over the full citation history.
pub fn disruption_full(g: &Digraph, gen: &GenerationAssignment) -> Result<Vec<DisruptionRecord>> {
    check_generations(g, gen)?;
    Ok(ByGeneration::new(g, gen).records(None))
}

/// Disruption counting only citers within `window` generations of the node.
pub fn disruption_windowed(g: &Digraph, gen: &GenerationAssignment, window: u32) -> Result<Vec<DisruptionRecord>> {
    check_generations(g, gen)?;
    Ok(ByGeneration::new(g, gen).records(Some(window)))
}

pub(crate) fn require_dates(g: &Digraph) -> Result<Vec<NodeDate>> {
    let missing: Vec<NodeId> = g.nodes().filter(|&v| g.date(v).is_none()).collect();
    if let Some(&first) = missing.first() {
        return Err(Error::MissingDates {
            count: missing.len(),
            first,
            nodes: missing,
        });
    }
    Ok(g.nodes().map(|v| g.date(v).unwrap()).collect())
}

/// Disruption with "later" meaning a strictly later date at the coarser of
/// the two precisions. With a window, citers dated more than `window_years`
/// calendar years after the node are out of scope.
pub fn disruption_by_date(g: &Digraph, window_years: Option<u32>) -> Result<Vec<DisruptionRecord>> {
    let dates = require_dates(g)?;
    let dates = dates.as_slice();
    let mode = DisruptionMode::Date(window_years);
    let n = g.node_count();
    Ok((0..n)
        .into_par_iter()
        .map_init(
            || Scratch::new(n),
            |scratch, k| {
                let i = NodeId::from(k);
                let di = dates[k];
                let within = move |c: &NodeId| {
                    window_years.map_or(true, |w| i64::from(dates[c.index()].year) <= i64::from(di.year) + i64::from(w))
                };
                let citers = g.predecessors(i).iter().copied().filter(within);
                let later = g.successors(i).iter().flat_map(|&j| {
                    g.predecessors(j)
                        .iter()
                        .copied()
                        .filter(move |c| dates[c.index()].is_later_than(&di))
                        .filter(within)
                });
                let (disruption, citations) = scratch.evaluate(i, citers, later);
                DisruptionRecord {
                    node: i,
                    disruption,
                    citations,
                    mode,
                }
            },
        )
        .collect())
}

/// Mean citer count and mean generation gap over each node's references.
/// Nodes without references get no record.
pub fn reference_metrics(g: &Digraph, gen: &GenerationAssignment) -> Result<Vec<PreferenceRecord>> {
    check_generations(g, gen)?;
    Ok(g.nodes()
        .filter(|&v| g.out_degree(v) > 0)
        .map(|i| {
            let refs = g.successors(i);
            let k = refs.len() as f64;
            let popularity = refs.iter().map(|&j| g.in_degree(j) as f64).sum::<f64>() / k;
            let age = refs.iter().map(|&j| f64::from(gen.of(i) - gen.of(j))).sum::<f64>() / k;
            PreferenceRecord {
                node: i,
                reference_popularity: popularity,
                reference_age: age,
            }
        })
        .collect())
}

/// Defined `(disruption, citations)` pairs.
pub fn defined_pairs(records: &[DisruptionRecord]) -> (Vec<f64>, Vec<f64>) {
    records
        .iter()
        .filter_map(|r| r.disruption.map(|d| (d, r.citations as f64)))
        .unzip()
}

pub fn write_disruption_csv<W: Write>(out: W, records: &[DisruptionRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["node", "disruption", "citations", "mode"])?;
    for r in records {
        w.write_record([
            r.node.to_string(),
            fmt_opt(r.disruption),
            r.citations.to_string(),
            r.mode.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_preference_csv<W: Write>(out: W, records: &[PreferenceRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["node", "ref_popularity", "ref_age"])?;
    for r in records {
        w.write_record([r.node.to_string(), fmt_g(r.reference_popularity), fmt_g(r.reference_age)])?;
    }
    w.flush()?;
    Ok(())
}
