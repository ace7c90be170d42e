//! Directed graph storage.
//!
//! [`Digraph`] is a simple directed graph in compressed sparse row form with
//! both out- and in-adjacency. [`Dag`] wraps a `Digraph` that has been
//! checked for acyclicity. Edges always point from the citing (newer) node
//! to the cited (older) node.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense node index, assigned at insertion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for NodeId {
    #[inline]
    fn from(i: usize) -> Self {
        NodeId(i as u32)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A publication date with year, month, or day precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NodeDate {
    pub year: i32,
    pub month: Option<u8>,
    pub day: Option<u8>,
}

impl NodeDate {
    pub fn year(year: i32) -> Self {
        NodeDate {
            year,
            month: None,
            day: None,
        }
    }

    pub fn ymd(year: i32, month: u8, day: u8) -> Self {
        NodeDate {
            year,
            month: Some(month),
            day: Some(day),
        }
    }

    fn precision(&self) -> u8 {
        match (self.month, self.day) {
            (None, _) => 0,
            (Some(_), None) => 1,
            (Some(_), Some(_)) => 2,
        }
    }

    /// Compares two dates at the coarser of their two precisions, so a bare
    /// year against a full date compares years only.
    pub fn cmp_coarse(&self, other: &NodeDate) -> Ordering {
        let precision = self.precision().min(other.precision());
        let key = |d: &NodeDate| match precision {
            0 => (d.year, 0, 0),
            1 => (d.year, d.month.unwrap_or(0), 0),
            _ => (d.year, d.month.unwrap_or(0), d.day.unwrap_or(0)),
        };
        key(self).cmp(&key(other))
    }

    /// Strictly later at the common precision; equal dates are not later.
    pub fn is_later_than(&self, other: &NodeDate) -> bool {
        self.cmp_coarse(other) == Ordering::Greater
    }
}

impl FromStr for NodeDate {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let s = s.trim();
        let mut parts = s.split('-');
        let year = parts
            .next()
            .filter(|y| y.len() == 4 && y.bytes().all(|b| b.is_ascii_digit()))
            .ok_or_else(|| format!("invalid date '{s}'"))?
            .parse::<i32>()
            .map_err(|e| e.to_string())?;
        let mut component = |max: u8| -> std::result::Result<Option<u8>, String> {
            match parts.next() {
                None => Ok(None),
                Some(p) if p.len() == 2 => match p.parse::<u8>() {
                    Ok(v) if (1..=max).contains(&v) => Ok(Some(v)),
                    _ => Err(format!("invalid date '{s}'")),
                },
                Some(_) => Err(format!("invalid date '{s}'")),
            }
        };
        let month = component(12)?;
        let day = if month.is_some() { component(31)? } else { None };
        if parts.next().is_some() {
            return Err(format!("invalid date '{s}'"));
        }
        Ok(NodeDate { year, month, day })
    }
}

impl fmt::Display for NodeDate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}", self.year)?;
        if let Some(m) = self.month {
            write!(f, "-{m:02}")?;
            if let Some(d) = self.day {
                write!(f, "-{d:02}")?;
            }
        }
        Ok(())
    }
}

/// Number of field dimensions carried by a [`FieldVector`].
pub const FIELD_DIMS: usize = 10;

/// Binary membership vector over the ten mathematical fields, packed into the
/// low bits of a `u16`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct FieldVector(u16);

impl FieldVector {
    pub const MASK: u16 = (1 << FIELD_DIMS) - 1;

    pub fn from_bits(bits: u16) -> Self {
        FieldVector(bits & Self::MASK)
    }

    pub fn one_hot(field: usize) -> Self {
        assert!(field < FIELD_DIMS);
        FieldVector(1 << field)
    }

    pub fn bits(self) -> u16 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn count_ones(self) -> u32 {
        self.0.count_ones()
    }

    pub fn get(self, dim: usize) -> bool {
        self.0 >> dim & 1 == 1
    }
}

impl fmt::Display for FieldVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in 0..FIELD_DIMS {
            f.write_str(if self.get(d) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for FieldVector {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        if s.len() != FIELD_DIMS || !s.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(format!("field vector must be {FIELD_DIMS} binary digits, got '{s}'"));
        }
        let bits = s
            .bytes()
            .enumerate()
            .fold(0u16, |acc, (d, b)| acc | (u16::from(b == b'1') << d));
        Ok(FieldVector(bits))
    }
}

/// Optional per-node metadata.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct NodeMeta {
    pub labels: Vec<Option<String>>,
    pub dates: Vec<Option<NodeDate>>,
    pub fields: Vec<Option<FieldVector>>,
}

impl NodeMeta {
    pub fn empty(n: usize) -> Self {
        NodeMeta {
            labels: vec![None; n],
            dates: vec![None; n],
            fields: vec![None; n],
        }
    }

    fn select(&self, keep: &[NodeId]) -> Self {
        NodeMeta {
            labels: keep.iter().map(|v| self.labels[v.index()].clone()).collect(),
            dates: keep.iter().map(|v| self.dates[v.index()]).collect(),
            fields: keep.iter().map(|v| self.fields[v.index()]).collect(),
        }
    }
}

/// What [`GraphBuilder::build`] discarded.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildReport {
    pub duplicates_dropped: usize,
    pub self_loops_rejected: Vec<NodeId>,
}

/// Accumulates edges for a fixed node count.
#[derive(Debug, Clone)]
pub struct GraphBuilder {
    node_count: usize,
    edges: Vec<(NodeId, NodeId)>,
    self_loops: Vec<NodeId>,
    meta: NodeMeta,
}

impl GraphBuilder {
    pub fn new(node_count: usize) -> Self {
        GraphBuilder {
            node_count,
            edges: Vec::new(),
            self_loops: Vec::new(),
            meta: NodeMeta::empty(node_count),
        }
    }

    pub fn with_meta(mut self, meta: NodeMeta) -> Self {
        assert_eq!(meta.labels.len(), self.node_count);
        self.meta = meta;
        self
    }

    pub fn meta_mut(&mut self) -> &mut NodeMeta {
        &mut self.meta
    }

    pub fn add_edge(&mut self, source: usize, target: usize) -> Result<()> {
        for index in [source, target] {
            if index >= self.node_count {
                return Err(Error::IndexOutOfRange {
                    index,
                    node_count: self.node_count,
                });
            }
        }
        if source == target {
            self.self_loops.push(NodeId::from(source));
        } else {
            self.edges.push((NodeId::from(source), NodeId::from(target)));
        }
        Ok(())
    }

    pub fn build(mut self) -> (Digraph, BuildReport) {
        self.edges.sort_unstable();
        let before = self.edges.len();
        self.edges.dedup();
        let report = BuildReport {
            duplicates_dropped: before - self.edges.len(),
            self_loops_rejected: self.self_loops,
        };
        (
            Digraph::from_sorted_edges(self.node_count, &self.edges, self.meta),
            report,
        )
    }
}

/// Simple directed graph (no self-loops, no parallel edges), possibly cyclic.
#[derive(Debug, Clone, PartialEq)]
pub struct Digraph {
    out_offsets: Vec<usize>,
    out_targets: Vec<NodeId>,
    in_offsets: Vec<usize>,
    in_sources: Vec<NodeId>,
    meta: NodeMeta,
}

impl Digraph {
    /// `edges` must be sorted and free of duplicates and self-loops.
    pub(crate) fn from_sorted_edges(n: usize, edges: &[(NodeId, NodeId)], meta: NodeMeta) -> Self {
        debug_assert!(edges.windows(2).all(|w| w[0] < w[1]));
        let mut out_offsets = vec![0usize; n + 1];
        let mut in_offsets = vec![0usize; n + 1];
        for &(s, t) in edges {
            out_offsets[s.index() + 1] += 1;
            in_offsets[t.index() + 1] += 1;
        }
        for i in 0..n {
            out_offsets[i + 1] += out_offsets[i];
            in_offsets[i + 1] += in_offsets[i];
        }
        let out_targets = edges.iter().map(|&(_, t)| t).collect();
        // Sources arrive in ascending order, so each in-list ends up sorted.
        let mut cursor = in_offsets.clone();
        let mut in_sources = vec![NodeId(0); edges.len()];
        for &(s, t) in edges {
            in_sources[cursor[t.index()]] = s;
            cursor[t.index()] += 1;
        }
        Digraph {
            out_offsets,
            out_targets,
            in_offsets,
            in_sources,
            meta,
        }
    }

    /// Builds from an arbitrary edge list, deduplicating and dropping self-loops.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<(Self, BuildReport)> {
        let mut b = GraphBuilder::new(n);
        for (s, t) in edges {
            b.add_edge(s, t)?;
        }
        Ok(b.build())
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.out_offsets.len() - 1
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.out_targets.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.node_count()).map(NodeId::from)
    }

    /// Nodes that `v` points to (its references), ascending.
    #[inline]
    pub fn successors(&self, v: NodeId) -> &[NodeId] {
        let i = v.index();
        &self.out_targets[self.out_offsets[i]..self.out_offsets[i + 1]]
    }

    /// Nodes that point to `v` (its citers), ascending.
    #[inline]
    pub fn predecessors(&self, v: NodeId) -> &[NodeId] {
        let i = v.index();
        &self.in_sources[self.in_offsets[i]..self.in_offsets[i + 1]]
    }

    #[inline]
    pub fn out_degree(&self, v: NodeId) -> usize {
        let i = v.index();
        self.out_offsets[i + 1] - self.out_offsets[i]
    }

    #[inline]
    pub fn in_degree(&self, v: NodeId) -> usize {
        let i = v.index();
        self.in_offsets[i + 1] - self.in_offsets[i]
    }

    #[inline]
    pub fn degree(&self, v: NodeId) -> usize {
        self.out_degree(v) + self.in_degree(v)
    }

    pub fn has_edge(&self, source: NodeId, target: NodeId) -> bool {
        self.successors(source).binary_search(&target).is_ok()
    }

    /// All edges in (source, target) lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.nodes()
            .flat_map(move |s| self.successors(s).iter().map(move |&t| (s, t)))
    }

    pub fn out_degrees(&self) -> Vec<usize> {
        self.nodes().map(|v| self.out_degree(v)).collect()
    }

    pub fn in_degrees(&self) -> Vec<usize> {
        self.nodes().map(|v| self.in_degree(v)).collect()
    }

    pub fn meta(&self) -> &NodeMeta {
        &self.meta
    }

    pub fn meta_mut(&mut self) -> &mut NodeMeta {
        &mut self.meta
    }

    pub fn label(&self, v: NodeId) -> Option<&str> {
        self.meta.labels[v.index()].as_deref()
    }

    pub fn date(&self, v: NodeId) -> Option<NodeDate> {
        self.meta.dates[v.index()]
    }

    pub fn field(&self, v: NodeId) -> Option<FieldVector> {
        self.meta.fields[v.index()]
    }

    pub fn has_dates(&self) -> bool {
        self.meta.dates.iter().any(Option::is_some)
    }

    /// Subgraph induced by `keep` (ascending, unique). Node `keep[k]` becomes
    /// node `k`; metadata follows its node.
    pub fn induced(&self, keep: &[NodeId]) -> Digraph {
        debug_assert!(keep.windows(2).all(|w| w[0] < w[1]));
        let mut remap = vec![u32::MAX; self.node_count()];
        for (new, old) in keep.iter().enumerate() {
            remap[old.index()] = new as u32;
        }
        let mut edges = Vec::new();
        for (new_s, &old_s) in keep.iter().enumerate() {
            for &t in self.successors(old_s) {
                let new_t = remap[t.index()];
                if new_t != u32::MAX {
                    edges.push((NodeId(new_s as u32), NodeId(new_t)));
                }
            }
        }
        // `keep` is ascending, so the remapping is monotone and the order holds.
        Digraph::from_sorted_edges(keep.len(), &edges, self.meta.select(keep))
    }

    /// Same node set with the edges for which `drop` is true removed.
    pub fn without_edges(&self, mut drop: impl FnMut(NodeId, NodeId) -> bool) -> Digraph {
        let edges: Vec<_> = self.edges().filter(|&(s, t)| !drop(s, t)).collect();
        Digraph::from_sorted_edges(self.node_count(), &edges, self.meta.clone())
    }
}

/// A [`Digraph`] known to be acyclic. Immutable apart from metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct Dag(Digraph);

impl Dag {
    /// Checks acyclicity; on failure names one edge that lies on a cycle.
    pub fn try_from_digraph(g: Digraph) -> Result<Dag> {
        match crate::topo::find_cycle_edge(&g) {
            Some((from, to)) => Err(Error::Cycle { from, to }),
            None => Ok(Dag(g)),
        }
    }

    pub(crate) fn new_unchecked(g: Digraph) -> Dag {
        debug_assert!(crate::topo::is_acyclic(&g));
        Dag(g)
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<(Dag, BuildReport)> {
        let (g, report) = Digraph::from_edges(n, edges)?;
        Ok((Dag::try_from_digraph(g)?, report))
    }

    pub fn as_digraph(&self) -> &Digraph {
        &self.0
    }

    pub fn into_digraph(self) -> Digraph {
        self.0
    }

    pub fn meta_mut(&mut self) -> &mut NodeMeta {
        self.0.meta_mut()
    }

    /// Induced subgraphs of a DAG stay acyclic.
    pub fn induced(&self, keep: &[NodeId]) -> Dag {
        Dag(self.0.induced(keep))
    }
}

impl Deref for Dag {
    type Target = Digraph;

    fn deref(&self) -> &Digraph {
        &self.0
    }
}
