//! SNAP-style edge lists: one `source<ws>target` pair per line, `#` comments.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::graph::{BuildReport, Digraph, GraphBuilder};

/// A parsed edge list with identifiers re-indexed densely in ascending order.
#[derive(Debug, Clone)]
pub struct EdgeListLoad {
    pub graph: Digraph,
    /// Original identifier of each dense node index.
    pub source_ids: Vec<u64>,
    pub report: BuildReport,
}

/// Reads `(source, target, rest-of-line)` rows; blank and `#` lines are skipped.
pub(crate) fn read_rows<R: BufRead>(src: R, mut row: impl FnMut(usize, u64, u64, &[&str]) -> Result<()>) -> Result<()> {
    for (k, line) in src.lines().enumerate() {
        let line = line?;
        let lineno = k + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields.len() < 2 {
            return Err(Error::parse(lineno, format!("expected 'source target', got '{trimmed}'")));
        }
        let parse = |tok: &str| {
            tok.parse::<u64>()
                .map_err(|_| Error::parse(lineno, format!("non-integer node identifier '{tok}'")))
        };
        row(lineno, parse(fields[0])?, parse(fields[1])?, &fields[2..])?;
    }
    Ok(())
}

/// Loads an edge list over the identifiers it mentions. Columns beyond the
/// first two are ignored.
pub fn load_edge_list<R: BufRead>(src: R) -> Result<EdgeListLoad> {
    let mut pairs = Vec::new();
    read_rows(src, |_, s, t, _| {
        pairs.push((s, t));
        Ok(())
    })?;
    let mut index: BTreeMap<u64, usize> = BTreeMap::new();
    for &(s, t) in &pairs {
        index.insert(s, 0);
        index.insert(t, 0);
    }
    for (k, v) in index.values_mut().enumerate() {
        *v = k;
    }
    let mut builder = GraphBuilder::new(index.len());
    for (s, t) in pairs {
        builder.add_edge(index[&s], index[&t])?;
    }
    let (graph, report) = builder.build();
    Ok(EdgeListLoad {
        graph,
        source_ids: index.into_keys().collect(),
        report,
    })
}

/// Reads an edge list whose identifiers are already dense indices below `n`.
pub fn load_dense_edge_list<R: BufRead>(src: R, n: usize) -> Result<(Digraph, BuildReport)> {
    let mut builder = GraphBuilder::new(n);
    read_rows(src, |line, s, t, _| {
        builder
            .add_edge(s as usize, t as usize)
            .map_err(|e| Error::parse(line, e.to_string()))
    })?;
    Ok(builder.build())
}

/// Writes `g` in SNAP layout: a comment header, then tab-separated pairs.
pub fn write_edge_list<W: Write>(mut out: W, g: &Digraph, name: &str) -> Result<()> {
    writeln!(out, "# Directed graph (each unordered pair of nodes is saved once): {name}")?;
    writeln!(out, "# Nodes: {} Edges: {}", g.node_count(), g.edge_count())?;
    writeln!(out, "# FromNodeId\tToNodeId")?;
    for (s, t) in g.edges() {
        writeln!(out, "{s}\t{t}")?;
    }
    Ok(())
}
