//! Cleaning pipeline: isolates, largest component, cycles.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Dag, Digraph, NodeId};
use crate::topo::{break_cycles, largest_weakly_connected_component, remove_isolates, weak_components};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleaningReport {
    pub input_nodes: usize,
    pub input_edges: usize,
    pub isolates_removed: usize,
    /// Nodes in the largest weakly connected component before cycle removal.
    pub component_nodes_kept: usize,
    pub date_violations_removed: usize,
    pub back_edges_removed: usize,
    /// Nodes cut off from the component by date-based edge removal and
    /// dropped by a final component pass.
    pub detached_after_cycle_removal: usize,
    pub output_nodes: usize,
    pub output_edges: usize,
}

/// Output of [`clean`]: the DAG, its report, and each node's index in the input.
#[derive(Debug, Clone)]
pub struct Cleaned {
    pub dag: Dag,
    pub report: CleaningReport,
    pub original: Vec<NodeId>,
}

/// Removes isolated nodes, keeps the largest weakly connected component,
/// and breaks cycles (date filter when dates exist, then DFS back edges).
/// The result is connected and acyclic.
pub fn clean(g: &Digraph) -> Result<Cleaned> {
    let mut report = CleaningReport {
        input_nodes: g.node_count(),
        input_edges: g.edge_count(),
        ..Default::default()
    };
    let (no_isolates, kept1) = remove_isolates(g);
    report.isolates_removed = g.node_count() - no_isolates.node_count();
    if no_isolates.node_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    let (component, kept2) = largest_weakly_connected_component(&no_isolates)?;
    report.component_nodes_kept = component.node_count();
    let (dag, cycles) = break_cycles(&component);
    report.date_violations_removed = cycles.date_violations.len();
    report.back_edges_removed = cycles.back_edges.len();
    let mut original: Vec<NodeId> = kept2.iter().map(|v| kept1[v.index()]).collect();

    let (_, sizes) = weak_components(&dag);
    let dag = if sizes.len() > 1 {
        let (again, kept3) = largest_weakly_connected_component(&dag)?;
        report.detached_after_cycle_removal = dag.node_count() - again.node_count();
        original = kept3.iter().map(|v| original[v.index()]).collect();
        Dag::try_from_digraph(again)?
    } else {
        dag
    };
    report.output_nodes = dag.node_count();
    report.output_edges = dag.edge_count();
    Ok(Cleaned { dag, report, original })
}
