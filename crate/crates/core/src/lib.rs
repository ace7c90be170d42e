//! Construction and analysis of directed acyclic knowledge networks:
//! theorem-dependency and citation graphs, their structural and functional
//! metrics, degree-preserving acyclic null models, and a growth model that
//! mixes logical and societal links.

pub mod disruption;
pub mod error;
pub mod format;
pub mod genmodel;
pub mod graph;
pub mod ingest;
pub mod metrics;
pub mod nullmodel;
pub mod stats;
pub mod topo;

pub use error::{Error, Result};
pub use graph::{BuildReport, Dag, Digraph, FieldVector, GraphBuilder, NodeDate, NodeId, NodeMeta};
pub use topo::GenerationAssignment;

#[cfg(test)]
pub(crate) mod testutil;
