//! Loading raw sources into graphs and cleaning them into connected DAGs.

pub mod clean;
pub mod edgelist;
pub mod metadata;
pub mod metamath;

pub use clean::{clean, Cleaned, CleaningReport};
pub use edgelist::{load_dense_edge_list, load_edge_list, write_edge_list, EdgeListLoad};
pub use metadata::{load_csv_metadata, read_network, write_network, IdIndex, MetadataReport, StoredNetwork};
pub use metamath::{parse_metamath, parse_metamath_str, theorem_network, MmStatement, StatementKind};
