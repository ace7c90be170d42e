//! `id,label,date` node metadata and the on-disk network layout.

use std::collections::HashMap;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Digraph, FieldVector, NodeDate, NodeId};
use crate::ingest::edgelist::{load_dense_edge_list, write_edge_list};

pub const NODES_FILE: &str = "nodes.csv";
pub const EDGES_FILE: &str = "edges.txt";

/// Maps external identifiers, as written in a metadata file, to nodes.
#[derive(Debug, Clone, Default)]
pub struct IdIndex(HashMap<String, NodeId>);

impl IdIndex {
    /// Identifiers are the dense indices themselves.
    pub fn dense(n: usize) -> Self {
        IdIndex((0..n).map(|i| (i.to_string(), NodeId::from(i))).collect())
    }

    pub fn from_source_ids(ids: &[u64]) -> Self {
        IdIndex(ids.iter().enumerate().map(|(i, id)| (id.to_string(), NodeId::from(i))).collect())
    }

    pub fn from_labels(g: &Digraph) -> Self {
        IdIndex(
            g.nodes()
                .filter_map(|v| g.label(v).map(|l| (l.to_owned(), v)))
                .collect(),
        )
    }

    pub fn get(&self, id: &str) -> Option<NodeId> {
        self.0.get(id).copied()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetadataReport {
    pub rows: usize,
    pub attached: usize,
    /// Identifiers that matched no node.
    pub unknown_ids: Vec<String>,
}

fn column(headers: &csv::StringRecord, name: &str) -> Option<usize> {
    headers.iter().position(|h| h.eq_ignore_ascii_case(name))
}

/// Attaches labels and dates from a CSV with an `id,label,date` header.
/// Empty cells leave the existing value untouched; unknown ids are reported,
/// not fatal.
pub fn load_csv_metadata<R: Read>(src: R, graph: &mut Digraph, ids: &IdIndex) -> Result<MetadataReport> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(src);
    let headers = reader.headers()?.clone();
    let id_col = column(&headers, "id").ok_or_else(|| Error::parse(1, "metadata header lacks an 'id' column"))?;
    let label_col = column(&headers, "label");
    let date_col = column(&headers, "date");
    let mut report = MetadataReport::default();
    for row in reader.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line() as usize);
        report.rows += 1;
        let id = row.get(id_col).unwrap_or_default();
        let Some(v) = ids.get(id) else {
            report.unknown_ids.push(id.to_owned());
            continue;
        };
        let label = label_col.and_then(|c| row.get(c)).filter(|s| !s.is_empty());
        let date = match date_col.and_then(|c| row.get(c)).filter(|s| !s.is_empty()) {
            Some(d) => Some(d.parse::<NodeDate>().map_err(|e| Error::parse(line, e))?),
            None => None,
        };
        let meta = graph.meta_mut();
        if let Some(l) = label {
            meta.labels[v.index()] = Some(l.to_owned());
        }
        if let Some(d) = date {
            meta.dates[v.index()] = Some(d);
        }
        report.attached += 1;
    }
    Ok(report)
}

/// A network as stored in a directory: `nodes.csv` plus `edges.txt`.
#[derive(Debug, Clone)]
pub struct StoredNetwork {
    pub graph: Digraph,
    pub source_ids: Option<Vec<u64>>,
}

pub fn write_network(dir: &Path, g: &Digraph, source_ids: Option<&[u64]>, name: &str) -> Result<()> {
    fs::create_dir_all(dir)?;
    let with_fields = g.meta().fields.iter().any(Option::is_some);
    let mut w = csv::WriterBuilder::new().from_writer(BufWriter::new(File::create(dir.join(NODES_FILE))?));
    let mut header = vec!["id", "label", "date"];
    if source_ids.is_some() {
        header.push("source_id");
    }
    if with_fields {
        header.push("fields");
    }
    w.write_record(&header)?;
    for v in g.nodes() {
        let mut rec = vec![
            v.to_string(),
            g.label(v).unwrap_or_default().to_owned(),
            g.date(v).map(|d| d.to_string()).unwrap_or_default(),
        ];
        if let Some(ids) = source_ids {
            rec.push(ids[v.index()].to_string());
        }
        if with_fields {
            rec.push(g.field(v).map(|f| f.to_string()).unwrap_or_default());
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    let mut edges = BufWriter::new(File::create(dir.join(EDGES_FILE))?);
    write_edge_list(&mut edges, g, name)?;
    edges.flush()?;
    Ok(())
}

pub fn read_network(dir: &Path) -> Result<StoredNetwork> {
    let nodes_path = dir.join(NODES_FILE);
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(BufReader::new(File::open(&nodes_path)?));
    let headers = reader.headers()?.clone();
    let id_col = column(&headers, "id").ok_or_else(|| Error::parse(1, "nodes.csv lacks an 'id' column"))?;
    let label_col = column(&headers, "label");
    let date_col = column(&headers, "date");
    let source_col = column(&headers, "source_id");
    let fields_col = column(&headers, "fields");
    let mut labels = Vec::new();
    let mut dates = Vec::new();
    let mut fields = Vec::new();
    let mut source_ids = Vec::new();
    for (k, row) in reader.records().enumerate() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line() as usize);
        let cell = |c: Option<usize>| c.and_then(|c| row.get(c)).filter(|s| !s.is_empty());
        let id: usize = row
            .get(id_col)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::parse(line, "node id must be a non-negative integer"))?;
        if id != k {
            return Err(Error::parse(line, format!("expected node id {k}, found {id}")));
        }
        labels.push(cell(label_col).map(str::to_owned));
        dates.push(match cell(date_col) {
            Some(d) => Some(d.parse::<NodeDate>().map_err(|e| Error::parse(line, e))?),
            None => None,
        });
        fields.push(match cell(fields_col) {
            Some(f) => Some(f.parse::<FieldVector>().map_err(|e| Error::parse(line, e))?),
            None => None,
        });
        if source_col.is_some() {
            let sid = cell(source_col)
                .and_then(|s| s.parse::<u64>().ok())
                .ok_or_else(|| Error::parse(line, "invalid source_id"))?;
            source_ids.push(sid);
        }
    }
    let n = labels.len();
    let edges = BufReader::new(File::open(dir.join(EDGES_FILE))?);
    let (mut graph, _) = load_dense_edge_list(edges, n)?;
    let meta = graph.meta_mut();
    meta.labels = labels;
    meta.dates = dates;
    meta.fields = fields;
    Ok(StoredNetwork {
        graph,
        source_ids: source_col.map(|_| source_ids),
    })
}

/// Writes node metadata only, for callers that already hold the edges.
pub fn write_metadata_csv<W: Write>(out: W, g: &Digraph) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["id", "label", "date"])?;
    for v in g.nodes() {
        w.write_record([
            v.to_string(),
            g.label(v).unwrap_or_default().to_owned(),
            g.date(v).map(|d| d.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
