use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use knownet::ingest::metamath::{apply_field_sidecar, kind_counts};
use knownet::ingest::{
    clean, load_csv_metadata, load_edge_list, parse_metamath, theorem_network, write_network, CleaningReport, IdIndex,
    MetadataReport,
};
use knownet::Digraph;
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::output::{Manifest, Staging};
use crate::OutArgs;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InputFormat {
    Metamath,
    Edgelist,
}

#[derive(Args, Debug, Serialize)]
pub struct IngestArgs {
    #[arg(long, value_enum)]
    format: InputFormat,
    #[arg(long)]
    input: PathBuf,
    /// `id,label,date` CSV keyed by edge-list identifier or statement label.
    #[arg(long)]
    metadata: Option<PathBuf>,
    /// Metamath only: `label,field` CSV assigning statements to fields.
    #[arg(long)]
    fields: Option<PathBuf>,
    /// Remove isolates, keep the largest weak component, break cycles.
    #[arg(long)]
    clean: bool,
    /// Network name for the edge-list header; defaults to the input's stem.
    #[arg(long)]
    name: Option<String>,
    #[command(flatten)]
    #[serde(skip)]
    out: OutArgs,
}

/// Contents of `cleaning.json`.
#[derive(Debug, Serialize)]
struct IngestReport {
    format: InputFormat,
    parsed_nodes: usize,
    parsed_edges: usize,
    duplicates_dropped: usize,
    self_loops_rejected: usize,
    statements: Option<BTreeMap<String, usize>>,
    unknown_field_labels: Option<Vec<String>>,
    metadata: Option<MetadataReport>,
    cleaned: bool,
    cleaning: Option<CleaningReport>,
    nodes: usize,
    edges: usize,
}

fn open(path: &Path) -> CliResult<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

pub fn run(args: &IngestArgs) -> CliResult<()> {
    if args.fields.is_some() && args.format != InputFormat::Metamath {
        return Err(CliError::usage("--fields applies to --format metamath only"));
    }
    let input = &args.input;
    let mut report = IngestReport {
        format: args.format,
        parsed_nodes: 0,
        parsed_edges: 0,
        duplicates_dropped: 0,
        self_loops_rejected: 0,
        statements: None,
        unknown_field_labels: None,
        metadata: None,
        cleaned: args.clean,
        cleaning: None,
        nodes: 0,
        edges: 0,
    };
    let (mut graph, source_ids): (Digraph, Option<Vec<u64>>) = match args.format {
        InputFormat::Edgelist => {
            let load = load_edge_list(open(input)?).map_err(CliError::at(input))?;
            report.duplicates_dropped = load.report.duplicates_dropped;
            report.self_loops_rejected = load.report.self_loops_rejected.len();
            (load.graph, Some(load.source_ids))
        }
        InputFormat::Metamath => {
            let mut statements = parse_metamath(open(input)?).map_err(CliError::at(input))?;
            if let Some(f) = &args.fields {
                report.unknown_field_labels = Some(apply_field_sidecar(&mut statements, open(f)?).map_err(CliError::at(f))?);
            }
            report.statements = Some(
                kind_counts(&statements)
                    .into_iter()
                    .map(|(k, n)| (format!("{k:?}").to_lowercase(), n))
                    .collect(),
            );
            (theorem_network(&statements).map_err(CliError::at(input))?.into_digraph(), None)
        }
    };
    report.parsed_nodes = graph.node_count();
    report.parsed_edges = graph.edge_count();
    if let Some(m) = &args.metadata {
        let index = match &source_ids {
            Some(ids) => IdIndex::from_source_ids(ids),
            None => IdIndex::from_labels(&graph),
        };
        report.metadata = Some(load_csv_metadata(open(m)?, &mut graph, &index).map_err(CliError::at(m))?);
    }
    let (graph, source_ids) = if args.clean {
        let cleaned = clean(&graph)?;
        let ids = source_ids.map(|ids| cleaned.original.iter().map(|v| ids[v.index()]).collect::<Vec<_>>());
        report.cleaning = Some(cleaned.report);
        (cleaned.dag.into_digraph(), ids)
    } else {
        (graph, source_ids)
    };
    report.nodes = graph.node_count();
    report.edges = graph.edge_count();

    let name = args
        .name
        .clone()
        .or_else(|| input.file_stem().map(|s| s.to_string_lossy().into_owned()))
        .unwrap_or_else(|| "network".into());
    let staging = Staging::new(&args.out.out, args.out.force)?;
    write_network(staging.dir(), &graph, source_ids.as_deref(), &name)?;
    staging.write_json("cleaning.json", &report)?;

    let mut manifest = Manifest::new("ingest", args)?;
    for path in [Some(input), args.metadata.as_ref(), args.fields.as_ref()].into_iter().flatten() {
        manifest.input(path)?;
    }
    staging.commit(manifest)?;
    eprintln!("ingested {} nodes and {} edges", report.nodes, report.edges);
    Ok(())
}
