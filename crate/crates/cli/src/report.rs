use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::Args;
use knownet::format::fmt_opt;
use serde::Serialize;
use serde_json::Value;

use crate::analyze::{ANALYSIS_FILE, ANALYSIS_SCHEMA};
use crate::error::{CliError, CliResult};
use crate::output::{producer, Manifest, Staging};
use crate::OutArgs;

#[derive(Args, Debug, Serialize)]
pub struct ReportArgs {
    /// Output directories of `analyze --metrics`, one per column.
    #[arg(long, num_args = 1.., required = true)]
    inputs: Vec<PathBuf>,
    #[command(flatten)]
    #[serde(skip)]
    out: OutArgs,
}

/// Rows of the comparison: a label and a JSON pointer into `metrics.json`.
const ROWS: &[(&str, &str)] = &[
    ("nodes", "/summary/node_count"),
    ("links", "/summary/link_count"),
    ("density", "/summary/density"),
    ("average_degree", "/summary/average_degree"),
    ("max_degree", "/summary/max_degree"),
    ("max_in_degree", "/summary/max_in_degree"),
    ("max_out_degree", "/summary/max_out_degree"),
    ("average_path_length_directed", "/summary/average_path_length_directed"),
    ("average_path_length_undirected", "/summary/average_path_length_undirected"),
    ("clustering_directed_average", "/summary/clustering_directed_average"),
    ("clustering_directed_global", "/summary/clustering_directed_global"),
    ("clustering_undirected_average", "/summary/clustering_undirected_average"),
    ("clustering_undirected_global", "/summary/clustering_undirected_global"),
    ("assortativity_undirected", "/summary/assortativity/undirected"),
    ("assortativity_out_out", "/summary/assortativity/out_out"),
    ("assortativity_out_in", "/summary/assortativity/out_in"),
    ("assortativity_in_out", "/summary/assortativity/in_out"),
    ("assortativity_in_in", "/summary/assortativity/in_in"),
    ("self_degree_spearman", "/summary/self_degree_spearman"),
    ("self_degree_p_value", "/summary/self_degree_p_value"),
    ("generations", "/generations/count"),
    ("zeroth_generation_nodes", "/generations/zeroth"),
    ("disruption_mean", "/disruption/mean"),
    ("disruption_citations_pearson", "/disruption/pearson_disruption_citations/coefficient"),
    ("disruption_gini", "/disruption/gini"),
];

#[derive(Debug, Serialize)]
struct Column {
    name: String,
    path: String,
    /// `empirical` for ingested networks, `simulated` for generated ones.
    provenance: &'static str,
    disruption_mode: Option<String>,
}

#[derive(Debug, Serialize)]
struct Row {
    metric: &'static str,
    values: Vec<Value>,
}

#[derive(Debug, Serialize)]
struct Report {
    schema: &'static str,
    columns: Vec<Column>,
    rows: Vec<Row>,
}

fn load(path: &PathBuf) -> CliResult<Value> {
    let file = path.join(ANALYSIS_FILE);
    let text = fs::read_to_string(&file).map_err(|e| CliError::usage(format!("{}: {e}", file.display())))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| CliError::usage(format!("{}: {e}", file.display())))?;
    if v.get("schema").and_then(Value::as_str) != Some(ANALYSIS_SCHEMA) {
        return Err(CliError::usage(format!("{}: not a {ANALYSIS_SCHEMA} file", file.display())));
    }
    if v.get("summary").map_or(true, Value::is_null) {
        return Err(CliError::usage(format!(
            "{}: no summary section; run analyze with --metrics",
            file.display()
        )));
    }
    Ok(v)
}

pub fn run(args: &ReportArgs) -> CliResult<()> {
    if args.inputs.len() < 2 {
        return Err(CliError::usage("report needs at least two analyzed networks"));
    }
    let mut manifest = Manifest::new("report", args)?;
    let mut docs = Vec::new();
    let mut columns = Vec::new();
    for path in &args.inputs {
        let doc = load(path)?;
        manifest.input(&path.join(ANALYSIS_FILE))?;
        // the analyzed network's own manifest says how it was made
        let network = doc.get("network").and_then(Value::as_str).map(PathBuf::from);
        let made_by = doc
            .get("producer")
            .and_then(Value::as_str)
            .map(str::to_owned)
            .or_else(|| network.as_deref().and_then(producer));
        let provenance = match made_by.as_deref() {
            Some("simulate") => "simulated",
            Some("ingest") => "empirical",
            _ => "unknown",
        };
        columns.push(Column {
            name: path
                .file_name()
                .map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned()),
            path: path.display().to_string(),
            provenance,
            disruption_mode: doc.pointer("/disruption/mode").and_then(Value::as_str).map(str::to_owned),
        });
        docs.push(doc);
    }
    let rows: Vec<Row> = ROWS
        .iter()
        .map(|&(metric, pointer)| Row {
            metric,
            values: docs.iter().map(|d| d.pointer(pointer).cloned().unwrap_or(Value::Null)).collect(),
        })
        .collect();

    let staging = Staging::new(&args.out.out, args.out.force)?;
    let mut csv = staging.create("report.csv")?;
    let header: Vec<&str> = columns.iter().map(|c| c.name.as_str()).collect();
    writeln!(csv, "metric,{}", header.iter().map(|h| quote(h)).collect::<Vec<_>>().join(","))?;
    for row in &rows {
        let cells: Vec<String> = row.values.iter().map(|v| fmt_opt(v.as_f64())).collect();
        writeln!(csv, "{},{}", row.metric, cells.join(","))?;
    }
    csv.flush()?;
    drop(csv);
    staging.write_json(
        "report.json",
        &Report {
            schema: "knownet.report/1",
            columns,
            rows,
        },
    )?;
    staging.commit(manifest)
}

fn quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}
