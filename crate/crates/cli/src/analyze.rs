use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use knownet::disruption::{
    defined_pairs, disruption_by_date, disruption_full, disruption_windowed, gini_of_disruption, grouped_by_preference,
    grouped_evolution, reference_metrics, write_disruption_csv, write_groups_csv, write_preference_csv,
    DisruptionRecord, PreferenceKey, DEFAULT_WINDOW,
};
use knownet::ingest::metadata::{EDGES_FILE, NODES_FILE};
use knownet::ingest::read_network;
use knownet::metrics::{degree_ccdf, self_degree_correlation, summary, DegreeKind, MetricsReport, PathSampling, SummaryOptions};
use knownet::stats::{
    bootstrap_two_sample_test, correlate, derive_seed, mean, qq_points, top_bottom_split, CorrelationKind,
    CorrelationResult, TwoSampleTest, DEFAULT_REPLICATES,
};
use knownet::format::fmt_g;
use knownet::topo::topological_generations;
use knownet::{Dag, NodeId};
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::output::{producer, Manifest, Staging};
use crate::OutArgs;

pub const ANALYSIS_FILE: &str = "metrics.json";
pub const ANALYSIS_SCHEMA: &str = "knownet.analysis/1";
const QQ_QUANTILES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Full,
    Windowed,
    Date,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupArg {
    Evolution,
    Popularity,
    Age,
}

impl GroupArg {
    fn name(self) -> &'static str {
        match self {
            GroupArg::Evolution => "evolution",
            GroupArg::Popularity => "popularity",
            GroupArg::Age => "age",
        }
    }
}

#[derive(Args, Debug, Serialize)]
pub struct AnalyzeArgs {
    /// Network directory written by `ingest` or `simulate`.
    #[arg(long)]
    network: PathBuf,
    /// Whole-network statistics and degree CCDFs.
    #[arg(long)]
    metrics: bool,
    /// Include average shortest-path lengths in the statistics.
    #[arg(long, requires = "metrics")]
    path_lengths: bool,
    /// Disruption variant; defaults to windowed when another option needs disruption.
    #[arg(long, value_enum)]
    disruption: Option<ModeArg>,
    /// Window in generations (windowed, default 10) or calendar years (date, default none).
    #[arg(long)]
    window: Option<u32>,
    /// Gini coefficient of the normalized disruption values.
    #[arg(long)]
    gini: bool,
    /// Binned self-degree curve and out/in-degree Spearman correlation.
    #[arg(long)]
    self_degree: bool,
    /// Grouped disruption analyses; repeatable.
    #[arg(long, value_enum)]
    groups: Vec<GroupArg>,
    /// Group count; defaults to 10 for evolution and 5 otherwise.
    #[arg(long)]
    group_count: Option<usize>,
    /// Bootstrap comparisons of the top and bottom groups: in-degree by
    /// out-degree, and disruption by citations.
    #[arg(long)]
    bootstrap: bool,
    #[arg(long, default_value_t = DEFAULT_REPLICATES)]
    replicates: usize,
    /// Share of nodes in each of the top and bottom groups.
    #[arg(long, default_value_t = 0.2)]
    fraction: f64,
    /// Compare full-history disruption by generation and by date.
    #[arg(long)]
    compare_dates: bool,
    /// Base seed for bootstrap replicates and sampled path lengths.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    #[serde(skip)]
    out: OutArgs,
}

#[derive(Debug, Serialize)]
struct GenerationSummary {
    count: u32,
    zeroth: usize,
    layer_sizes: Vec<usize>,
}

#[derive(Debug, Serialize)]
struct SelfDegreeSummary {
    spearman: CorrelationResult,
    first_bin_mean_in_degree: Option<f64>,
}

#[derive(Debug, Serialize)]
struct DisruptionSummary {
    mode: String,
    defined: usize,
    undefined: usize,
    mean: Option<f64>,
    pearson_disruption_citations: Option<CorrelationResult>,
    gini: Option<f64>,
    undefined_rule: &'static str,
}

#[derive(Debug, Serialize)]
struct TestSummary {
    method: String,
    grouping: &'static str,
    value: &'static str,
    fraction: f64,
    top_size: usize,
    bottom_size: usize,
    top_mean: Option<f64>,
    bottom_mean: Option<f64>,
    t_statistic: f64,
    p_value: f64,
    replicates: usize,
    seed: u64,
}

#[derive(Debug, Serialize)]
struct DateComparison {
    pairs: usize,
    pearson: Option<CorrelationResult>,
    spearman: Option<CorrelationResult>,
    kendall: Option<CorrelationResult>,
}

/// Contents of `metrics.json`.
#[derive(Debug, Serialize)]
struct Analysis {
    schema: &'static str,
    network: String,
    producer: Option<String>,
    nodes: usize,
    links: usize,
    generations: GenerationSummary,
    summary: Option<MetricsReport>,
    self_degree: Option<SelfDegreeSummary>,
    disruption: Option<DisruptionSummary>,
    bootstrap: BTreeMap<String, TestSummary>,
    date_comparison: Option<DateComparison>,
}

/// Loads a network directory as a DAG and records its files as inputs.
pub fn load_dag(dir: &Path, manifest: Option<&mut Manifest>) -> CliResult<Dag> {
    if !dir.join(NODES_FILE).is_file() || !dir.join(EDGES_FILE).is_file() {
        return Err(CliError::usage(format!(
            "{} is not a network directory (needs {NODES_FILE} and {EDGES_FILE})",
            dir.display()
        )));
    }
    let stored = read_network(dir).map_err(CliError::at(dir))?;
    if stored.graph.node_count() == 0 {
        return Err(CliError::usage(format!("{}: network has no nodes", dir.display())));
    }
    let dag = Dag::try_from_digraph(stored.graph).map_err(CliError::at(dir))?;
    if let Some(m) = manifest {
        m.input(&dir.join(NODES_FILE))?;
        m.input(&dir.join(EDGES_FILE))?;
    }
    Ok(dag)
}

fn correlation(x: &[f64], y: &[f64], kind: CorrelationKind) -> Option<CorrelationResult> {
    correlate(x, y, kind).ok()
}

fn two_sample(
    scores: &[(NodeId, f64)],
    value: impl Fn(NodeId) -> f64,
    args: &AnalyzeArgs,
    seed: u64,
) -> CliResult<(TwoSampleTest, usize, usize, Vec<f64>, Vec<f64>)> {
    let (top, bottom) = top_bottom_split(scores, args.fraction)?;
    let a: Vec<f64> = top.iter().map(|&(v, _)| value(v)).collect();
    let b: Vec<f64> = bottom.iter().map(|&(v, _)| value(v)).collect();
    let test = bootstrap_two_sample_test(&a, &b, args.replicates, seed)?;
    Ok((test, a.len(), b.len(), a, b))
}

fn resolve_mode(args: &AnalyzeArgs) -> CliResult<Option<ModeArg>> {
    let needs = args.gini || !args.groups.is_empty() || args.bootstrap;
    let mode = args.disruption.or(needs.then_some(ModeArg::Windowed));
    if args.window.is_some() && !matches!(mode, Some(ModeArg::Windowed | ModeArg::Date)) {
        return Err(CliError::usage("--window needs --disruption windowed or date"));
    }
    if args.window == Some(0) && mode == Some(ModeArg::Windowed) {
        return Err(CliError::usage("--window must be at least 1 generation"));
    }
    if !(args.fraction > 0.0 && args.fraction <= 0.5) {
        return Err(CliError::usage("--fraction must lie in (0, 0.5]"));
    }
    if args.replicates == 0 {
        return Err(CliError::usage("--replicates must be positive"));
    }
    if args.group_count == Some(0) {
        return Err(CliError::usage("--group-count must be positive"));
    }
    Ok(mode)
}

pub fn run(args: &AnalyzeArgs) -> CliResult<()> {
    let mode = resolve_mode(args)?;
    let mut manifest = Manifest::new("analyze", args)?;
    let g = load_dag(&args.network, Some(&mut manifest))?;
    let staging = Staging::new(&args.out.out, args.out.force)?;

    let gen = topological_generations(&g)?;
    let layers = gen.layer_sizes();
    let mut analysis = Analysis {
        schema: ANALYSIS_SCHEMA,
        network: args.network.display().to_string(),
        producer: producer(&args.network),
        nodes: g.node_count(),
        links: g.edge_count(),
        generations: GenerationSummary {
            count: gen.generation_count(),
            zeroth: layers.first().copied().unwrap_or(0),
            layer_sizes: layers,
        },
        summary: None,
        self_degree: None,
        disruption: None,
        bootstrap: BTreeMap::new(),
        date_comparison: None,
    };

    if args.metrics {
        let sampling = PathSampling {
            seed: derive_seed(args.seed, 12),
            ..PathSampling::default()
        };
        if args.path_lengths {
            manifest.seed("path_sampling", sampling.seed);
        }
        let opts = SummaryOptions {
            path_lengths: args.path_lengths,
            sampling,
        };
        analysis.summary = Some(summary(&g, &opts));
        for kind in DegreeKind::ALL {
            let c = degree_ccdf(&g, kind);
            staging.write(&format!("ccdf_{}.csv", kind.name()), |w| c.write_csv(w))?;
        }
    }

    if args.self_degree {
        let sd = self_degree_correlation(&g)?;
        staging.write("self_degree.csv", |w| sd.curve.write_csv(w))?;
        analysis.self_degree = Some(SelfDegreeSummary {
            first_bin_mean_in_degree: sd.curve.bin_means.first().copied().flatten(),
            spearman: sd.spearman,
        });
    }

    if args.bootstrap {
        let seed = derive_seed(args.seed, 10);
        manifest.seed("bootstrap_in_degree", seed);
        let scores: Vec<(NodeId, f64)> = g.nodes().map(|v| (v, g.out_degree(v) as f64)).collect();
        let (test, na, nb, a, b) = two_sample(&scores, |v| g.in_degree(v) as f64, args, seed)?;
        staging.write("bootstrap_in_degree_top.csv", |w| test.a.clone().with_label("top").write_csv(w))?;
        staging.write("bootstrap_in_degree_bottom.csv", |w| test.b.clone().with_label("bottom").write_csv(w))?;
        analysis.bootstrap.insert(
            "in_degree_by_out_degree".into(),
            TestSummary {
                method: test.method.clone(),
                grouping: "out-degree",
                value: "in-degree",
                fraction: args.fraction,
                top_size: na,
                bottom_size: nb,
                top_mean: mean(&a),
                bottom_mean: mean(&b),
                t_statistic: test.t_statistic,
                p_value: test.p_value,
                replicates: args.replicates,
                seed,
            },
        );
    }

    if let Some(mode) = mode {
        let records: Vec<DisruptionRecord> = match mode {
            ModeArg::Full => disruption_full(&g, &gen)?,
            ModeArg::Windowed => disruption_windowed(&g, &gen, args.window.unwrap_or(DEFAULT_WINDOW))?,
            ModeArg::Date => disruption_by_date(&g, args.window)?,
        };
        staging.write("disruption.csv", |w| write_disruption_csv(w, &records))?;
        let (d, c) = defined_pairs(&records);
        analysis.disruption = Some(DisruptionSummary {
            mode: records.first().map(|r| r.mode.to_string()).unwrap_or_default(),
            defined: d.len(),
            undefined: records.len() - d.len(),
            mean: mean(&d),
            pearson_disruption_citations: correlation(&d, &c, CorrelationKind::Pearson),
            gini: if args.gini { gini_of_disruption(&records) } else { None },
            undefined_rule: "nodes with undefined disruption are excluded from means, correlations, groups and the Gini coefficient",
        });

        let mut groups = args.groups.clone();
        groups.sort();
        groups.dedup();
        let needs_prefs = groups.iter().any(|&k| k != GroupArg::Evolution);
        let prefs = if needs_prefs { reference_metrics(&g, &gen)? } else { Vec::new() };
        if needs_prefs {
            staging.write("preference.csv", |w| write_preference_csv(w, &prefs))?;
        }
        for kind in groups {
            let stats = match kind {
                GroupArg::Evolution => grouped_evolution(&gen, &records, args.group_count.unwrap_or(10))?,
                GroupArg::Popularity => {
                    grouped_by_preference(&prefs, &records, PreferenceKey::Popularity, args.group_count.unwrap_or(5))?
                }
                GroupArg::Age => grouped_by_preference(&prefs, &records, PreferenceKey::Age, args.group_count.unwrap_or(5))?,
            };
            staging.write(&format!("groups_{}.csv", kind.name()), |w| write_groups_csv(w, &stats))?;
        }

        if args.bootstrap {
            let seed = derive_seed(args.seed, 11);
            manifest.seed("bootstrap_disruption", seed);
            let defined: BTreeMap<NodeId, f64> = records.iter().filter_map(|r| Some((r.node, r.disruption?))).collect();
            let scores: Vec<(NodeId, f64)> = records
                .iter()
                .filter(|r| r.disruption.is_some())
                .map(|r| (r.node, r.citations as f64))
                .collect();
            let (test, na, nb, a, b) = two_sample(&scores, |v| defined[&v], args, seed)?;
            staging.write("bootstrap_disruption_top.csv", |w| test.a.clone().with_label("top").write_csv(w))?;
            staging.write("bootstrap_disruption_bottom.csv", |w| test.b.clone().with_label("bottom").write_csv(w))?;
            analysis.bootstrap.insert(
                "disruption_by_citations".into(),
                TestSummary {
                    method: test.method.clone(),
                    grouping: "citations",
                    value: "disruption",
                    fraction: args.fraction,
                    top_size: na,
                    bottom_size: nb,
                    top_mean: mean(&a),
                    bottom_mean: mean(&b),
                    t_statistic: test.t_statistic,
                    p_value: test.p_value,
                    replicates: args.replicates,
                    seed,
                },
            );
        }
    }

    if args.compare_dates {
        let by_gen = disruption_full(&g, &gen)?;
        let by_date = disruption_by_date(&g, None)?;
        let (x, y): (Vec<f64>, Vec<f64>) = by_gen
            .iter()
            .zip(&by_date)
            .filter_map(|(a, b)| Some((a.disruption?, b.disruption?)))
            .unzip();
        if x.is_empty() {
            return Err(CliError::computation("no node has disruption defined in both variants"));
        }
        let qq = qq_points(&x, &y, QQ_QUANTILES)?;
        staging.write("qq_generation_vs_date.csv", |w| write_qq(w, &qq))?;
        analysis.date_comparison = Some(DateComparison {
            pairs: x.len(),
            pearson: correlation(&x, &y, CorrelationKind::Pearson),
            spearman: correlation(&x, &y, CorrelationKind::Spearman),
            kendall: correlation(&x, &y, CorrelationKind::Kendall),
        });
    }

    staging.write_json(ANALYSIS_FILE, &analysis)?;
    staging.commit(manifest)?;
    eprintln!(
        "analyzed {} nodes, {} links, {} generations",
        analysis.nodes, analysis.links, analysis.generations.count
    );
    Ok(())
}

fn write_qq<W: std::io::Write>(mut out: W, points: &[(f64, f64)]) -> knownet::Result<()> {
    writeln!(out, "level,generation,date")?;
    let n = points.len() as f64;
    for (i, &(a, b)) in points.iter().enumerate() {
        writeln!(out, "{},{},{}", fmt_g((i as f64 + 0.5) / n), fmt_g(a), fmt_g(b))?;
    }
    Ok(())
}
