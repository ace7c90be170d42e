use std::path::PathBuf;

use clap::Args;
use knownet::genmodel::{
    calibrate, generate, link_type_stats, synthetic_seed_graph, CalibrationOutcome, CalibrationSpec, GenParams,
    LinkTypeStats, Preset, DEFAULT_SEED_NODES, DEFAULT_VECTOR_DENSITY,
};
use knownet::ingest::write_network;
use serde::Serialize;

use crate::analyze::load_dag;
use crate::error::{CliError, CliResult};
use crate::output::{Manifest, Staging};
use crate::OutArgs;

#[derive(Args, Debug, Serialize)]
pub struct SimulateArgs {
    /// Start from a named parameter set: theorem, math-citation or hep-th.
    #[arg(long)]
    preset: Option<String>,
    /// Stop probability of process A.
    #[arg(long)]
    p: Option<f64>,
    /// Local-world similarity threshold.
    #[arg(long)]
    w: Option<f64>,
    /// Initial attractiveness.
    #[arg(long)]
    a: Option<f64>,
    /// Societal copying probability.
    #[arg(long)]
    q: Option<f64>,
    /// Final node count.
    #[arg(long)]
    n: Option<usize>,
    /// Network directory to grow from; defaults to a 100-node synthetic seed graph.
    #[arg(long)]
    seed_graph: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Probability that each field-vector component is set.
    #[arg(long, default_value_t = DEFAULT_VECTOR_DENSITY)]
    vector_density: f64,
    /// Search p (and w, a over grids) to match --target-m.
    #[arg(long, requires = "target_m")]
    calibrate: bool,
    #[arg(long, requires = "calibrate")]
    target_m: Option<f64>,
    /// Comma-separated w values searched when calibrating without --w.
    #[arg(long, value_delimiter = ',')]
    w_grid: Vec<f64>,
    /// Comma-separated a values searched when calibrating without --a.
    #[arg(long, value_delimiter = ',')]
    a_grid: Vec<f64>,
    /// Realizations averaged per calibration candidate.
    #[arg(long, default_value_t = 3)]
    realizations: usize,
    /// Largest accepted relative error in M when calibrating.
    #[arg(long, default_value_t = 0.10)]
    tolerance: f64,
    /// Optional calibration target for the societal link fraction.
    #[arg(long)]
    target_societal: Option<f64>,
    /// Optional calibration target for the share of nodes with at most two logical links.
    #[arg(long)]
    target_low_logical: Option<f64>,
    #[command(flatten)]
    #[serde(skip)]
    out: OutArgs,
}

#[derive(Debug, Serialize)]
struct LinkStatsFile {
    params: GenParams,
    #[serde(flatten)]
    stats: LinkTypeStats,
}

fn resolve(args: &SimulateArgs) -> CliResult<GenParams> {
    let preset = args
        .preset
        .as_deref()
        .map(|s| s.parse::<Preset>())
        .transpose()
        .map_err(|e| CliError::usage(e.to_string()))?;
    let base = preset.map(|p| p.params(args.seed));
    let need = |v: Option<f64>, from: Option<f64>, flag: &str| {
        v.or(from).ok_or_else(|| CliError::usage(format!("--{flag} is required without --preset")))
    };
    let q = need(args.q, base.map(|b| b.q), "q")?;
    let n = args
        .n
        .or(base.map(|b| b.target_n))
        .ok_or_else(|| CliError::usage("--n is required without --preset"))?;
    let (p, w, a) = if args.calibrate {
        (args.p.or(base.map(|b| b.p)).unwrap_or(1.0), args.w.unwrap_or(0.0), args.a.unwrap_or(1.0))
    } else {
        (
            need(args.p, base.map(|b| b.p), "p")?,
            need(args.w, base.map(|b| b.w), "w")?,
            need(args.a, base.map(|b| b.a), "a")?,
        )
    };
    let mut params = GenParams::new(p, w, a, q, n, args.seed);
    params.vector_density = args.vector_density;
    params.validate()?;
    Ok(params)
}

pub fn run(args: &SimulateArgs) -> CliResult<()> {
    let mut params = resolve(args)?;
    let mut manifest = Manifest::new("simulate", args)?;
    let seed_graph = match &args.seed_graph {
        Some(dir) => load_dag(dir, Some(&mut manifest))?,
        None => synthetic_seed_graph(DEFAULT_SEED_NODES, DEFAULT_VECTOR_DENSITY, 0)?,
    };
    let staging = Staging::new(&args.out.out, args.out.force)?;
    manifest.seed("generation", args.seed);

    let mut outcome: Option<CalibrationOutcome> = None;
    if args.calibrate {
        let target = args.target_m.expect("clap enforces --target-m");
        let mut spec = CalibrationSpec::new(params.q, params.target_n, target, args.seed);
        spec.vector_density = args.vector_density;
        spec.realizations = args.realizations;
        spec.tolerance = args.tolerance;
        spec.societal_fraction = args.target_societal;
        spec.low_logical_fraction = args.target_low_logical;
        if let Some(w) = args.w {
            spec.w_grid = vec![w];
        } else if !args.w_grid.is_empty() {
            spec.w_grid = args.w_grid.clone();
        }
        if let Some(a) = args.a {
            spec.a_grid = vec![a];
        } else if !args.a_grid.is_empty() {
            spec.a_grid = args.a_grid.clone();
        }
        let out = calibrate(&spec, &seed_graph)?;
        params = out.best.params;
        params.seed = args.seed;
        eprintln!(
            "calibrated p={} w={} a={} (mean M {:.0} over {} realizations)",
            params.p, params.w, params.a, out.best.mean_m, spec.realizations
        );
        staging.write_json("calibration.json", &out)?;
        outcome = Some(out);
    }

    let g = generate(&params, &seed_graph)?;
    let stats = link_type_stats(&g);
    write_network(staging.dir(), &g.dag, None, "generated")?;
    staging.write("labeled_edges.txt", |w| g.write_edge_list(w))?;
    let file = LinkStatsFile { params, stats };
    staging.write_json("linkstats.json", &file)?;
    manifest.results = Some(serde_json::json!({
        "params": params,
        "achieved_n": file.stats.node_count,
        "achieved_m": file.stats.link_count,
        "calibrated": outcome.is_some(),
    }));
    staging.commit(manifest)?;
    eprintln!(
        "generated {} nodes, {} links ({:.2}% societal)",
        file.stats.node_count,
        file.stats.link_count,
        100.0 * file.stats.societal_fraction
    );
    Ok(())
}
