use std::path::PathBuf;

use clap::{Args, ValueEnum};
use knownet::disruption::DEFAULT_WINDOW;
use knownet::nullmodel::{ensemble, zscore, NullMetric, DEFAULT_ENSEMBLE_SIZE};
use knownet::stats::{mean, sample_sd};
use serde::Serialize;

use crate::analyze::load_dag;
use crate::error::{CliError, CliResult};
use crate::output::{Manifest, Staging};
use crate::OutArgs;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricArg {
    LinkCount,
    Clustering,
    DisruptionCorr,
    MeanDisruption,
}

impl MetricArg {
    fn file_stem(self) -> &'static str {
        match self {
            MetricArg::LinkCount => "link-count",
            MetricArg::Clustering => "clustering",
            MetricArg::DisruptionCorr => "disruption-corr",
            MetricArg::MeanDisruption => "mean-disruption",
        }
    }
}

#[derive(Args, Debug, Serialize)]
pub struct NullArgs {
    #[arg(long)]
    network: PathBuf,
    /// Number of randomized realizations.
    #[arg(long, default_value_t = DEFAULT_ENSEMBLE_SIZE)]
    ensemble: usize,
    /// Realization i uses seed + i.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Metric compared against the ensemble; repeatable.
    #[arg(long, value_enum, required = true)]
    metric: Vec<MetricArg>,
    /// Disruption window in generations.
    #[arg(long, conflicts_with = "full")]
    window: Option<u32>,
    /// Use full-history disruption instead of the windowed variant.
    #[arg(long)]
    full: bool,
    #[command(flatten)]
    #[serde(skip)]
    out: OutArgs,
}

#[derive(Debug, Serialize)]
struct MetricZ {
    metric: String,
    real: Option<f64>,
    null_mean: Option<f64>,
    null_sd: Option<f64>,
    zscore: Option<f64>,
    defined_realizations: usize,
}

#[derive(Debug, Serialize)]
struct ZScores {
    network: String,
    ensemble: usize,
    base_seed: u64,
    sd: &'static str,
    results: Vec<MetricZ>,
}

pub fn run(args: &NullArgs) -> CliResult<()> {
    if args.ensemble == 0 {
        return Err(CliError::usage("--ensemble must be positive"));
    }
    if args.window == Some(0) {
        return Err(CliError::usage("--window must be at least 1 generation"));
    }
    let window = if args.full { None } else { Some(args.window.unwrap_or(DEFAULT_WINDOW)) };
    let mut manifest = Manifest::new("null", args)?;
    let g = load_dag(&args.network, Some(&mut manifest))?;
    let staging = Staging::new(&args.out.out, args.out.force)?;
    manifest.seed("base", args.seed);

    let mut metrics = args.metric.clone();
    metrics.sort();
    metrics.dedup();
    let mut results = Vec::new();
    for arg in metrics {
        let metric = match arg {
            MetricArg::LinkCount => NullMetric::LinkCount,
            MetricArg::Clustering => NullMetric::Clustering,
            MetricArg::DisruptionCorr => NullMetric::DisruptionCorrelation(window),
            MetricArg::MeanDisruption => NullMetric::MeanDisruption(window),
        };
        let real = metric.evaluate(&g)?;
        let ens = ensemble(&g, args.ensemble, args.seed, metric)?;
        staging.write(&format!("null_{}.csv", arg.file_stem()), |w| ens.write_csv(w))?;
        let values = ens.defined_values();
        results.push(MetricZ {
            metric: metric.name(),
            real,
            null_mean: mean(&values),
            null_sd: sample_sd(&values),
            zscore: real.and_then(|r| zscore(r, &values)),
            defined_realizations: values.len(),
        });
        eprintln!("{}: done", metric.name());
    }
    staging.write_json(
        "zscores.json",
        &ZScores {
            network: args.network.display().to_string(),
            ensemble: args.ensemble,
            base_seed: args.seed,
            sd: "sample (n-1)",
            results,
        },
    )?;
    staging.commit(manifest)
}
