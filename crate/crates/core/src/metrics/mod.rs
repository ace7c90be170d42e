//! Whole-network structural statistics.

mod clustering;
mod degree;
mod paths;

pub use clustering::{clustering_directed, clustering_undirected, DirectedClustering, UndirectedClustering};
pub use degree::{
    degree_ccdf, power_of_three_edges, self_degree_correlation, BinnedCurve, DegreeCcdf, DegreeKind, SelfDegree,
};
pub use paths::{
    assortativity, average_path_length, average_path_length_with, AssortativityMode, PathInterpretation,
    PathSampling,
};

use serde::{Deserialize, Serialize};

use crate::graph::Digraph;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct AssortativityReport {
    pub undirected: Option<f64>,
    pub out_out: Option<f64>,
    pub out_in: Option<f64>,
    pub in_out: Option<f64>,
    pub in_in: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub node_count: usize,
    pub link_count: usize,
    pub density: f64,
    pub max_degree: usize,
    pub max_in_degree: usize,
    pub max_out_degree: usize,
    pub average_degree: f64,
    pub average_path_length_directed: Option<f64>,
    pub average_path_length_undirected: Option<f64>,
    pub clustering_directed_average: f64,
    pub clustering_directed_global: f64,
    pub clustering_undirected_average: f64,
    pub clustering_undirected_global: f64,
    pub assortativity: AssortativityReport,
    pub self_degree_spearman: Option<f64>,
    pub self_degree_p_value: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SummaryOptions {
    /// Path lengths need one BFS per source and dominate the cost.
    pub path_lengths: bool,
    pub sampling: PathSampling,
}

impl Default for SummaryOptions {
    fn default() -> Self {
        SummaryOptions {
            path_lengths: true,
            sampling: PathSampling::default(),
        }
    }
}

pub fn summary(g: &Digraph, opts: &SummaryOptions) -> MetricsReport {
    let n = g.node_count();
    let m = g.edge_count();
    let directed = clustering_directed(g);
    let undirected = clustering_undirected(g);
    let path = |interp| {
        if opts.path_lengths {
            average_path_length_with(g, interp, &opts.sampling).ok()
        } else {
            None
        }
    };
    let self_degree = self_degree_correlation(g).ok();
    MetricsReport {
        node_count: n,
        link_count: m,
        density: if n > 1 { m as f64 / (n as f64 * (n as f64 - 1.0)) } else { 0.0 },
        max_degree: g.nodes().map(|v| g.degree(v)).max().unwrap_or(0),
        max_in_degree: g.in_degrees().into_iter().max().unwrap_or(0),
        max_out_degree: g.out_degrees().into_iter().max().unwrap_or(0),
        average_degree: if n > 0 { 2.0 * m as f64 / n as f64 } else { 0.0 },
        average_path_length_directed: path(PathInterpretation::DirectedReachable),
        average_path_length_undirected: path(PathInterpretation::Undirected),
        clustering_directed_average: directed.average,
        clustering_directed_global: directed.global,
        clustering_undirected_average: undirected.average,
        clustering_undirected_global: undirected.global,
        assortativity: AssortativityReport {
            undirected: assortativity(g, AssortativityMode::Undirected),
            out_out: assortativity(g, AssortativityMode::OutOut),
            out_in: assortativity(g, AssortativityMode::OutIn),
            in_out: assortativity(g, AssortativityMode::InOut),
            in_in: assortativity(g, AssortativityMode::InIn),
        },
        self_degree_spearman: self_degree.as_ref().and_then(|s| s.spearman.coefficient),
        self_degree_p_value: self_degree.as_ref().and_then(|s| s.spearman.p_value),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::arb_dag;
    use proptest::prelude::*;

    #[test]
    fn single_edge_summary() {
        let (g, _) = Digraph::from_edges(2, [(1, 0)]).unwrap();
        let r = summary(&g, &SummaryOptions::default());
        assert_eq!(r.density, 0.5);
        assert_eq!(r.average_degree, 1.0);
        assert_eq!(r.average_path_length_directed, Some(1.0));
        assert_eq!(r.self_degree_spearman, None);
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"density\":0.5"));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]

        #[test]
        fn dag_directed_clustering_is_half_undirected(dag in arb_dag(25, 0.3)) {
            let d = clustering_directed(&dag);
            let u = clustering_undirected(&dag);
            prop_assert!((d.average - u.average / 2.0).abs() < 1e-9);
            for v in dag.nodes() {
                prop_assert!(!dag.successors(v).iter().any(|&t| dag.has_edge(t, v)));
            }
        }

        #[test]
        fn ccdf_is_monotone(dag in arb_dag(25, 0.3)) {
            for kind in DegreeKind::ALL {
                let c = degree_ccdf(&dag, kind);
                prop_assert_eq!(c.points[0].1, 1.0);
                prop_assert!(c.points.windows(2).all(|w| w[0].1 > w[1].1 && w[0].0 < w[1].0));
            }
        }

        #[test]
        fn assortativity_in_range(dag in arb_dag(25, 0.3)) {
            for mode in AssortativityMode::ALL {
                if let Some(r) = assortativity(&dag, mode) {
                    prop_assert!((-1.0..=1.0).contains(&r));
                }
            }
        }
    }
}
