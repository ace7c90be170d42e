//! Degree distributions and the out-degree/in-degree relation.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::{fmt_g, fmt_opt};
use crate::graph::Digraph;
use crate::stats::{correlate, mean, sample_sd, CorrelationKind, CorrelationResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DegreeKind {
    Total,
    In,
    Out,
}

impl DegreeKind {
    pub const ALL: [DegreeKind; 3] = [DegreeKind::Total, DegreeKind::In, DegreeKind::Out];

    pub fn name(self) -> &'static str {
        match self {
            DegreeKind::Total => "total",
            DegreeKind::In => "in",
            DegreeKind::Out => "out",
        }
    }

    pub fn degrees(self, g: &Digraph) -> Vec<usize> {
        match self {
            DegreeKind::Total => g.nodes().map(|v| g.degree(v)).collect(),
            DegreeKind::In => g.in_degrees(),
            DegreeKind::Out => g.out_degrees(),
        }
    }
}

/// Survival function: for each observed degree k, the fraction of nodes with
/// degree ≥ k.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeCcdf {
    pub kind: DegreeKind,
    pub points: Vec<(usize, f64)>,
}

impl DegreeCcdf {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["k", "value"])?;
        for &(k, f) in &self.points {
            w.write_record([k.to_string(), fmt_g(f)])?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn degree_ccdf(g: &Digraph, kind: DegreeKind) -> DegreeCcdf {
    let degrees = kind.degrees(g);
    let n = degrees.len();
    let max = degrees.iter().copied().max().unwrap_or(0);
    let mut hist = vec![0usize; max + 1];
    for d in degrees {
        hist[d] += 1;
    }
    let mut points = Vec::new();
    let mut remaining = n;
    for (k, &c) in hist.iter().enumerate() {
        if c > 0 {
            points.push((k, remaining as f64 / n as f64));
            remaining -= c;
        }
    }
    DegreeCcdf { kind, points }
}

/// Per-bin statistics over half-open bins `[edges[b], edges[b+1])`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinnedCurve {
    pub bin_edges: Vec<f64>,
    pub bin_means: Vec<Option<f64>>,
    /// Sample standard deviation over √count; absent below two members.
    pub bin_stderrs: Vec<Option<f64>>,
    pub bin_counts: Vec<usize>,
}

impl BinnedCurve {
    /// Bins `(key, value)` pairs; keys outside the edges are skipped.
    pub fn from_pairs(bin_edges: Vec<f64>, pairs: impl IntoIterator<Item = (f64, f64)>) -> Self {
        let bins = bin_edges.len().saturating_sub(1);
        let mut members: Vec<Vec<f64>> = vec![Vec::new(); bins];
        for (key, value) in pairs {
            let b = bin_edges.partition_point(|&e| e <= key);
            if b >= 1 && b <= bins {
                members[b - 1].push(value);
            }
        }
        BinnedCurve {
            bin_means: members.iter().map(|m| mean(m)).collect(),
            bin_stderrs: members
                .iter()
                .map(|m| sample_sd(m).map(|sd| sd / (m.len() as f64).sqrt()))
                .collect(),
            bin_counts: members.iter().map(Vec::len).collect(),
            bin_edges,
        }
    }

    pub fn bin_count(&self) -> usize {
        self.bin_counts.len()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["bin_left", "bin_right", "mean", "stderr", "count"])?;
        for b in 0..self.bin_count() {
            w.write_record([
                fmt_g(self.bin_edges[b]),
                fmt_g(self.bin_edges[b + 1]),
                fmt_opt(self.bin_means[b]),
                fmt_opt(self.bin_stderrs[b]),
                self.bin_counts[b].to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelfDegree {
    /// Mean in-degree per out-degree bin.
    pub curve: BinnedCurve,
    pub spearman: CorrelationResult,
}

/// Powers of three from 3^0 up to 3^5, extended until the top bin holds the
/// largest out-degree.
pub fn power_of_three_edges(max_degree: usize) -> Vec<f64> {
    let mut edges = vec![1.0];
    let mut top = 1usize;
    while edges.len() < 6 || top <= max_degree {
        top *= 3;
        edges.push(top as f64);
    }
    edges
}

/// Mean in-degree in out-degree bins `[3^k, 3^(k+1))`, and the Spearman
/// correlation between out- and in-degree over all nodes. Nodes with
/// out-degree 0 enter the correlation only.
pub fn self_degree_correlation(g: &Digraph) -> Result<SelfDegree> {
    if g.node_count() < 3 {
        return Err(Error::InvalidArgument("self-degree correlation needs at least 3 nodes".into()));
    }
    let outs: Vec<f64> = g.out_degrees().into_iter().map(|d| d as f64).collect();
    let ins: Vec<f64> = g.in_degrees().into_iter().map(|d| d as f64).collect();
    let max_out = g.out_degrees().into_iter().max().unwrap_or(0);
    let curve = BinnedCurve::from_pairs(
        power_of_three_edges(max_out),
        outs.iter().copied().zip(ins.iter().copied()),
    );
    let spearman = correlate(&outs, &ins, CorrelationKind::Spearman)?;
    Ok(SelfDegree { curve, spearman })
}
