//! Inequality and grouped correlation analyses over disruption records.

use std::collections::HashMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::{fmt_g, fmt_opt};
use crate::graph::NodeId;
use crate::stats::pearson;
use crate::topo::GenerationAssignment;

use super::{DisruptionRecord, PreferenceRecord};

/// Gini coefficient of nonnegative values; `None` below two values or when
/// all are zero.
pub fn gini(values: &[f64]) -> Option<f64> {
    let n = values.len();
    if n < 2 {
        return None;
    }
    let mut x = values.to_vec();
    x.sort_by(f64::total_cmp);
    let total: f64 = x.iter().sum();
    if total <= 0.0 {
        return None;
    }
    // Σ_ij |x_i − x_j| = 2 Σ_i (2i − n + 1) x_(i) over ascending order
    let pairwise: f64 = 2.0 * x.iter().enumerate().map(|(i, v)| (2.0 * i as f64 - n as f64 + 1.0) * v).sum::<f64>();
    let mean = total / n as f64;
    Some(pairwise / (2.0 * (n * n) as f64 * mean))
}

/// Gini of defined disruption values mapped to `[0, 1]` by `(d + 1)/2`.
pub fn gini_of_disruption(records: &[DisruptionRecord]) -> Option<f64> {
    let x: Vec<f64> = records.iter().filter_map(|r| r.disruption).map(|d| (d + 1.0) / 2.0).collect();
    gini(&x)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupStat {
    pub group: usize,
    pub lower: f64,
    pub upper: f64,
    /// Records with defined disruption.
    pub count: usize,
    pub mean_disruption: Option<f64>,
    /// Disruption–citations correlation; absent below three records.
    pub pearson: Option<f64>,
}

impl GroupStat {
    fn from_members(group: usize, lower: f64, upper: f64, members: &[(f64, f64)]) -> Self {
        let (d, c): (Vec<f64>, Vec<f64>) = members.iter().copied().unzip();
        GroupStat {
            group,
            lower,
            upper,
            count: members.len(),
            mean_disruption: crate::stats::mean(&d),
            pearson: if members.len() >= 3 { pearson(&d, &c) } else { None },
        }
    }
}

pub fn write_groups_csv<W: Write>(out: W, groups: &[GroupStat]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["group", "lower", "upper", "count", "mean_disruption", "pearson"])?;
    for g in groups {
        w.write_record([
            g.group.to_string(),
            fmt_g(g.lower),
            fmt_g(g.upper),
            g.count.to_string(),
            fmt_opt(g.mean_disruption),
            fmt_opt(g.pearson),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Number of generations trimmed from each end before grouping.
pub const EVOLUTION_MARGIN: u32 = 10;

/// Groups nodes by generation into `groups` equal-width, left-closed
/// intervals over `[10, G − 10)`, where G is the generation count.
pub fn grouped_evolution(
    gen: &GenerationAssignment,
    records: &[DisruptionRecord],
    groups: usize,
) -> Result<Vec<GroupStat>> {
    let count = gen.generation_count();
    if count <= 2 * EVOLUTION_MARGIN {
        return Err(Error::InvalidArgument(format!(
            "grouping by generation needs more than {} generations, got {count}",
            2 * EVOLUTION_MARGIN
        )));
    }
    if groups == 0 {
        return Err(Error::InvalidArgument("group count must be positive".into()));
    }
    let lo = f64::from(EVOLUTION_MARGIN);
    let hi = f64::from(count - EVOLUTION_MARGIN);
    let bounds: Vec<f64> = (0..=groups).map(|k| lo + k as f64 * (hi - lo) / groups as f64).collect();
    let mut members: Vec<Vec<(f64, f64)>> = vec![Vec::new(); groups];
    for r in records {
        let Some(d) = r.disruption else { continue };
        let g = f64::from(gen.of(r.node));
        if let Some(b) = interval_of(&bounds, g) {
            members[b].push((d, r.citations as f64));
        }
    }
    Ok(members
        .iter()
        .enumerate()
        .map(|(b, m)| GroupStat::from_members(b, bounds[b], bounds[b + 1], m))
        .collect())
}

/// Index of the interval `[bounds[b], bounds[b+1])` holding `x`.
pub(crate) fn interval_of(bounds: &[f64], x: f64) -> Option<usize> {
    let b = bounds.partition_point(|&e| e <= x);
    (b >= 1 && b < bounds.len()).then(|| b - 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PreferenceKey {
    Popularity,
    Age,
}

/// Splits nodes with both a preference record and defined disruption into
/// `groups` equal-count groups by ascending key (node index breaks ties).
/// Group `k` takes positions `[k·n/groups, (k+1)·n/groups)`.
pub fn grouped_by_preference(
    preferences: &[PreferenceRecord],
    records: &[DisruptionRecord],
    key: PreferenceKey,
    groups: usize,
) -> Result<Vec<GroupStat>> {
    let by_node: HashMap<NodeId, &DisruptionRecord> = records.iter().map(|r| (r.node, r)).collect();
    let mut joined: Vec<(f64, NodeId, f64, f64)> = preferences
        .iter()
        .filter_map(|p| {
            let r = by_node.get(&p.node)?;
            let k = match key {
                PreferenceKey::Popularity => p.reference_popularity,
                PreferenceKey::Age => p.reference_age,
            };
            Some((k, p.node, r.disruption?, r.citations as f64))
        })
        .collect();
    if groups == 0 || joined.len() < groups {
        return Err(Error::InvalidArgument(format!(
            "{} records cannot form {groups} groups",
            joined.len()
        )));
    }
    joined.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let n = joined.len();
    Ok((0..groups)
        .map(|k| {
            let part = &joined[k * n / groups..(k + 1) * n / groups];
            let members: Vec<(f64, f64)> = part.iter().map(|m| (m.2, m.3)).collect();
            GroupStat::from_members(k, part[0].0, part[part.len() - 1].0, &members)
        })
        .collect())
}
