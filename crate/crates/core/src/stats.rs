//! Correlation coefficients, bootstrap resampling and quantile comparison.
//!
//! Randomness uses `ChaCha8Rng` seeded through `SeedableRng::seed_from_u64`.
//! Bootstrap replicate `i` of a run with base seed `s` uses seed `s + i`
//! (wrapping); independent streams within one command come from
//! [`derive_seed`].

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::format::fmt_g;
use crate::graph::NodeId;

pub const DEFAULT_REPLICATES: usize = 1000;

/// Name recorded alongside two-sample test results.
pub const TWO_SAMPLE_METHOD: &str = "bootstrap-t, shift null";

/// splitmix64 finaliser.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for sub-stream `stream` of a run seeded with `base`.
pub fn derive_seed(base: u64, stream: u64) -> u64 {
    mix(base ^ mix(stream))
}

pub(crate) fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn mean(x: &[f64]) -> Option<f64> {
    (!x.is_empty()).then(|| x.iter().sum::<f64>() / x.len() as f64)
}

/// Sample standard deviation (n − 1 denominator).
pub fn sample_sd(x: &[f64]) -> Option<f64> {
    if x.len() < 2 {
        return None;
    }
    let m = mean(x)?;
    let ss: f64 = x.iter().map(|v| (v - m) * (v - m)).sum();
    Some((ss / (x.len() - 1) as f64).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorrelationKind {
    Pearson,
    Spearman,
    Kendall,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationResult {
    pub kind: CorrelationKind,
    /// `None` when either input has zero variance.
    pub coefficient: Option<f64>,
    /// Two-sided.
    pub p_value: Option<f64>,
    pub n: usize,
}

/// Product-moment correlation; `None` on zero variance or fewer than two points.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    assert_eq!(x.len(), y.len());
    let mx = mean(x)?;
    let my = mean(y)?;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return None;
    }
    Some((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// 1-based ranks with ties given their average rank.
pub fn average_ranks(x: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = vec![0.0; x.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && x[order[j]] == x[order[i]] {
            j += 1;
        }
        let r = (i + j + 1) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = r;
        }
        i = j;
    }
    ranks
}

pub fn spearman(x: &[f64], y: &[f64]) -> Option<f64> {
    pearson(&average_ranks(x), &average_ranks(y))
}

/// Counts for tau-b and its variance.
#[derive(Debug, Clone, Copy, Default)]
struct KendallCounts {
    /// concordant − discordant
    s: f64,
    /// Σ t(t−1)/2 over tie groups in x, in y.
    tx: f64,
    ty: f64,
    /// Σ t(t−1)(2t+5) and Σ t(t−1)(t−2) over tie groups.
    x1: f64,
    y1: f64,
    x2: f64,
    y2: f64,
}

fn tie_sums(sorted: &[f64]) -> (f64, f64, f64) {
    let (mut pairs, mut v1, mut v2) = (0.0, 0.0, 0.0);
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i + 1;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        let t = (j - i) as f64;
        pairs += t * (t - 1.0) / 2.0;
        v1 += t * (t - 1.0) * (2.0 * t + 5.0);
        v2 += t * (t - 1.0) * (t - 2.0);
        i = j;
    }
    (pairs, v1, v2)
}

/// Merge sort counting inversions (strict).
fn sort_count_swaps(v: &mut [f64], buf: &mut Vec<f64>) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut swaps = sort_count_swaps(&mut v[..mid], buf) + sort_count_swaps(&mut v[mid..], buf);
    buf.clear();
    let (mut i, mut j) = (0, mid);
    while i < mid && j < n {
        if v[j] < v[i] {
            swaps += (mid - i) as u64;
            buf.push(v[j]);
            j += 1;
        } else {
            buf.push(v[i]);
            i += 1;
        }
    }
    buf.extend_from_slice(&v[i..mid]);
    buf.extend_from_slice(&v[j..n]);
    v.copy_from_slice(buf);
    swaps
}

/// Knight's O(n log n) algorithm.
fn kendall_counts(x: &[f64], y: &[f64]) -> KendallCounts {
    let n = x.len();
    let mut pairs: Vec<(f64, f64)> = x.iter().copied().zip(y.iter().copied()).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let xs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let (tx, x1, x2) = tie_sums(&xs);
    let mut joint = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && pairs[j] == pairs[i] {
            j += 1;
        }
        let t = (j - i) as f64;
        joint += t * (t - 1.0) / 2.0;
        i = j;
    }
    let mut ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let swaps = sort_count_swaps(&mut ys, &mut Vec::with_capacity(n)) as f64;
    let (ty, y1, y2) = tie_sums(&ys);
    let n0 = n as f64 * (n as f64 - 1.0) / 2.0;
    KendallCounts {
        s: n0 - tx - ty + joint - 2.0 * swaps,
        tx,
        ty,
        x1,
        y1,
        x2,
        y2,
    }
}

pub fn kendall_tau_b(x: &[f64], y: &[f64]) -> Option<f64> {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let c = kendall_counts(x, y);
    let n0 = n * (n - 1.0) / 2.0;
    let denom = ((n0 - c.tx) * (n0 - c.ty)).sqrt();
    (denom > 0.0).then(|| (c.s / denom).clamp(-1.0, 1.0))
}

fn kendall_p_value(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let c = kendall_counts(x, y);
    let m = n * (n - 1.0);
    let var = (m * (2.0 * n + 5.0) - c.x1 - c.y1) / 18.0
        + (2.0 * c.tx) * (2.0 * c.ty) / (2.0 * m)
        + c.x2 * c.y2 / (9.0 * m * (n - 2.0));
    if var <= 0.0 {
        return None;
    }
    let z = c.s / var.sqrt();
    Some(erfc(z.abs() / std::f64::consts::SQRT_2).min(1.0))
}

fn t_p_value(r: f64, n: usize) -> f64 {
    if r.abs() >= 1.0 {
        return 0.0;
    }
    let df = (n - 2) as f64;
    let t = r * (df / (1.0 - r * r)).sqrt();
    let dist = StudentsT::new(0.0, 1.0, df).expect("positive degrees of freedom");
    (2.0 * dist.sf(t.abs())).min(1.0)
}

/// Correlation with a two-sided p-value. Requires equal lengths, n ≥ 3 and
/// finite values.
pub fn correlate(x: &[f64], y: &[f64], kind: CorrelationKind) -> Result<CorrelationResult> {
    if x.len() != y.len() {
        return Err(Error::InvalidArgument(format!(
            "correlation inputs differ in length ({} vs {})",
            x.len(),
            y.len()
        )));
    }
    let n = x.len();
    if n < 3 {
        return Err(Error::InvalidArgument(format!("correlation needs at least 3 points, got {n}")));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("correlation inputs must be finite".into()));
    }
    let (coefficient, p_value) = match kind {
        CorrelationKind::Pearson => {
            let r = pearson(x, y);
            (r, r.map(|r| t_p_value(r, n)))
        }
        CorrelationKind::Spearman => {
            let r = spearman(x, y);
            (r, r.map(|r| t_p_value(r, n)))
        }
        CorrelationKind::Kendall => {
            let r = kendall_tau_b(x, y);
            (r, r.and_then(|_| kendall_p_value(x, y)))
        }
    };
    Ok(CorrelationResult {
        kind,
        coefficient,
        p_value,
        n,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapDistribution {
    pub group_label: String,
    pub base_seed: u64,
    pub replicate_means: Vec<f64>,
}

impl BootstrapDistribution {
    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.group_label = label.into();
        self
    }

    /// Writes `replicate,mean` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["replicate", "mean"])?;
        for (i, m) in self.replicate_means.iter().enumerate() {
            w.write_record([i.to_string(), fmt_g(*m)])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn resample_mean(values: &[f64], seed: u64) -> f64 {
    let mut r = rng(seed);
    let n = values.len();
    (0..n).map(|_| values[r.gen_range(0..n)]).sum::<f64>() / n as f64
}

/// `replicates` means of size-n resamples with replacement.
pub fn bootstrap_means(values: &[f64], replicates: usize, seed: u64) -> Result<BootstrapDistribution> {
    if values.is_empty() {
        return Err(Error::InvalidArgument("cannot bootstrap an empty sample".into()));
    }
    let replicate_means = (0..replicates as u64)
        .into_par_iter()
        .map(|i| resample_mean(values, seed.wrapping_add(i)))
        .collect();
    Ok(BootstrapDistribution {
        group_label: String::new(),
        base_seed: seed,
        replicate_means,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoSampleTest {
    pub method: String,
    pub t_statistic: f64,
    pub p_value: f64,
    pub replicates: usize,
    pub a: BootstrapDistribution,
    pub b: BootstrapDistribution,
}

/// Bootstrap-t test of equal means.
///
/// The standard errors are the standard deviations of each sample's bootstrap
/// means. Under the null both samples are shifted to the pooled mean and
/// resampled; `p` is the fraction of null statistics with `|t*| ≥ |t|`.
pub fn bootstrap_two_sample_test(a: &[f64], b: &[f64], replicates: usize, seed: u64) -> Result<TwoSampleTest> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidArgument("two-sample test needs two nonempty samples".into()));
    }
    if replicates < 2 {
        return Err(Error::InvalidArgument("two-sample test needs at least 2 replicates".into()));
    }
    let dist_a = bootstrap_means(a, replicates, derive_seed(seed, 0))?.with_label("a");
    let dist_b = bootstrap_means(b, replicates, derive_seed(seed, 1))?.with_label("b");
    let (ma, mb) = (mean(a).unwrap(), mean(b).unwrap());
    let se_a = sample_sd(&dist_a.replicate_means).unwrap();
    let se_b = sample_sd(&dist_b.replicate_means).unwrap();
    let se = (se_a * se_a + se_b * se_b).sqrt();
    let diff = ma - mb;
    let (t_statistic, p_value) = if se == 0.0 {
        if diff == 0.0 {
            (0.0, 1.0)
        } else {
            (diff.signum() * f64::INFINITY, 0.0)
        }
    } else {
        let t = diff / se;
        let pooled = (a.iter().sum::<f64>() + b.iter().sum::<f64>()) / (a.len() + b.len()) as f64;
        let a0: Vec<f64> = a.iter().map(|v| v - ma + pooled).collect();
        let b0: Vec<f64> = b.iter().map(|v| v - mb + pooled).collect();
        let sa = derive_seed(seed, 2);
        let sb = derive_seed(seed, 3);
        let extreme = (0..replicates as u64)
            .into_par_iter()
            .filter(|&i| {
                let ts = (resample_mean(&a0, sa.wrapping_add(i)) - resample_mean(&b0, sb.wrapping_add(i))) / se;
                // tolerance keeps t = 0 from losing to rounding in the shift
                ts.abs() >= t.abs() - 1e-12 * t.abs().max(1.0)
            })
            .count();
        (t, extreme as f64 / replicates as f64)
    };
    Ok(TwoSampleTest {
        method: TWO_SAMPLE_METHOD.into(),
        t_statistic,
        p_value,
        replicates,
        a: dist_a,
        b: dist_b,
    })
}

/// Type-7 sample quantile of sorted data.
fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Paired quantiles at levels (i − 0.5)/q for i = 1..=q.
pub fn qq_points(a: &[f64], b: &[f64], quantiles: usize) -> Result<Vec<(f64, f64)>> {
    if a.is_empty() || b.is_empty() || quantiles == 0 {
        return Err(Error::InvalidArgument("Q-Q comparison needs two nonempty samples".into()));
    }
    let sort = |x: &[f64]| {
        let mut v = x.to_vec();
        v.sort_by(f64::total_cmp);
        v
    };
    let (sa, sb) = (sort(a), sort(b));
    Ok((1..=quantiles)
        .map(|i| {
            let p = (i as f64 - 0.5) / quantiles as f64;
            (quantile_sorted(&sa, p), quantile_sorted(&sb, p))
        })
        .collect())
}

pub type Scored = (NodeId, f64);

/// Sorts by value descending (node index ascending on ties) and returns the
/// first and last ⌈fraction·n⌉ entries, both in that order.
pub fn top_bottom_split(values: &[Scored], fraction: f64) -> Result<(Vec<Scored>, Vec<Scored>)> {
    if values.len() < 2 {
        return Err(Error::InvalidArgument("split needs at least 2 values".into()));
    }
    if !(fraction > 0.0 && fraction <= 0.5) {
        return Err(Error::InvalidArgument(format!("split fraction must be in (0, 0.5], got {fraction}")));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    // guard against 0.2 * 10 = 2.0000000000000004
    let k = ((fraction * sorted.len() as f64) - 1e-9).ceil() as usize;
    let n = sorted.len();
    Ok((sorted[..k].to_vec(), sorted[n - k..].to_vec()))
}
