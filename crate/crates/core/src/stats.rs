//! Rank statistics, box-plot summaries and gender-over-time tables.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use thiserror::Error;

use crate::corpus::{Corpus, Gender};
use crate::emotion::{EMOTION_COLUMNS, EMOTION_DIM};

#[derive(Debug, Clone, Error, PartialEq, Eq, Serialize, Deserialize)]
pub enum StatsError {
    #[error("input contains a non-finite value")]
    NonFinite,
    #[error("input is empty")]
    Empty,
    #[error("all pooled values are identical; the test statistic has zero variance")]
    Degenerate,
}

fn check_finite(values: &[f64]) -> Result<(), StatsError> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(StatsError::NonFinite)
    }
}

/// 1-based ranks with tied values sharing the mean of the ranks they span.
pub fn rank_with_ties(values: &[f64]) -> Result<Vec<f64>, StatsError> {
    if values.is_empty() {
        return Err(StatsError::Empty);
    }
    check_finite(values)?;
    Ok(ranks_and_ties(values).0)
}

/// Average ranks plus the sizes of every tie group (groups of one included).
fn ranks_and_ties(values: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut ties = Vec::new();
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // ranks start+1 ..= end
        let avg = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = avg;
        }
        ties.push(end - start);
        start = end;
    }
    (ranks, ties)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UTestResult {
    pub u1: f64,
    pub u2: f64,
    pub z: f64,
    pub p_value: f64,
    pub n1: usize,
    pub n2: usize,
}

/// U statistics and normal-approximation moments shared by the test and the
/// degenerate-row reporting.
#[derive(Debug, Clone, Copy)]
struct UStatistics {
    u1: f64,
    u2: f64,
    mean: f64,
    variance: f64,
}

fn u_statistics(a: &[f64], b: &[f64]) -> Result<UStatistics, StatsError> {
    if a.is_empty() || b.is_empty() {
        return Err(StatsError::Empty);
    }
    check_finite(a)?;
    check_finite(b)?;
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let (ranks, ties) = ranks_and_ties(&pooled);
    let n1 = a.len() as f64;
    let n2 = b.len() as f64;
    let n = n1 + n2;
    // Rank sums are multiples of 0.5 and stay exact in f64 at these sizes.
    let r1: f64 = ranks[..a.len()].iter().sum();
    let u1 = r1 - n1 * (n1 + 1.0) / 2.0;
    let u2 = n1 * n2 - u1;
    let tie_term: f64 = ties
        .iter()
        .map(|&t| {
            let t = t as f64;
            t * t * t - t
        })
        .sum();
    let variance = n1 * n2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    Ok(UStatistics {
        u1,
        u2,
        mean: n1 * n2 / 2.0,
        variance: if variance.is_finite() { variance } else { 0.0 },
    })
}

/// Two-sided Mann-Whitney U test. `u1` counts pairs where the `group_a`
/// value is larger (ties count half). The p-value comes from the normal
/// approximation with tie-corrected variance and a 0.5 continuity correction;
/// `z` carries the sign of `u1 - n1*n2/2`.
pub fn mann_whitney_u(group_a: &[f64], group_b: &[f64]) -> Result<UTestResult, StatsError> {
    let s = u_statistics(group_a, group_b)?;
    if s.variance <= 0.0 {
        return Err(StatsError::Degenerate);
    }
    let diff = s.u1 - s.mean;
    let corrected = (diff.abs() - 0.5).max(0.0);
    let z = corrected.copysign(diff) / s.variance.sqrt();
    let std_normal = Normal::new(0.0, 1.0).expect("unit normal");
    let p_value = (2.0 * std_normal.sf(z.abs())).clamp(0.0, 1.0);
    Ok(UTestResult {
        u1: s.u1,
        u2: s.u2,
        z,
        p_value,
        n1: group_a.len(),
        n2: group_b.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxSummary {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub outliers: Vec<f64>,
}

/// Linear interpolation between order statistics at position `q * (n-1)`.
fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

/// Quartiles by linear interpolation; values beyond 1.5 IQR from the box are
/// outliers and whiskers (min/max) span the remaining values.
pub fn box_summary(values: &[f64]) -> Result<BoxSummary, StatsError> {
    if values.is_empty() {
        return Err(StatsError::Empty);
    }
    check_finite(values)?;
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let q1 = quantile_sorted(&sorted, 0.25);
    let median = quantile_sorted(&sorted, 0.5);
    let q3 = quantile_sorted(&sorted, 0.75);
    let iqr = q3 - q1;
    let (lo_fence, hi_fence) = (q1 - 1.5 * iqr, q3 + 1.5 * iqr);
    let (inliers, outliers): (Vec<f64>, Vec<f64>) = sorted
        .iter()
        .partition(|&&v| v >= lo_fence && v <= hi_fence);
    Ok(BoxSummary {
        min: inliers[0],
        q1,
        median,
        q3,
        max: inliers[inliers.len() - 1],
        outliers,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeBinRow {
    pub bin_start: i32,
    pub bin_end: i32,
    pub female: usize,
    pub male: usize,
    pub unknown: usize,
    pub female_pct: f64,
}

/// Character counts per year bin `[k*w, k*w + w - 1]`. Bins without any
/// character are omitted; unknown-gender characters are counted separately
/// and left out of the percentage.
pub fn gender_distribution_over_time(corpus: &Corpus, bin_width: u32) -> Vec<TimeBinRow> {
    let w = bin_width.max(1) as i32;
    let mut bins: BTreeMap<i32, [usize; 3]> = BTreeMap::new();
    for r in &corpus.records {
        let start = r.year.div_euclid(w) * w;
        let slot = bins.entry(start).or_default();
        match r.gender {
            Gender::Female => slot[0] += 1,
            Gender::Male => slot[1] += 1,
            Gender::Unknown => slot[2] += 1,
        }
    }
    bins.into_iter()
        .map(|(start, [female, male, unknown])| {
            let denom = female + male;
            TimeBinRow {
                bin_start: start,
                bin_end: start + w - 1,
                female,
                male,
                unknown,
                female_pct: if denom > 0 {
                    100.0 * female as f64 / denom as f64
                } else {
                    0.0
                },
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HigherGroup {
    A,
    B,
    Neither,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatteryRow {
    pub emotion: String,
    pub column: usize,
    pub n1: usize,
    pub n2: usize,
    /// `u1`/`u2` are reported even when the test itself is degenerate.
    pub u1: f64,
    pub u2: f64,
    pub test: Result<UTestResult, StatsError>,
    /// Group whose values tend to be larger (`u1` vs `u2`).
    pub higher: HigherGroup,
}

impl BatteryRow {
    pub fn p_value(&self) -> Option<f64> {
        self.test.as_ref().ok().map(|t| t.p_value)
    }
}

/// Runs one U test per emotion column comparing rows labelled `A` (first
/// group) against rows labelled `B`. Rows are ordered by p-value ascending,
/// degenerate columns last, ties by column order. `labels` entries that are
/// `None` are skipped.
pub fn emotion_test_battery(
    matrix: &[[f64; EMOTION_DIM]],
    labels: &[Option<HigherGroup>],
) -> Result<Vec<BatteryRow>, StatsError> {
    assert_eq!(matrix.len(), labels.len(), "one label per row");
    let mut rows = Vec::with_capacity(EMOTION_DIM);
    for (column, name) in EMOTION_COLUMNS.iter().enumerate() {
        let mut a = Vec::new();
        let mut b = Vec::new();
        for (row, label) in matrix.iter().zip(labels) {
            match label {
                Some(HigherGroup::A) => a.push(row[column]),
                Some(HigherGroup::B) => b.push(row[column]),
                _ => {}
            }
        }
        let s = u_statistics(&a, &b)?;
        let test = mann_whitney_u(&a, &b);
        let higher = match s.u1.partial_cmp(&s.u2) {
            Some(Ordering::Greater) => HigherGroup::A,
            Some(Ordering::Less) => HigherGroup::B,
            _ => HigherGroup::Neither,
        };
        rows.push(BatteryRow {
            emotion: name.to_string(),
            column,
            n1: a.len(),
            n2: b.len(),
            u1: s.u1,
            u2: s.u2,
            test,
            higher,
        });
    }
    rows.sort_by(|x, y| match (x.p_value(), y.p_value()) {
        (Some(p), Some(q)) => p.total_cmp(&q).then(x.column.cmp(&y.column)),
        (Some(_), None) => Ordering::Less,
        (None, Some(_)) => Ordering::Greater,
        (None, None) => x.column.cmp(&y.column),
    });
    Ok(rows)
}
