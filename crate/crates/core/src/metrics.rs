//! Failure counting, diversity and nonparametric statistics.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{BoundsTable, Phenotype, UseCase};
use crate::evolve::EvalRecord;
use crate::geometry::{smoothed_road, Polyline};

/// Two tests closer than this (cosine distance) are the same test.
pub const DUPLICATE_THRESHOLD: f64 = 0.025;
/// Smoothed-road segments compared around each road failure.
pub const FAILURE_WINDOW: usize = 8;
/// Curvature thresholds (1/m) separating the seven segment labels.
pub const CURVATURE_BINS: [f64; 3] = [0.01, 0.03, 0.05];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("cosine distance is undefined for a zero vector")]
    ZeroVector,
    #[error("vectors differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("sparseness needs at least 2 failures, got {0}")]
    TooFewFailures(usize),
    #[error("record {0} carries no failure location")]
    MissingLocation(usize),
    #[error("record {0} is not a road scenario")]
    NotARoad(usize),
    #[error("samples must be non-empty")]
    EmptySample,
}

/// `1 - a.b / (|a||b|)`, in `[0, 2]`.
pub fn cosine_distance(a: &[f64], b: &[f64]) -> Result<f64, MetricsError> {
    if a.len() != b.len() {
        return Err(MetricsError::LengthMismatch(a.len(), b.len()));
    }
    let (mut dot, mut na, mut nb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        return Err(MetricsError::ZeroVector);
    }
    // sqrt(x * x) == x exactly, so parallel equal vectors give exactly 0.
    Ok((1.0 - dot / (na * nb).sqrt()).clamp(0.0, 2.0))
}

/// Cosine distance extended to zero vectors: two zero vectors coincide,
/// a zero and a non-zero vector are orthogonal. Used for duplicate checks,
/// where every genome must be comparable.
pub fn cosine_distance_total(a: &[f64], b: &[f64]) -> f64 {
    match cosine_distance(a, b) {
        Ok(d) => d,
        Err(MetricsError::ZeroVector) => {
            let zero = |v: &[f64]| v.iter().all(|x| *x == 0.0);
            if zero(a) && zero(b) {
                0.0
            } else {
                1.0
            }
        }
        Err(_) => 1.0,
    }
}

/// Mean over items of the average distance to every other item.
pub fn sparseness<T>(items: &[T], mut dist: impl FnMut(&T, &T) -> Result<f64, MetricsError>) -> Result<f64, MetricsError> {
    let n = items.len();
    if n < 2 {
        return Err(MetricsError::TooFewFailures(n));
    }
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let v = dist(&items[i], &items[j])?;
            d[i * n + j] = v;
            d[j * n + i] = v;
        }
    }
    let total: f64 = (0..n)
        .map(|i| d[i * n..(i + 1) * n].iter().sum::<f64>() / (n - 1) as f64)
        .sum();
    Ok(total / n as f64)
}

/// Curvature label in `-3..=3` (negative = right turn).
pub fn curvature_bin(kappa: f64) -> i8 {
    let a = kappa.abs();
    let level = CURVATURE_BINS.iter().filter(|t| a > **t).count() as i8;
    if kappa < 0.0 {
        -level
    } else {
        level
    }
}

/// Edit distance with substitution cost `|a - b| / 6` and unit insertion
/// and deletion, divided by the longer sequence length.
pub fn weighted_levenshtein(a: &[i8], b: &[i8]) -> f64 {
    let (n, m) = (a.len(), b.len());
    if n.max(m) == 0 {
        return 0.0;
    }
    let mut prev: Vec<f64> = (0..=m).map(|j| j as f64).collect();
    let mut cur = vec![0.0; m + 1];
    for i in 1..=n {
        cur[0] = i as f64;
        for j in 1..=m {
            let sub = prev[j - 1] + f64::from((a[i - 1] - b[j - 1]).abs()) / 6.0;
            cur[j] = sub.min(prev[j] + 1.0).min(cur[j - 1] + 1.0);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[m] / n.max(m) as f64
}

/// Signed curvature of each segment of a polyline, estimated from the turn
/// between it and the next segment over their mean length. The last segment
/// repeats its predecessor's value.
pub fn segment_curvatures(line: &Polyline) -> Vec<f64> {
    let segs: Vec<_> = line.segments().map(|(a, b)| b - a).collect();
    let mut out: Vec<f64> = segs
        .windows(2)
        .map(|w| {
            let turn = w[0].cross(w[1]).atan2(w[0].dot(w[1]));
            let len = 0.5 * (w[0].norm() + w[1].norm());
            if len > 0.0 {
                turn / len
            } else {
                0.0
            }
        })
        .collect();
    if let Some(&last) = out.last() {
        out.push(last);
    } else if !segs.is_empty() {
        out.push(0.0);
    }
    out
}

/// Labels of the `FAILURE_WINDOW` smoothed-road segments centred on the
/// failure point of a road record.
pub fn failure_window(record: &EvalRecord) -> Result<Vec<i8>, MetricsError> {
    let Some(Phenotype::Road(road)) = &record.phenotype else {
        return Err(MetricsError::NotARoad(record.index));
    };
    let worst = record.worst.ok_or(MetricsError::MissingLocation(record.index))?;
    let line = smoothed_road(road);
    let labels: Vec<i8> = segment_curvatures(&line).into_iter().map(curvature_bin).collect();
    let centre = line.project(worst.position).segment;
    let n = labels.len();
    let w = FAILURE_WINDOW.min(n);
    let start = centre.saturating_sub(w / 2).min(n - w);
    Ok(labels[start..start + w].to_vec())
}

/// Weighted edit distance between the road windows around two failures.
pub fn road_failure_distance(a: &EvalRecord, b: &EvalRecord) -> Result<f64, MetricsError> {
    Ok(weighted_levenshtein(&failure_window(a)?, &failure_window(b)?))
}

/// Distance between two failures of the same use case: cosine distance of
/// min-max normalized genomes for the UAV, windowed road distance for roads.
pub fn failure_distance(use_case: UseCase, a: &EvalRecord, b: &EvalRecord) -> Result<f64, MetricsError> {
    match use_case {
        UseCase::Uav => {
            let bounds = BoundsTable::uav();
            cosine_distance(&bounds.unit_scale(&a.decoded), &bounds.unit_scale(&b.decoded))
        }
        UseCase::Ads => road_failure_distance(a, b),
    }
}

/// Failures with near-duplicates collapsed: in archive order, a failure
/// is kept unless its normalized decoded genome lies within `threshold`
/// cosine distance of one already kept.
pub fn distinct_failures<'a>(records: &'a [EvalRecord], bounds: &BoundsTable, threshold: f64) -> Vec<&'a EvalRecord> {
    let mut kept: Vec<(&EvalRecord, Vec<f64>)> = Vec::new();
    for r in records.iter().filter(|r| r.failed) {
        let v = bounds.unit_scale(&r.decoded);
        if kept.iter().all(|(_, k)| cosine_distance_total(k, &v) >= threshold) {
            kept.push((r, v));
        }
    }
    kept.into_iter().map(|(r, _)| r).collect()
}

/// Number of distinct failures at the duplicate threshold.
pub fn count_failures(records: &[EvalRecord], bounds: &BoundsTable) -> usize {
    distinct_failures(records, bounds, DUPLICATE_THRESHOLD).len()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Magnitude {
    Negligible,
    Small,
    Medium,
    Large,
}

impl Magnitude {
    pub fn of(delta: f64) -> Self {
        let a = delta.abs();
        if a < 0.147 {
            Magnitude::Negligible
        } else if a < 0.33 {
            Magnitude::Small
        } else if a < 0.474 {
            Magnitude::Medium
        } else {
            Magnitude::Large
        }
    }

    pub fn letter(self) -> char {
        match self {
            Magnitude::Negligible => 'N',
            Magnitude::Small => 'S',
            Magnitude::Medium => 'M',
            Magnitude::Large => 'L',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CliffsDelta {
    pub delta: f64,
    pub magnitude: Magnitude,
}

/// `(#{a > b} - #{a < b}) / (|a| |b|)` over all pairs.
pub fn cliffs_delta(a: &[f64], b: &[f64]) -> Result<CliffsDelta, MetricsError> {
    if a.is_empty() || b.is_empty() {
        return Err(MetricsError::EmptySample);
    }
    let mut score = 0i64;
    for x in a {
        for y in b {
            score += match x.partial_cmp(y) {
                Some(std::cmp::Ordering::Greater) => 1,
                Some(std::cmp::Ordering::Less) => -1,
                _ => 0,
            };
        }
    }
    let delta = score as f64 / (a.len() * b.len()) as f64;
    Ok(CliffsDelta {
        delta,
        magnitude: Magnitude::of(delta),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MannWhitney {
    /// U statistic of the first sample: pairs with `a > b`, ties count 1/2.
    pub u: f64,
    /// Two-sided p-value.
    pub p_value: f64,
}

/// Two-sided Mann-Whitney U test with the normal approximation, tie
/// correction and continuity correction. An all-equal pooled sample gives
/// `p = 1`.
pub fn mann_whitney_u(a: &[f64], b: &[f64]) -> Result<MannWhitney, MetricsError> {
    if a.is_empty() || b.is_empty() {
        return Err(MetricsError::EmptySample);
    }
    let (n1, n2) = (a.len() as f64, b.len() as f64);
    let mut pooled: Vec<(f64, bool)> = a.iter().map(|v| (*v, true)).chain(b.iter().map(|v| (*v, false))).collect();
    pooled.sort_by(|x, y| x.0.total_cmp(&y.0));
    let n = pooled.len();
    let mut rank_sum_a = 0.0;
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && pooled[j].0 == pooled[i].0 {
            j += 1;
        }
        let avg = (i + j + 1) as f64 / 2.0;
        let t = (j - i) as f64;
        tie_term += t * t * t - t;
        rank_sum_a += avg * pooled[i..j].iter().filter(|p| p.1).count() as f64;
        i = j;
    }
    let u = rank_sum_a - n1 * (n1 + 1.0) / 2.0;
    let mean = n1 * n2 / 2.0;
    let nt = n1 + n2;
    let var = n1 * n2 / 12.0 * ((nt + 1.0) - tie_term / (nt * (nt - 1.0)));
    if !(var > 0.0) {
        return Ok(MannWhitney { u, p_value: 1.0 });
    }
    let z = ((u - mean).abs() - 0.5).max(0.0) / var.sqrt();
    let p_value = libm::erfc(z / std::f64::consts::SQRT_2).clamp(0.0, 1.0);
    Ok(MannWhitney { u, p_value })
}

/// Test result plus effect size for comparing two groups.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StatReport {
    pub p_value: f64,
    pub cliffs_delta: f64,
    pub magnitude: Magnitude,
}

pub fn compare(a: &[f64], b: &[f64]) -> Result<StatReport, MetricsError> {
    let mw = mann_whitney_u(a, b)?;
    let cd = cliffs_delta(a, b)?;
    Ok(StatReport {
        p_value: mw.p_value,
        cliffs_delta: cd.delta,
        magnitude: cd.magnitude,
    })
}

/// Median of a sample (mean of the middle pair for even sizes).
pub fn median(v: &[f64]) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    Some(if n % 2 == 1 { s[n / 2] } else { 0.5 * (s[n / 2 - 1] + s[n / 2]) })
}
