//! Failure counts, sparseness and pairwise group statistics.

use serde::{Deserialize, Serialize};

use super::PipelineError;
use crate::domain::UseCase;
use crate::evolve::RunArchive;
use crate::metrics::{compare, distinct_failures, failure_distance, median, sparseness, StatReport, DUPLICATE_THRESHOLD};

/// Header of the statistics CSV.
pub const STATS_HEADER: &str = "metric,A,B,p_value,effect_size";
/// Header of the per-archive CSV.
pub const COUNTS_HEADER: &str = "group,archive,evaluations,failures,sparseness";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchiveSummary {
    pub group: String,
    pub archive: usize,
    pub evaluations: usize,
    /// Distinct failures.
    pub failures: usize,
    /// Mean pairwise distance of the distinct failures (needs two).
    pub sparseness: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairRow {
    pub metric: String,
    pub a: String,
    pub b: String,
    pub a_median: f64,
    pub b_median: f64,
    pub stats: StatReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub use_case: UseCase,
    pub archives: Vec<ArchiveSummary>,
    pub pairs: Vec<PairRow>,
}

/// Distinct-failure count and sparseness of one archive.
pub fn summarize(group: &str, index: usize, a: &RunArchive) -> Result<ArchiveSummary, PipelineError> {
    let uc = a.use_case();
    let fails = distinct_failures(&a.records, &uc.bounds(), DUPLICATE_THRESHOLD);
    let sparseness = if fails.len() >= 2 {
        Some(sparseness(&fails, |x, y| failure_distance(uc, x, y)).map_err(|e| PipelineError::Input(e.to_string()))?)
    } else {
        None
    };
    Ok(ArchiveSummary {
        group: group.into(),
        archive: index,
        evaluations: a.evaluations(),
        failures: fails.len(),
        sparseness,
    })
}

/// Summaries of every archive and, for every pair of groups, the
/// Mann-Whitney p-value and Cliff's delta of failure counts and sparseness.
pub fn build_report(groups: &[(String, Vec<RunArchive>)]) -> Result<Report, PipelineError> {
    let use_case = groups
        .iter()
        .flat_map(|(_, v)| v.first())
        .map(RunArchive::use_case)
        .next()
        .ok_or_else(|| PipelineError::Input("no archives to report".into()))?;
    let mut archives = Vec::new();
    for (name, list) in groups {
        for (i, a) in list.iter().enumerate() {
            if a.use_case() != use_case {
                return Err(PipelineError::Input(format!(
                    "group {name} archive {i} is for {}, others for {use_case}",
                    a.use_case()
                )));
            }
            archives.push(summarize(name, i, a)?);
        }
    }
    let sample = |g: &str, metric: &str| -> Vec<f64> {
        archives
            .iter()
            .filter(|s| s.group == g)
            .filter_map(|s| match metric {
                "failures" => Some(s.failures as f64),
                _ => s.sparseness,
            })
            .collect()
    };
    let mut pairs = Vec::new();
    for i in 0..groups.len() {
        for j in i + 1..groups.len() {
            for metric in ["failures", "sparseness"] {
                let (a, b) = (sample(&groups[i].0, metric), sample(&groups[j].0, metric));
                let Ok(stats) = compare(&a, &b) else { continue };
                pairs.push(PairRow {
                    metric: metric.into(),
                    a: groups[i].0.clone(),
                    b: groups[j].0.clone(),
                    a_median: median(&a).unwrap_or(f64::NAN),
                    b_median: median(&b).unwrap_or(f64::NAN),
                    stats,
                });
            }
        }
    }
    Ok(Report {
        use_case,
        archives,
        pairs,
    })
}

/// Six decimals at most, without trailing zeros.
fn round6(v: f64) -> f64 {
    (v * 1e6).round() / 1e6
}

impl Report {
    /// Pairwise statistics; group columns hold `name (median)`, the effect
    /// size column `delta (magnitude letter)`.
    pub fn stats_csv(&self) -> String {
        let mut s = format!("{STATS_HEADER}\n");
        for p in &self.pairs {
            s.push_str(&format!(
                "{},{} ({}),{} ({}),{:.4},{:.3} ({})\n",
                p.metric,
                p.a,
                round6(p.a_median),
                p.b,
                round6(p.b_median),
                p.stats.p_value,
                p.stats.cliffs_delta,
                p.stats.magnitude.letter()
            ));
        }
        s
    }

    pub fn counts_csv(&self) -> String {
        let mut s = format!("{COUNTS_HEADER}\n");
        for a in &self.archives {
            let sp = a.sparseness.map(|v| format!("{v:.6}")).unwrap_or_default();
            s.push_str(&format!("{},{},{},{},{}\n", a.group, a.archive, a.evaluations, a.failures, sp));
        }
        s
    }
}
