//! Line-delimited archive files: a header line, one line per evaluation,
//! then a summary line.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::{EvalRecord, EvolveError, RunArchive};
use crate::domain::{SpaceTag, UseCase};

pub const ARCHIVE_FORMAT: &str = "latentgen-archive";
pub const ARCHIVE_VERSION: u64 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchiveHeader {
    pub format: String,
    pub version: u64,
    pub use_case: UseCase,
    pub space: SpaceTag,
    /// `rs`, `ga1`, `ga2` or `collect`.
    pub algorithm: String,
    pub seed: u64,
}

impl ArchiveHeader {
    pub fn new(use_case: UseCase, space: SpaceTag, algorithm: &str, seed: u64) -> Self {
        Self {
            format: ARCHIVE_FORMAT.into(),
            version: ARCHIVE_VERSION,
            use_case,
            space,
            algorithm: algorithm.into(),
            seed,
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum Line {
    Header(ArchiveHeader),
    Record(EvalRecord),
    Summary {
        evaluations: usize,
        final_population: Vec<usize>,
        best_per_generation: Vec<Option<f64>>,
        skipped_duplicates: usize,
    },
}

fn emit(w: &mut impl Write, line: &Line) -> Result<(), EvolveError> {
    serde_json::to_writer(&mut *w, line).map_err(|e| EvolveError::Format(e.to_string()))?;
    w.write_all(b"\n")?;
    Ok(())
}

pub fn write_archive(w: &mut impl Write, a: &RunArchive) -> Result<(), EvolveError> {
    emit(w, &Line::Header(a.header.clone()))?;
    for r in &a.records {
        emit(w, &Line::Record(r.clone()))?;
    }
    emit(
        w,
        &Line::Summary {
            evaluations: a.records.len(),
            final_population: a.final_population.clone(),
            best_per_generation: a.best_per_generation.clone(),
            skipped_duplicates: a.skipped_duplicates,
        },
    )
}

pub fn read_archive(r: impl BufRead) -> Result<RunArchive, EvolveError> {
    let bad = |n: usize, m: String| EvolveError::Format(format!("line {n}: {m}"));
    let mut header = None;
    let mut records = Vec::new();
    let mut summary = None;
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        if summary.is_some() {
            return Err(bad(i + 1, "content after summary".into()));
        }
        match serde_json::from_str::<Line>(&line).map_err(|e| bad(i + 1, e.to_string()))? {
            Line::Header(h) if i == 0 => {
                if h.format != ARCHIVE_FORMAT || h.version != ARCHIVE_VERSION {
                    return Err(bad(1, format!("unsupported format {} v{}", h.format, h.version)));
                }
                header = Some(h);
            }
            Line::Header(_) => return Err(bad(i + 1, "header must be the first line".into())),
            Line::Record(rec) => {
                if header.is_none() {
                    return Err(bad(i + 1, "record before header".into()));
                }
                if rec.index != records.len() {
                    return Err(bad(i + 1, format!("record index {} out of sequence", rec.index)));
                }
                records.push(rec);
            }
            Line::Summary {
                evaluations,
                final_population,
                best_per_generation,
                skipped_duplicates,
            } => {
                if evaluations != records.len() {
                    return Err(bad(i + 1, format!("summary counts {evaluations} records, found {}", records.len())));
                }
                if final_population.iter().any(|&k| k >= records.len()) {
                    return Err(bad(i + 1, "final population refers to a missing record".into()));
                }
                summary = Some((final_population, best_per_generation, skipped_duplicates));
            }
        }
    }
    let header = header.ok_or_else(|| EvolveError::Format("missing header".into()))?;
    let (final_population, best_per_generation, skipped_duplicates) =
        summary.ok_or_else(|| EvolveError::Format("missing summary line (truncated file?)".into()))?;
    Ok(RunArchive {
        header,
        records,
        final_population,
        best_per_generation,
        skipped_duplicates,
    })
}
