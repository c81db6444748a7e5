//! Dataset files: a JSON header line, then one comma-separated genome per
//! line in shortest round-trip decimal form.

use serde::{Deserialize, Serialize};

use super::PipelineError;
use crate::domain::{sample_genome, BoundsTable, Genome, Phenotype, UseCase};
use crate::seed;

pub const DATASET_FORMAT: &str = "latentgen-dataset";
pub const DATASET_VERSION: u64 = 1;
/// Rejection-sampling attempts allowed per requested genome.
pub const MAX_ATTEMPTS_PER_GENOME: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Generator {
    Random,
    Optimized,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetHeader {
    pub format: String,
    pub version: u64,
    pub use_case: UseCase,
    pub bounds: BoundsTable,
    pub count: usize,
    pub seed: u64,
    pub generator: Generator,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetFile {
    pub header: DatasetHeader,
    pub genomes: Vec<Genome>,
}

impl DatasetFile {
    pub fn new(use_case: UseCase, seed: u64, generator: Generator, genomes: Vec<Genome>) -> Self {
        Self {
            header: DatasetHeader {
                format: DATASET_FORMAT.into(),
                version: DATASET_VERSION,
                use_case,
                bounds: use_case.bounds(),
                count: genomes.len(),
                seed,
                generator,
            },
            genomes,
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = serde_json::to_string(&self.header).expect("header serializes");
        s.push('\n');
        for g in &self.genomes {
            let line: Vec<String> = g.values.iter().map(|v| v.to_string()).collect();
            s.push_str(&line.join(","));
            s.push('\n');
        }
        s
    }

    /// Parse file text, checking the header against the records.
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut lines = text.lines();
        let header: DatasetHeader =
            serde_json::from_str(lines.next().ok_or("empty file")?).map_err(|e| format!("line 1: {e}"))?;
        if header.format != DATASET_FORMAT || header.version != DATASET_VERSION {
            return Err(format!("line 1: unsupported format {} v{}", header.format, header.version));
        }
        let dim = header.use_case.dimension();
        if header.bounds.len() != dim {
            return Err(format!("line 1: bounds have {} entries, expected {dim}", header.bounds.len()));
        }
        let mut genomes = Vec::with_capacity(header.count);
        for (i, line) in lines.enumerate() {
            let n = i + 2;
            let values = line
                .split(',')
                .map(|t| t.trim().parse::<f64>().map_err(|e| format!("line {n}: {e}")))
                .collect::<Result<Vec<_>, _>>()?;
            if values.len() != dim {
                return Err(format!("line {n}: {} values, expected {dim}", values.len()));
            }
            let g = Genome::original(values);
            if !header.bounds.contains(&g) {
                return Err(format!("line {n}: genome outside bounds"));
            }
            genomes.push(g);
        }
        if genomes.len() != header.count {
            return Err(format!("header count {} but {} records", header.count, genomes.len()));
        }
        Ok(Self { header, genomes })
    }
}

/// `n` valid genomes by rejection sampling.
pub fn random_dataset(use_case: UseCase, n: usize, seed: u64) -> Result<Vec<Genome>, PipelineError> {
    let mut rng = seed::rng(seed::derive(seed, "random-dataset"));
    let mut out = Vec::with_capacity(n);
    let limit = n.saturating_mul(MAX_ATTEMPTS_PER_GENOME);
    let mut attempts = 0;
    while out.len() < n {
        if attempts == limit {
            return Err(PipelineError::Infeasible(format!(
                "{} valid genomes after {attempts} samples, {n} requested",
                out.len()
            )));
        }
        attempts += 1;
        let g = sample_genome(use_case, &mut rng);
        if Phenotype::decode(use_case, &g).is_ok_and(|p| p.validity().valid()) {
            out.push(g);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_roads_are_valid_and_reproducible() {
        let a = random_dataset(UseCase::Ads, 400, 1).unwrap();
        assert_eq!(a.len(), 400);
        assert!(a
            .iter()
            .all(|g| Phenotype::decode(UseCase::Ads, g).unwrap().validity().valid()));
        assert_eq!(a, random_dataset(UseCase::Ads, 400, 1).unwrap());
    }

    #[test]
    fn text_round_trip_is_byte_identical() {
        let d = DatasetFile::new(UseCase::Uav, 3, Generator::Random, random_dataset(UseCase::Uav, 20, 3).unwrap());
        let text = d.to_text();
        let back = DatasetFile::parse(&text).unwrap();
        assert_eq!(back, d);
        assert_eq!(back.to_text(), text);
    }

    #[test]
    fn count_mismatch_is_reported() {
        let d = DatasetFile::new(UseCase::Ads, 3, Generator::Random, random_dataset(UseCase::Ads, 5, 3).unwrap());
        let text = d.to_text();
        let cut: Vec<&str> = text.lines().take(4).collect();
        assert!(DatasetFile::parse(&cut.join("\n")).unwrap_err().contains("count"));
    }
}
