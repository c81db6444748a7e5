//! The batch pipeline behind the `latentgen` binary: configuration, file
//! formats, and one function per subcommand.
//!
//! Every phase is a pure function of its configuration, inputs and seed;
//! rerunning it produces byte-identical files. Wall-clock timings are kept
//! out of deterministic outputs and written to separate `.timing.csv` files.

pub mod dataset;
pub mod plot;
pub mod report;

use std::fs;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{BoundsTable, Genome, SpaceTag, UseCase};
use crate::evolve::{
    read_archive, run_ga, run_latent_search, run_random, write_archive, Budget, DomainOperators, EvolveError,
    GaConfig, LatentDomainOperators, RunArchive, VectorOperators,
};
use crate::metrics::cosine_distance_total;
use crate::neural::{load_model, save_model, train_vae, Architecture, NeuralError, TrainConfig, TrainHistory, VaeModel};
use crate::seed;
use crate::surrogate::{oracle_by_name, OracleKind, Surrogate};

pub use dataset::{random_dataset, DatasetFile, DatasetHeader, Generator};
pub use report::{build_report, Report};

/// Default search budget (evaluations) for the UAV problem.
pub const UAV_SEARCH_BUDGET: usize = 200;
/// Default search budget (evaluations) for the driving problem.
pub const ADS_SEARCH_BUDGET: usize = 2000;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("input error: {0}")]
    Input(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("cannot write {path}: {source}")]
    Output { path: PathBuf, source: std::io::Error },
}

impl PipelineError {
    /// Process exit code: 2 configuration, 3 input format, 4 infeasible.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_) | PipelineError::Output { .. } => 2,
            PipelineError::Input(_) => 3,
            PipelineError::Infeasible(_) => 4,
        }
    }
}

impl From<EvolveError> for PipelineError {
    fn from(e: EvolveError) -> Self {
        match e {
            EvolveError::Config(_) | EvolveError::Decoder(_) => PipelineError::Config(e.to_string()),
            EvolveError::Infeasible { .. } => PipelineError::Infeasible(e.to_string()),
            EvolveError::Format(_) | EvolveError::Io(_) => PipelineError::Input(e.to_string()),
        }
    }
}

impl From<NeuralError> for PipelineError {
    fn from(e: NeuralError) -> Self {
        match e {
            NeuralError::Config(_) | NeuralError::DatasetTooSmall { .. } | NeuralError::DimensionMismatch { .. } => {
                PipelineError::Config(e.to_string())
            }
            _ => PipelineError::Input(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    pub dataset: PathBuf,
    pub model: PathBuf,
    pub history: PathBuf,
    pub archive: PathBuf,
    pub report: PathBuf,
}

impl Default for Paths {
    fn default() -> Self {
        Self {
            dataset: "dataset.csv".into(),
            model: "model.json".into(),
            history: "history.csv".into(),
            archive: "archive.jsonl".into(),
            report: "report.csv".into(),
        }
    }
}

/// Pipeline configuration, read from TOML. Every field has a default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub use_case: UseCase,
    pub seed: u64,
    /// Search oracle name; defaults to the use case's simulation surrogate.
    pub oracle: Option<String>,
    /// Genomes per collected dataset.
    pub dataset_size: usize,
    /// GA for optimized dataset collection.
    pub collect: GaConfig,
    /// GA for search; its budget is replaced by `search_evaluations`.
    pub search: GaConfig,
    /// Search budget in evaluations; defaults per use case.
    pub search_evaluations: Option<usize>,
    pub train: TrainConfig,
    pub paths: Paths,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            use_case: UseCase::Ads,
            seed: 0,
            oracle: None,
            dataset_size: 10_000,
            collect: GaConfig::dataset(),
            search: GaConfig::latent(),
            search_evaluations: None,
            train: TrainConfig::default(),
            paths: Paths::default(),
        }
    }
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self, PipelineError> {
        let cfg: Self = toml::from_str(text).map_err(|e| PipelineError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text = fs::read_to_string(path).map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        self.collect.validate()?;
        self.search.validate()?;
        let oracle = self.search_oracle()?;
        if oracle.kind.use_case() != self.use_case {
            return Err(PipelineError::Config(format!(
                "oracle {} does not belong to use case {}",
                oracle.kind.name(),
                self.use_case
            )));
        }
        let p = &self.paths;
        let all = [&p.dataset, &p.model, &p.history, &p.archive, &p.report];
        for (i, a) in all.iter().enumerate() {
            if all[..i].contains(a) {
                return Err(PipelineError::Config(format!("path {} is used twice", a.display())));
            }
        }
        if self.dataset_size == 0 || self.search_evaluations == Some(0) {
            return Err(PipelineError::Config("dataset_size and search_evaluations must be positive".into()));
        }
        Ok(())
    }

    pub fn search_oracle(&self) -> Result<Surrogate, PipelineError> {
        match &self.oracle {
            Some(name) => oracle_by_name(name).map_err(|e| PipelineError::Config(e.to_string())),
            None => Ok(Surrogate::new(OracleKind::simulated(self.use_case))),
        }
    }

    pub fn search_budget(&self) -> usize {
        self.search_evaluations.unwrap_or(match self.use_case {
            UseCase::Uav => UAV_SEARCH_BUDGET,
            UseCase::Ads => ADS_SEARCH_BUDGET,
        })
    }

    /// Seed of a pipeline phase.
    pub fn phase_seed(&self, phase: &str) -> u64 {
        seed::derive(self.seed, phase)
    }
}

fn create(path: &Path) -> Result<BufWriter<fs::File>, PipelineError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| PipelineError::Output {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    fs::File::create(path).map(BufWriter::new).map_err(|source| PipelineError::Output {
        path: path.to_path_buf(),
        source,
    })
}

/// Write `text` to `path`, creating parent directories.
pub fn write_text(path: &Path, text: &str) -> Result<(), PipelineError> {
    let mut w = create(path)?;
    w.write_all(text.as_bytes())
        .and_then(|_| w.flush())
        .map_err(|source| PipelineError::Output {
            path: path.to_path_buf(),
            source,
        })
}

pub fn read_text(path: &Path) -> Result<String, PipelineError> {
    fs::read_to_string(path).map_err(|e| PipelineError::Input(format!("{}: {e}", path.display())))
}

/// How `collect` builds its dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CollectMode {
    Random,
    Optimized,
}

/// Build a dataset of `cfg.dataset_size` valid genomes.
pub fn cmd_collect(cfg: &PipelineConfig, mode: CollectMode) -> Result<DatasetFile, PipelineError> {
    let uc = cfg.use_case;
    let seed = cfg.phase_seed("collect");
    let (generator, genomes) = match mode {
        CollectMode::Random => (Generator::Random, random_dataset(uc, cfg.dataset_size, seed)?),
        CollectMode::Optimized => {
            let ga = cfg.collect.clone().with_seed(seed);
            let oracle = Surrogate::new(OracleKind::simplified(uc));
            (Generator::Optimized, crate::evolve::collect_dataset(cfg.dataset_size, &ga, &oracle)?)
        }
    };
    Ok(DatasetFile::new(uc, seed, generator, genomes))
}

/// Cosine distances between genomes and their reconstructions, on
/// min-max normalized vectors.
pub fn reconstruction_distances(model: &VaeModel, genomes: &[Genome]) -> Result<Vec<f64>, PipelineError> {
    let b = &model.bounds;
    genomes
        .iter()
        .map(|g| {
            let r = model.reconstruct(g)?;
            Ok(cosine_distance_total(&b.unit_scale(&g.values), &b.unit_scale(&r.values)))
        })
        .collect()
}

/// Outcome of one training run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    pub model: VaeModel,
    pub history: TrainHistory,
    /// Reconstruction distances of the validation genomes.
    pub validation_distances: Vec<f64>,
}

impl TrainedModel {
    pub fn mean_distance(&self) -> f64 {
        self.validation_distances.iter().sum::<f64>() / self.validation_distances.len().max(1) as f64
    }

    pub fn max_distance(&self) -> f64 {
        self.validation_distances.iter().copied().fold(0.0, f64::max)
    }
}

/// Train one model on a dataset.
pub fn train_on(data: &DatasetFile, train: &TrainConfig) -> Result<TrainedModel, PipelineError> {
    let (model, history) = train_vae(&data.genomes, &data.header.bounds, train)?;
    let val: Vec<Genome> = history.validation.iter().map(|&i| data.genomes[i].clone()).collect();
    let validation_distances = reconstruction_distances(&model, &val)?;
    Ok(TrainedModel {
        model,
        history,
        validation_distances,
    })
}

/// Train with the configured settings, seeded by the pipeline.
pub fn cmd_train(cfg: &PipelineConfig, data: &DatasetFile) -> Result<TrainedModel, PipelineError> {
    if data.header.use_case != cfg.use_case {
        return Err(PipelineError::Input(format!(
            "dataset is for {}, configuration for {}",
            data.header.use_case, cfg.use_case
        )));
    }
    let train = TrainConfig {
        seed: cfg.phase_seed("train"),
        ..cfg.train.clone()
    };
    train_on(data, &train)
}

/// Per-epoch history CSV.
pub fn history_csv(h: &TrainHistory) -> String {
    let mut s = String::from("epoch,train_loss,val_loss,mse,kl\n");
    for e in &h.epochs {
        s.push_str(&format!("{},{},{},{},{}\n", e.epoch, e.train_loss, e.val_loss, e.mse_term, e.kl_term));
    }
    s
}

/// One configuration of a training sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    /// `architecture` for the architecture/optimizer grid, `latent` for the
    /// latent-size grid.
    pub grid: String,
    pub architecture: Architecture,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub latent_dim: usize,
    pub final_val_loss: f64,
    pub mean_distance: f64,
    pub max_distance: f64,
    pub wall_time: f64,
}

/// Learning rates of the architecture grid.
pub const SWEEP_LEARNING_RATES: [f64; 2] = [1e-3, 1e-4];
/// Batch sizes of the architecture grid.
pub const SWEEP_BATCH_SIZES: [usize; 3] = [64, 128, 512];
/// Latent sizes of the latent-size grid (the largest equals the road genome length).
pub const SWEEP_LATENT_DIMS: [usize; 3] = [8, 12, 17];

/// The training configurations of the architecture grid: every
/// architecture x learning rate x batch size, latent size = input size.
pub fn architecture_grid(base: &TrainConfig) -> Vec<TrainConfig> {
    let mut out = Vec::new();
    for arch in [Architecture::Vae1, Architecture::Vae2, Architecture::Vae3] {
        for lr in SWEEP_LEARNING_RATES {
            for batch in SWEEP_BATCH_SIZES {
                out.push(TrainConfig {
                    architecture: arch.clone(),
                    learning_rate: lr,
                    batch_size: batch,
                    latent_dim: None,
                    ..base.clone()
                });
            }
        }
    }
    out
}

/// The latent-size grid: the base configuration at each latent size that
/// does not exceed the input size.
pub fn latent_grid(base: &TrainConfig, input_dim: usize) -> Vec<TrainConfig> {
    SWEEP_LATENT_DIMS
        .iter()
        .filter(|&&l| l <= input_dim)
        .map(|&l| TrainConfig {
            latent_dim: Some(l),
            ..base.clone()
        })
        .collect()
}

fn sweep_row(grid: &str, data: &DatasetFile, t: &TrainConfig) -> Result<SweepRow, PipelineError> {
    let r = train_on(data, t)?;
    Ok(SweepRow {
        grid: grid.into(),
        architecture: t.architecture.clone(),
        learning_rate: t.learning_rate,
        batch_size: t.batch_size,
        latent_dim: r.model.latent_dim,
        final_val_loss: r.history.final_val_loss().unwrap_or(f64::NAN),
        mean_distance: r.mean_distance(),
        max_distance: r.max_distance(),
        wall_time: r.history.wall_time,
    })
}

/// Run both sweep grids. Every configuration shares the pipeline's train
/// seed, so rows differ only in the swept settings.
pub fn cmd_sweep(cfg: &PipelineConfig, data: &DatasetFile) -> Result<Vec<SweepRow>, PipelineError> {
    let base = TrainConfig {
        seed: cfg.phase_seed("train"),
        ..cfg.train.clone()
    };
    let mut rows = Vec::new();
    for t in architecture_grid(&base) {
        rows.push(sweep_row("architecture", data, &t)?);
    }
    for t in latent_grid(&base, data.header.bounds.len()) {
        rows.push(sweep_row("latent", data, &t)?);
    }
    Ok(rows)
}

/// Sweep results without timings (deterministic).
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from("grid,architecture,learning_rate,batch_size,latent_dim,final_val_loss,mean_distance,max_distance\n");
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.grid,
            r.architecture.name(),
            r.learning_rate,
            r.batch_size,
            r.latent_dim,
            r.final_val_loss,
            r.mean_distance,
            r.max_distance
        ));
    }
    s
}

pub fn sweep_timing_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from("grid,architecture,learning_rate,batch_size,latent_dim,wall_time_s\n");
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{},{},{:.3}\n",
            r.grid,
            r.architecture.name(),
            r.learning_rate,
            r.batch_size,
            r.latent_dim,
            r.wall_time
        ));
    }
    s
}

/// `original` or `latent`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchSpace {
    Original,
    Latent,
}

impl std::str::FromStr for SearchSpace {
    type Err = PipelineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "original" => Ok(Self::Original),
            "latent" => Ok(Self::Latent),
            _ => Err(PipelineError::Config(format!("unknown search space `{s}`"))),
        }
    }
}

/// `rs` random search, `ga1` domain operators, `ga2` vector operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Rs,
    Ga1,
    Ga2,
}

impl std::str::FromStr for Algorithm {
    type Err = PipelineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rs" => Ok(Self::Rs),
            "ga1" => Ok(Self::Ga1),
            "ga2" => Ok(Self::Ga2),
            _ => Err(PipelineError::Config(format!("unknown algorithm `{s}`"))),
        }
    }
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Self::Rs => "rs",
            Self::Ga1 => "ga1",
            Self::Ga2 => "ga2",
        }
    }
}

/// Run one search cell. `run` selects the derived seed, so repeated runs
/// of a cell are independent yet replayable.
pub fn cmd_search(
    cfg: &PipelineConfig,
    space: SearchSpace,
    algo: Algorithm,
    model: Option<&VaeModel>,
    run: u64,
) -> Result<RunArchive, PipelineError> {
    let uc = cfg.use_case;
    let oracle = cfg.search_oracle()?;
    let budget = cfg.search_budget();
    let seed = seed::derive_index(cfg.phase_seed("search"), run);
    let ga = cfg
        .search
        .clone()
        .with_budget(Budget::Evaluations(budget))
        .with_seed(seed);
    let decoder = || -> Result<Box<VaeModel>, PipelineError> {
        let m = model.ok_or_else(|| PipelineError::Config("latent search needs a model file".into()))?;
        if m.input_dim != uc.dimension() {
            return Err(PipelineError::Input(format!("model has {} outputs, {uc} needs {}", m.input_dim, uc.dimension())));
        }
        Ok(Box::new(m.clone()))
    };
    let archive = match (space, algo) {
        (SearchSpace::Original, Algorithm::Rs) => run_random(&DomainOperators { use_case: uc }, &oracle, budget, seed)?,
        (SearchSpace::Original, Algorithm::Ga1) => run_ga(&ga, &DomainOperators { use_case: uc }, &oracle, "ga1")?,
        (SearchSpace::Original, Algorithm::Ga2) => {
            run_ga(&ga, &VectorOperators::original(uc, ga.eta_m), &oracle, "ga2")?
        }
        (SearchSpace::Latent, Algorithm::Rs) => {
            run_random(&VectorOperators::latent(decoder()?, ga.eta_m), &oracle, budget, seed)?
        }
        (SearchSpace::Latent, Algorithm::Ga1) => {
            let rep = LatentDomainOperators {
                use_case: uc,
                decoder: decoder()?,
            };
            run_ga(&ga, &rep, &oracle, "ga1")?
        }
        (SearchSpace::Latent, Algorithm::Ga2) => run_latent_search(&ga, &*decoder()?, &oracle)?,
    };
    Ok(archive)
}

pub fn save_archive(a: &RunArchive, path: &Path) -> Result<(), PipelineError> {
    let mut w = create(path)?;
    let out = |source| PipelineError::Output {
        path: path.to_path_buf(),
        source,
    };
    write_archive(&mut w, a).map_err(|e| match e {
        EvolveError::Io(source) => out(source),
        other => other.into(),
    })?;
    w.flush().map_err(out)
}

pub fn load_archive(path: &Path) -> Result<RunArchive, PipelineError> {
    let f = fs::File::open(path).map_err(|e| PipelineError::Input(format!("{}: {e}", path.display())))?;
    read_archive(BufReader::new(f)).map_err(|e| PipelineError::Input(format!("{}: {e}", path.display())))
}

pub fn save_dataset(d: &DatasetFile, path: &Path) -> Result<(), PipelineError> {
    write_text(path, &d.to_text())
}

pub fn load_dataset(path: &Path) -> Result<DatasetFile, PipelineError> {
    DatasetFile::parse(&read_text(path)?).map_err(|e| PipelineError::Input(format!("{}: {e}", path.display())))
}

pub fn save_vae(m: &VaeModel, path: &Path) -> Result<(), PipelineError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| PipelineError::Output {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    save_model(m, path).map_err(|e| match e {
        NeuralError::Io(source) => PipelineError::Output {
            path: path.to_path_buf(),
            source,
        },
        other => other.into(),
    })
}

pub fn load_vae(path: &Path) -> Result<VaeModel, PipelineError> {
    load_model(path).map_err(|e| PipelineError::Input(format!("{}: {e}", path.display())))
}

/// Bounds of the searched space of an archive (latent box or original).
pub fn search_bounds(a: &RunArchive) -> BoundsTable {
    match a.header.space {
        SpaceTag::Original => a.use_case().bounds(),
        SpaceTag::Latent => BoundsTable::latent(a.records.first().map_or(0, |r| r.genome.len())),
    }
}
