//! The (μ+λ) genetic algorithm, its dataset-collection and latent-search
//! configurations, and the run archive.
//!
//! One engine ([`run_ga_with`]) drives every search; a [`Representation`]
//! decides how genomes are sampled, varied and turned into scenarios.

pub mod archive;
pub mod operators;
pub mod repr;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{Genome, Phenotype, UseCase};
use crate::metrics::DUPLICATE_THRESHOLD;
use crate::neural::VaeModel;
use crate::seed;
use crate::surrogate::{FitnessOracle, FitnessOutcome, WorstPoint};

pub use archive::{read_archive, write_archive, ArchiveHeader};
pub use operators::{
    one_point_crossover, polynomial_mutation, remove_duplicates, road_domain_mutation, sbx_crossover,
    tournament_select, uav_domain_mutation,
};
pub use repr::{
    Decoder, DomainOperators, IdentityDecoder, InitKind, LatentDomainOperators, Representation, VectorOperators,
};

/// Generations without a single new evaluation after which a run stops.
pub const MAX_STALLED_GENERATIONS: usize = 1000;
/// Extra collection runs allowed per base run before giving up.
pub const EXTRA_RUNS_PER_RUN: usize = 2;

#[derive(Debug, Error)]
pub enum EvolveError {
    #[error("invalid GA configuration: {0}")]
    Config(String),
    #[error("decoder does not fit the problem: {0}")]
    Decoder(String),
    #[error("collected only {got} of {wanted} valid genomes")]
    Infeasible { wanted: usize, got: usize },
    #[error("malformed archive: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// When a run stops.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Budget {
    /// Number of generations after initialization.
    Generations(usize),
    /// Total fitness evaluations, initialization included.
    Evaluations(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaConfig {
    pub pop_size: usize,
    pub offspring_count: usize,
    pub p_cross: f64,
    pub p_mut: f64,
    pub eta_c: f64,
    pub eta_m: f64,
    pub dup_threshold: f64,
    pub tournament_size: usize,
    pub budget: Budget,
    pub seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self::latent()
    }
}

impl GaConfig {
    /// Dataset collection: population 200, 100 offspring, 50 generations.
    /// The crossover and mutation indices are unused by the domain operators.
    pub fn dataset() -> Self {
        Self {
            pop_size: 200,
            offspring_count: 100,
            p_cross: 0.9,
            p_mut: 0.4,
            eta_c: 3.0,
            eta_m: 3.0,
            dup_threshold: DUPLICATE_THRESHOLD,
            tournament_size: 2,
            budget: Budget::Generations(50),
            seed: 0,
        }
    }

    /// Latent search: population 40, 20 offspring.
    pub fn latent() -> Self {
        Self {
            pop_size: 40,
            offspring_count: 20,
            p_cross: 0.5,
            p_mut: 0.4,
            eta_c: 3.0,
            eta_m: 3.0,
            dup_threshold: DUPLICATE_THRESHOLD,
            tournament_size: 2,
            budget: Budget::Evaluations(2000),
            seed: 0,
        }
    }

    pub fn with_budget(mut self, budget: Budget) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<(), EvolveError> {
        let bad = |m: &str| Err(EvolveError::Config(m.to_string()));
        if self.pop_size < 2 {
            return bad("pop_size must be at least 2");
        }
        if self.offspring_count == 0 || self.tournament_size == 0 {
            return bad("offspring_count and tournament_size must be at least 1");
        }
        if !(0.0..=1.0).contains(&self.p_cross) || !(0.0..=1.0).contains(&self.p_mut) {
            return bad("p_cross and p_mut must lie in [0, 1]");
        }
        if !(self.dup_threshold > 0.0) {
            return bad("dup_threshold must be positive");
        }
        if !(self.eta_c > 0.0) || !(self.eta_m > 0.0) {
            return bad("eta_c and eta_m must be positive");
        }
        if self.budget == Budget::Evaluations(0) {
            return bad("evaluation budget must be positive");
        }
        Ok(())
    }
}

/// A population member.
#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub genome: Genome,
    pub outcome: Option<FitnessOutcome>,
    /// Self-adaptive crossover index (used by SBX only).
    pub eta_c: f64,
    /// Index of this individual's archive record once evaluated.
    pub record: Option<usize>,
}

impl Individual {
    pub fn new(genome: Genome, eta_c: f64) -> Self {
        Self {
            genome,
            outcome: None,
            eta_c,
            record: None,
        }
    }

    /// Minimized selection key. Invalid scenarios rank below every valid
    /// one whatever their penalty value.
    pub fn selection_key(&self) -> f64 {
        match &self.outcome {
            Some(o) if o.valid && !o.fitness.is_nan() => o.fitness,
            _ => f64::INFINITY,
        }
    }
}

/// One fitness evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub index: usize,
    pub generation: usize,
    /// The searched genome (original or latent).
    pub genome: Genome,
    /// The original-space genome it stands for.
    pub decoded: Vec<f64>,
    pub phenotype: Option<Phenotype>,
    pub fitness: f64,
    pub robustness: f64,
    pub valid: bool,
    pub failed: bool,
    pub worst: Option<WorstPoint>,
    pub seed: u64,
}

/// Every evaluation of a run plus its final state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunArchive {
    pub header: ArchiveHeader,
    pub records: Vec<EvalRecord>,
    /// Record indices of the final population, best first.
    pub final_population: Vec<usize>,
    /// Best valid fitness in the population after each generation
    /// (entry 0 is the initial population); `None` while none is valid.
    pub best_per_generation: Vec<Option<f64>>,
    /// Offspring skipped before evaluation as exact copies.
    pub skipped_duplicates: usize,
}

impl RunArchive {
    pub fn use_case(&self) -> UseCase {
        self.header.use_case
    }

    pub fn evaluations(&self) -> usize {
        self.records.len()
    }

    pub fn final_genomes(&self) -> impl Iterator<Item = &EvalRecord> {
        self.final_population.iter().map(|&i| &self.records[i])
    }
}

/// Result of scoring one expressed genome.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub phenotype: Option<Phenotype>,
    pub outcome: FitnessOutcome,
}

/// Decode an original-space genome and score it with `oracle`.
pub fn evaluate_scenario(use_case: UseCase, oracle: &dyn FitnessOracle, decoded: &Genome, seed: u64) -> Evaluation {
    match Phenotype::decode(use_case, decoded) {
        Ok(p) => Evaluation {
            outcome: oracle.evaluate(&p, seed),
            phenotype: Some(p),
        },
        Err(_) => Evaluation {
            phenotype: None,
            outcome: FitnessOutcome::invalid(),
        },
    }
}

/// Seed of the evaluation of `genome` in a run seeded with `master`.
pub fn evaluation_seed(master: u64, genome: &Genome) -> u64 {
    seed::derive_index(seed::derive(master, "evaluate"), seed::hash_values(&genome.values))
}

struct Engine<'a, F> {
    rep: &'a dyn Representation,
    eval: F,
    seed: u64,
    records: Vec<EvalRecord>,
}

impl<F: FnMut(&Genome, u64) -> Evaluation> Engine<'_, F> {
    fn evaluate(&mut self, ind: &mut Individual, generation: usize) {
        let decoded = self.rep.express(&ind.genome);
        let seed = evaluation_seed(self.seed, &ind.genome);
        let Evaluation { phenotype, outcome } = (self.eval)(&decoded, seed);
        let index = self.records.len();
        self.records.push(EvalRecord {
            index,
            generation,
            genome: ind.genome.clone(),
            decoded: decoded.values,
            phenotype,
            fitness: outcome.fitness,
            robustness: outcome.robustness,
            valid: outcome.valid,
            failed: outcome.failed,
            worst: outcome.worst,
            seed,
        });
        ind.outcome = Some(FitnessOutcome {
            trace: Default::default(),
            ..outcome
        });
        ind.record = Some(index);
    }
}

fn best_valid(pop: &[Individual]) -> Option<f64> {
    pop.iter()
        .filter_map(|i| i.outcome.as_ref().filter(|o| o.valid).map(|o| o.fitness))
        .reduce(f64::min)
}

fn sort_population(pop: &mut [Individual]) {
    pop.sort_by(|a, b| a.selection_key().total_cmp(&b.selection_key()));
}

/// The (μ+λ) loop with a caller-supplied evaluation function. `eval`
/// receives the expressed original-space genome and its evaluation seed.
pub fn run_ga_with(
    cfg: &GaConfig,
    use_case: UseCase,
    rep: &dyn Representation,
    algorithm: &str,
    eval: impl FnMut(&Genome, u64) -> Evaluation,
) -> Result<RunArchive, EvolveError> {
    cfg.validate()?;
    let mut rng = seed::rng(seed::derive(cfg.seed, "variation"));
    let mut engine = Engine {
        rep,
        eval,
        seed: cfg.seed,
        records: Vec::new(),
    };
    let remaining = |records: &[EvalRecord]| match cfg.budget {
        Budget::Evaluations(n) => n.saturating_sub(records.len()),
        Budget::Generations(_) => usize::MAX,
    };

    let init = cfg.pop_size.min(remaining(&engine.records));
    let mut pop: Vec<Individual> = (0..init).map(|_| rep.sample(&mut rng)).collect();
    for ind in &mut pop {
        engine.evaluate(ind, 0);
    }
    sort_population(&mut pop);
    let mut best_per_generation = vec![best_valid(&pop)];
    let mut skipped = 0;
    let mut stalled = 0;
    let mut generation = 0;

    loop {
        if let Budget::Generations(g) = cfg.budget {
            if generation >= g {
                break;
            }
        }
        let left = remaining(&engine.records);
        if left == 0 || stalled >= MAX_STALLED_GENERATIONS {
            break;
        }
        generation += 1;

        let keys: Vec<f64> = pop.iter().map(Individual::selection_key).collect();
        let mut offspring: Vec<Individual> = Vec::with_capacity(cfg.offspring_count + 1);
        while offspring.len() < cfg.offspring_count {
            let a = &pop[tournament_select(&keys, cfg.tournament_size, &mut rng)];
            let b = &pop[tournament_select(&keys, cfg.tournament_size, &mut rng)];
            let (c1, c2) = if rng.random::<f64>() < cfg.p_cross {
                rep.crossover(a, b, &mut rng)
            } else {
                (Individual::new(a.genome.clone(), a.eta_c), Individual::new(b.genome.clone(), b.eta_c))
            };
            for c in [c1, c2] {
                let c = if rng.random::<f64>() < cfg.p_mut { rep.mutate(&c, &mut rng) } else { c };
                offspring.push(c);
            }
        }
        offspring.truncate(cfg.offspring_count.min(left));

        // Exact copies of known genomes would only re-evaluate a known result.
        let mut fresh: Vec<Individual> = Vec::with_capacity(offspring.len());
        for c in offspring {
            let known = pop.iter().chain(fresh.iter()).any(|p| p.genome.values == c.genome.values);
            if known {
                skipped += 1;
            } else {
                fresh.push(c);
            }
        }
        stalled = if fresh.is_empty() { stalled + 1 } else { 0 };
        for c in &mut fresh {
            engine.evaluate(c, generation);
        }

        pop.extend(fresh);
        let vectors: Vec<Vec<f64>> = pop.iter().map(|i| rep.dedup_key(&i.genome)).collect();
        let keys: Vec<f64> = pop.iter().map(Individual::selection_key).collect();
        let kept = remove_duplicates(&vectors, &keys, cfg.dup_threshold);
        let mut slots: Vec<Option<Individual>> = pop.into_iter().map(Some).collect();
        pop = kept
            .into_iter()
            .take(cfg.pop_size)
            .map(|i| slots[i].take().expect("kept indices are distinct"))
            .collect();
        best_per_generation.push(best_valid(&pop));
    }

    let final_population = pop.iter().map(|i| i.record.expect("evaluated")).collect();
    Ok(RunArchive {
        header: ArchiveHeader::new(use_case, rep.space(), algorithm, cfg.seed),
        records: engine.records,
        final_population,
        best_per_generation,
        skipped_duplicates: skipped,
    })
}

/// Run the GA on scenarios scored by `oracle`.
pub fn run_ga(
    cfg: &GaConfig,
    rep: &dyn Representation,
    oracle: &dyn FitnessOracle,
    algorithm: &str,
) -> Result<RunArchive, EvolveError> {
    let uc = oracle.use_case();
    run_ga_with(cfg, uc, rep, algorithm, |g, s| evaluate_scenario(uc, oracle, g, s))
}

/// Latent search with standard vector operators: genomes start N(0, 1)
/// inside the latent box and are decoded by `model` before evaluation.
pub fn run_latent_search(cfg: &GaConfig, model: &VaeModel, oracle: &dyn FitnessOracle) -> Result<RunArchive, EvolveError> {
    let uc = oracle.use_case();
    if model.input_dim != uc.dimension() {
        return Err(EvolveError::Decoder(format!(
            "model emits {} genes, {} genomes have {}",
            model.input_dim,
            uc,
            uc.dimension()
        )));
    }
    let rep = VectorOperators::latent(Box::new(model.clone()), cfg.eta_m);
    run_ga(cfg, &rep, oracle, "ga2")
}

/// Pure random search: `budget` independent samples of `rep`.
pub fn run_random(
    rep: &dyn Representation,
    oracle: &dyn FitnessOracle,
    budget: usize,
    seed: u64,
) -> Result<RunArchive, EvolveError> {
    if budget == 0 {
        return Err(EvolveError::Config("evaluation budget must be positive".into()));
    }
    let uc = oracle.use_case();
    let mut rng = seed::rng(seed::derive(seed, "variation"));
    let mut engine = Engine {
        rep,
        eval: |g: &Genome, s| evaluate_scenario(uc, oracle, g, s),
        seed,
        records: Vec::new(),
    };
    let mut all = Vec::with_capacity(budget);
    for _ in 0..budget {
        let mut ind = rep.sample(&mut rng);
        engine.evaluate(&mut ind, 0);
        all.push(ind);
    }
    sort_population(&mut all);
    let best = best_valid(&all);
    Ok(RunArchive {
        header: ArchiveHeader::new(uc, rep.space(), "rs", seed),
        records: engine.records,
        final_population: all.iter().map(|i| i.record.expect("evaluated")).collect(),
        best_per_generation: vec![best],
        skipped_duplicates: 0,
    })
}

/// Optimized dataset collection: `ceil(n_total / pop_size)` GA runs with
/// domain operators and derived seeds, each contributing the valid members
/// of its final population. Short runs are topped up by extra runs; the last
/// run's contribution is truncated to hit `n_total` exactly.
pub fn collect_dataset(
    n_total: usize,
    cfg: &GaConfig,
    oracle: &dyn FitnessOracle,
) -> Result<Vec<Genome>, EvolveError> {
    cfg.validate()?;
    let rep = DomainOperators {
        use_case: oracle.use_case(),
    };
    let base_runs = n_total.div_ceil(cfg.pop_size);
    let max_runs = base_runs * (1 + EXTRA_RUNS_PER_RUN);
    let master = seed::derive(cfg.seed, "collect");
    let mut out = Vec::with_capacity(n_total);
    let mut run = 0;
    while out.len() < n_total && run < max_runs {
        let run_cfg = cfg.clone().with_seed(seed::derive_index(master, run as u64));
        let archive = run_ga(&run_cfg, &rep, oracle, "collect")?;
        out.extend(
            archive
                .final_genomes()
                .filter(|r| r.valid)
                .map(|r| Genome::original(r.decoded.clone()))
                .take(n_total - out.len()),
        );
        run += 1;
    }
    if out.len() < n_total {
        return Err(EvolveError::Infeasible {
            wanted: n_total,
            got: out.len(),
        });
    }
    Ok(out)
}
