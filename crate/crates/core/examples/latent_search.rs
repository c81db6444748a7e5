//! Search the latent space of a trained VAE for failing roads.

use latentgen::domain::UseCase;
use latentgen::evolve::Budget;
use latentgen::metrics::count_failures;
use latentgen::neural::TrainConfig;
use latentgen::pipeline::{cmd_collect, cmd_search, train_on, Algorithm, CollectMode, PipelineConfig, SearchSpace};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut cfg = PipelineConfig {
        use_case: UseCase::Ads,
        seed: 5,
        dataset_size: 1000,
        search_evaluations: Some(500),
        ..Default::default()
    };
    cfg.collect.budget = Budget::Generations(10);
    let data = cmd_collect(&cfg, CollectMode::Optimized)?;
    let model = train_on(&data, &TrainConfig { epochs: 150, ..Default::default() })?.model;

    for algo in [Algorithm::Rs, Algorithm::Ga1, Algorithm::Ga2] {
        let a = cmd_search(&cfg, SearchSpace::Latent, algo, Some(&model), 0)?;
        let raw = a.records.iter().filter(|r| r.failed).count();
        let best = a.records.iter().filter(|r| r.valid).map(|r| r.fitness).fold(f64::INFINITY, f64::min);
        println!(
            "latent {}: {} evaluations, {raw} failing, {} distinct, best fitness {best:.4}",
            algo.name(),
            a.evaluations(),
            count_failures(&a.records, &cfg.use_case.bounds())
        );
    }
    Ok(())
}
