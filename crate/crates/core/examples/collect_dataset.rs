//! Build random and GA-optimized road datasets and write one to disk.

use latentgen::domain::UseCase;
use latentgen::evolve::Budget;
use latentgen::pipeline::{cmd_collect, save_dataset, CollectMode, PipelineConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut cfg = PipelineConfig {
        use_case: UseCase::Ads,
        seed: 1,
        dataset_size: 400,
        ..Default::default()
    };
    cfg.collect.budget = Budget::Generations(10);

    for mode in [CollectMode::Random, CollectMode::Optimized] {
        let data = cmd_collect(&cfg, mode)?;
        let mean_abs: f64 = data.genomes.iter().flat_map(|g| &g.values).map(|k| k.abs()).sum::<f64>()
            / (data.genomes.len() * 17) as f64;
        println!("{mode:?}: {} roads, mean |kappa| = {mean_abs:.4}", data.genomes.len());
        if mode == CollectMode::Optimized {
            let path = std::env::temp_dir().join("latentgen-roads.csv");
            save_dataset(&data, &path)?;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}
