//! Train a VAE on an optimized road dataset and inspect reconstruction.

use latentgen::domain::UseCase;
use latentgen::evolve::Budget;
use latentgen::neural::{Architecture, TrainConfig};
use latentgen::pipeline::{cmd_collect, train_on, CollectMode, PipelineConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut cfg = PipelineConfig {
        use_case: UseCase::Ads,
        seed: 3,
        dataset_size: 1000,
        ..Default::default()
    };
    cfg.collect.budget = Budget::Generations(10);
    let data = cmd_collect(&cfg, CollectMode::Optimized)?;

    for latent in [4, 8, 17] {
        let t = train_on(
            &data,
            &TrainConfig {
                epochs: 100,
                batch_size: 128,
                architecture: Architecture::Vae2,
                latent_dim: Some(latent),
                ..Default::default()
            },
        )?;
        println!(
            "latent {latent:>2}: validation loss {:.5}, reconstruction cosine distance mean {:.5} / max {:.5} ({:.1} s)",
            t.history.final_val_loss().unwrap_or(f64::NAN),
            t.mean_distance(),
            t.max_distance(),
            t.history.wall_time
        );
    }
    Ok(())
}
