//! Load a pipeline configuration from TOML and show the resolved settings.

use latentgen::pipeline::PipelineConfig;

const TOML: &str = r#"
use_case = "uav"
seed = 42
dataset_size = 2000

[collect]
budget = { generations = 10 }

[train]
architecture = "vae3"
epochs = 300
latent_dim = 12
"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = PipelineConfig::from_toml(TOML)?;
    println!("search oracle: {}", cfg.search_oracle()?.kind.name());
    println!("search budget: {} evaluations", cfg.search_budget());
    println!("train seed: {}", cfg.phase_seed("train"));
    println!("--- resolved configuration ---\n{}", cfg.to_toml());

    // Typos are configuration errors, not silently ignored.
    let err = PipelineConfig::from_toml("use_case = \"uav\"\ndatset_size = 5").unwrap_err();
    println!("rejected: {err} (exit code {})", err.exit_code());
    Ok(())
}
