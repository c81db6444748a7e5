//! Random search and both GAs in the original genome space, for the road
//! and the UAV use case.

use latentgen::domain::UseCase;
use latentgen::metrics::count_failures;
use latentgen::pipeline::{cmd_search, Algorithm, PipelineConfig, SearchSpace};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (uc, budget) in [(UseCase::Ads, 1000), (UseCase::Uav, 150)] {
        let cfg = PipelineConfig {
            use_case: uc,
            seed: 9,
            search_evaluations: Some(budget),
            ..Default::default()
        };
        for algo in [Algorithm::Rs, Algorithm::Ga1, Algorithm::Ga2] {
            let a = cmd_search(&cfg, SearchSpace::Original, algo, None, 0)?;
            let invalid = a.records.iter().filter(|r| !r.valid).count();
            println!(
                "{uc} {}: {} evaluations, {invalid} invalid, {} distinct failures",
                algo.name(),
                a.evaluations(),
                count_failures(&a.records, &uc.bounds())
            );
        }
    }
    Ok(())
}
