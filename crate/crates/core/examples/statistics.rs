//! Compare two groups of searches with the rank test and effect size.

use latentgen::domain::UseCase;
use latentgen::metrics::compare;
use latentgen::pipeline::{build_report, cmd_search, Algorithm, PipelineConfig, SearchSpace};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = PipelineConfig {
        use_case: UseCase::Ads,
        seed: 21,
        search_evaluations: Some(400),
        ..Default::default()
    };
    let mut groups = Vec::new();
    for algo in [Algorithm::Rs, Algorithm::Ga2] {
        let runs = (0..5)
            .map(|run| cmd_search(&cfg, SearchSpace::Original, algo, None, run))
            .collect::<Result<Vec<_>, _>>()?;
        groups.push((algo.name().to_string(), runs));
    }
    let report = build_report(&groups)?;
    print!("{}", report.counts_csv());
    print!("{}", report.stats_csv());

    // The same test on plain numbers.
    let s = compare(&[12.0, 15.0, 14.0, 17.0, 16.0], &[9.0, 11.0, 10.0, 12.0, 8.0])?;
    println!("p = {:.4}, delta = {:.2} ({:?})", s.p_value, s.cliffs_delta, s.magnitude);
    Ok(())
}
