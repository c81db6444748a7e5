//! Score random scenarios of both use cases with the cheap heuristics and
//! the simulation surrogates.

use latentgen::domain::{sample_genome, Phenotype, UseCase};
use latentgen::seed;
use latentgen::surrogate::{FitnessOracle, OracleKind, Surrogate};

fn main() {
    let mut rng = seed::rng(7);
    for uc in [UseCase::Ads, UseCase::Uav] {
        let fs = Surrogate::new(OracleKind::simplified(uc));
        let fsim = Surrogate::new(OracleKind::simulated(uc));
        println!("{uc}:");
        for i in 0..5 {
            let g = sample_genome(uc, &mut rng);
            let p = Phenotype::decode(uc, &g).expect("sampled genomes decode");
            let (a, b) = (fs.evaluate(&p, i), fsim.evaluate(&p, i));
            println!(
                "  scenario {i}: valid = {}, {} = {:.4}, {} = {:.4}, failed = {}",
                b.valid,
                fs.name(),
                a.fitness,
                fsim.name(),
                b.fitness,
                b.failed
            );
        }
    }
}
