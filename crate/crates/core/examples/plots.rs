//! Render a UAV scene with its flown path, a road with the simulated drive,
//! a latent traversal and a box plot as SVG files.

use std::fs;

use latentgen::domain::{sample_genome, Genome, Phenotype, UseCase};
use latentgen::neural::{Architecture, VaeModel};
use latentgen::pipeline::plot;
use latentgen::seed;
use latentgen::surrogate::road::simulate;
use latentgen::surrogate::uav::flown_trajectory;
use latentgen::surrogate::{BicycleParams, PlannerParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("latentgen-plots");
    fs::create_dir_all(&dir)?;
    let mut rng = seed::rng(4);

    let Phenotype::Scene(scene) = Phenotype::decode(UseCase::Uav, &sample_genome(UseCase::Uav, &mut rng))? else {
        unreachable!()
    };
    let path = flown_trajectory(&scene, &PlannerParams::default());
    fs::write(dir.join("scene.svg"), plot::scene_svg(&scene, path.as_ref()))?;

    let Phenotype::Road(road) = Phenotype::decode(UseCase::Ads, &sample_genome(UseCase::Ads, &mut rng))? else {
        unreachable!()
    };
    fs::write(dir.join("road.svg"), plot::road_svg(&road, Some(&simulate(&road, &BicycleParams::default()))))?;

    // An untrained model still decodes; train one for meaningful traversals.
    let bounds = UseCase::Ads.bounds();
    let model = VaeModel::new(Architecture::Vae1, 17, 4, bounds, &mut rng)?;
    let svg = plot::traversal_svg(&model, UseCase::Ads, &Genome::latent(vec![0.0; 4]), 0)?;
    fs::write(dir.join("traversal.svg"), svg)?;

    let groups = vec![("rs".to_string(), vec![3.0, 5.0, 4.0, 6.0]), ("ga2".to_string(), vec![8.0, 11.0, 9.0, 12.0])];
    fs::write(dir.join("boxplot.svg"), plot::boxplot_svg(&groups))?;

    println!("wrote scene.svg, road.svg, traversal.svg and boxplot.svg to {}", dir.display());
    Ok(())
}
