use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use latentgen::domain::{Genome, Phenotype};
use latentgen::pipeline::{self, plot, Algorithm, CollectMode, PipelineConfig, PipelineError, SearchSpace};
use latentgen::surrogate::road::simulate;
use latentgen::surrogate::uav::flown_trajectory;
use latentgen::surrogate::BicycleParams;

#[derive(Parser)]
#[command(name = "latentgen", version, about = "Latent-space scenario generation pipeline")]
struct Cli {
    /// TOML pipeline configuration; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed, overriding the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output path of the phase, overriding the configured path.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a dataset of valid genomes.
    Collect {
        #[arg(long, conflicts_with = "optimized")]
        random: bool,
        #[arg(long)]
        optimized: bool,
        /// Number of genomes, overriding the configuration.
        #[arg(long)]
        count: Option<usize>,
    },
    /// Train a VAE on a dataset, or sweep training configurations.
    Train {
        #[arg(long)]
        dataset: Option<PathBuf>,
        /// Run the architecture and latent-size grids instead of one model.
        #[arg(long)]
        sweep: bool,
    },
    /// Run one search cell and write its archive.
    Search {
        #[arg(long, default_value = "latent")]
        space: String,
        #[arg(long, default_value = "ga2")]
        algo: String,
        #[arg(long)]
        model: Option<PathBuf>,
        /// Evaluation budget, overriding the configuration.
        #[arg(long)]
        budget: Option<usize>,
        /// Run index within the cell (selects the derived seed).
        #[arg(long, default_value_t = 0)]
        run: u64,
    },
    /// Count failures and compare archive groups.
    Report {
        /// Groups as `NAME=ARCHIVE[,ARCHIVE...]`; a bare path is its own group.
        groups: Vec<String>,
    },
    /// Render scenarios, traversals or failure distributions as SVG.
    Plot {
        #[arg(long, value_enum)]
        mode: PlotMode,
        /// Archive (scene, road), model (traversal) or counts CSV (boxplot).
        #[arg(long)]
        input: PathBuf,
        /// Archive record to draw; defaults to the best one.
        #[arg(long)]
        record: Option<usize>,
        /// Latent dimension swept by a traversal.
        #[arg(long, default_value_t = 0)]
        dim: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PlotMode {
    Scene,
    Road,
    Traversal,
    Boxplot,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<(), PipelineError> {
    let mut cfg = match &cli.config {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    let out = |default: &Path| cli.out.clone().unwrap_or_else(|| default.to_path_buf());
    match cli.command {
        Command::Collect { random, optimized, count } => {
            if let Some(n) = count {
                cfg.dataset_size = n;
            }
            cfg.validate()?;
            let mode = match (random, optimized) {
                (true, _) => CollectMode::Random,
                (_, true) => CollectMode::Optimized,
                _ => return Err(PipelineError::Config("collect needs --random or --optimized".into())),
            };
            let data = pipeline::cmd_collect(&cfg, mode)?;
            let path = out(&cfg.paths.dataset);
            pipeline::save_dataset(&data, &path)?;
            eprintln!("wrote {} genomes to {}", data.genomes.len(), path.display());
        }
        Command::Train { dataset, sweep } => {
            let data = pipeline::load_dataset(&dataset.unwrap_or(cfg.paths.dataset.clone()))?;
            if sweep {
                let rows = pipeline::cmd_sweep(&cfg, &data)?;
                let path = out(&cfg.paths.history);
                pipeline::write_text(&path, &pipeline::sweep_csv(&rows))?;
                pipeline::write_text(&path.with_extension("timing.csv"), &pipeline::sweep_timing_csv(&rows))?;
                eprintln!("wrote {} sweep rows to {}", rows.len(), path.display());
            } else {
                let t = pipeline::cmd_train(&cfg, &data)?;
                let path = out(&cfg.paths.model);
                pipeline::save_vae(&t.model, &path)?;
                pipeline::write_text(&cfg.paths.history, &pipeline::history_csv(&t.history))?;
                eprintln!(
                    "wrote {} (validation loss {:.5}, mean reconstruction distance {:.5}, {:.1} s)",
                    path.display(),
                    t.history.final_val_loss().unwrap_or(f64::NAN),
                    t.mean_distance(),
                    t.history.wall_time
                );
            }
        }
        Command::Search { space, algo, model, budget, run } => {
            if budget.is_some() {
                cfg.search_evaluations = budget;
            }
            cfg.validate()?;
            let space: SearchSpace = space.parse()?;
            let algo: Algorithm = algo.parse()?;
            let model = match space {
                SearchSpace::Latent => Some(pipeline::load_vae(&model.unwrap_or(cfg.paths.model.clone()))?),
                SearchSpace::Original => None,
            };
            let archive = pipeline::cmd_search(&cfg, space, algo, model.as_ref(), run)?;
            let path = out(&cfg.paths.archive);
            pipeline::save_archive(&archive, &path)?;
            let failed = archive.records.iter().filter(|r| r.failed).count();
            eprintln!("wrote {} evaluations ({failed} failing) to {}", archive.evaluations(), path.display());
        }
        Command::Report { groups } => {
            if groups.is_empty() {
                return Err(PipelineError::Config("report needs at least one archive".into()));
            }
            let mut loaded = Vec::new();
            for g in &groups {
                let (name, list) = match g.split_once('=') {
                    Some((n, l)) => (n.to_string(), l.to_string()),
                    None => (g.clone(), g.clone()),
                };
                let archives = list
                    .split(',')
                    .map(|p| pipeline::load_archive(Path::new(p)))
                    .collect::<Result<Vec<_>, _>>()?;
                loaded.push((name, archives));
            }
            let report = pipeline::build_report(&loaded)?;
            let path = out(&cfg.paths.report);
            pipeline::write_text(&path, &report.stats_csv())?;
            pipeline::write_text(&path.with_extension("counts.csv"), &report.counts_csv())?;
            print!("{}", report.counts_csv());
            print!("{}", report.stats_csv());
        }
        Command::Plot { mode, input, record, dim } => {
            let svg = match mode {
                PlotMode::Scene | PlotMode::Road => {
                    let a = pipeline::load_archive(&input)?;
                    let r = match record {
                        Some(i) => a.records.get(i).ok_or_else(|| PipelineError::Input(format!("no record {i}")))?,
                        None => a
                            .final_genomes()
                            .next()
                            .ok_or_else(|| PipelineError::Input("archive has no records".into()))?,
                    };
                    match (&r.phenotype, mode) {
                        (Some(Phenotype::Scene(s)), PlotMode::Scene) => {
                            let planner = cfg.search_oracle()?.planner.with_seed(r.seed);
                            plot::scene_svg(s, flown_trajectory(s, &planner).as_ref())
                        }
                        (Some(Phenotype::Road(road)), PlotMode::Road) => {
                            plot::road_svg(road, Some(&simulate(road, &BicycleParams::default())))
                        }
                        _ => return Err(PipelineError::Input("record has no phenotype of the requested kind".into())),
                    }
                }
                PlotMode::Traversal => {
                    let m = pipeline::load_vae(&input)?;
                    let base = Genome::latent(vec![0.0; m.latent_dim]);
                    plot::traversal_svg(&m, cfg.use_case, &base, dim).map_err(PipelineError::Config)?
                }
                PlotMode::Boxplot => boxplot_from_counts(&pipeline::read_text(&input)?)?,
            };
            let path = out(Path::new("plot.svg"));
            pipeline::write_text(&path, &svg)?;
            eprintln!("wrote {}", path.display());
        }
    }
    Ok(())
}

/// Failure counts per group from a report counts CSV.
fn boxplot_from_counts(text: &str) -> Result<String, PipelineError> {
    let mut lines = text.lines();
    if lines.next() != Some(pipeline::report::COUNTS_HEADER) {
        return Err(PipelineError::Input("not a report counts file".into()));
    }
    let mut groups: Vec<(String, Vec<f64>)> = Vec::new();
    for (i, line) in lines.enumerate() {
        let cols: Vec<&str> = line.split(',').collect();
        let failures: f64 = cols
            .get(3)
            .and_then(|c| c.parse().ok())
            .ok_or_else(|| PipelineError::Input(format!("line {}: bad failure count", i + 2)))?;
        match groups.iter_mut().find(|g| g.0 == cols[0]) {
            Some(g) => g.1.push(failures),
            None => groups.push((cols[0].to_string(), vec![failures])),
        }
    }
    Ok(plot::boxplot_svg(&groups))
}
