//! Test-scenario generation for autonomous robotic systems by evolutionary
//! search in the latent space of a variational autoencoder.
//!
//! The pipeline has three phases:
//!
//! 1. **Dataset collection** ([`evolve::collect_dataset`]): a genetic algorithm
//!    guided by a cheap heuristic fitness produces a dataset of promising
//!    scenarios.
//! 2. **VAE training** ([`neural::train_vae`]): a small MLP variational
//!    autoencoder learns a latent representation of that dataset.
//! 3. **Latent search** ([`evolve::run_latent_search`]): a real-valued GA
//!    searches the latent space, decoding every candidate back into a concrete
//!    scenario and scoring it with a failure oracle.
//!
//! Two problems are supported: obstacle placement for a UAV flying a fixed
//! mission ([`UseCase::Uav`]) and road-topology generation for a lane-keeping
//! vehicle ([`UseCase::Ads`]). Deterministic surrogate physics
//! ([`surrogate`]) stands in for a simulator.
//!
//! See the `examples/` directory of this crate for one runnable program per
//! capability, and the `latentgen` binary for the batch pipeline.

pub mod domain;
pub mod evolve;
pub mod geometry;
pub mod metrics;
pub mod neural;
pub mod pipeline;
pub mod seed;
pub mod surrogate;

pub use domain::{BoundsTable, Genome, ObstacleScene, RoadSpec, SpaceTag, UseCase};
pub use evolve::{GaConfig, RunArchive};
pub use neural::{Architecture, TrainConfig, VaeModel};
pub use surrogate::{FitnessOracle, FitnessOutcome};
