//! Mini-batch training with a seeded train/validation split.

use std::time::Instant;

use ndarray::{Array2, Axis};
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{adam_step, standard_normal, AdamConfig, AdamState, Architecture, NeuralError, VaeModel};
use crate::domain::{BoundsTable, Genome};
use crate::seed;

/// Share of the dataset held out for validation.
pub const VALIDATION_SHARE: f64 = 0.2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_eps: f64,
    pub seed: u64,
    pub architecture: Architecture,
    /// Latent size; `None` uses the input size.
    pub latent_dim: Option<usize>,
    /// Weight of the KL term in the training loss.
    pub kl_weight: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 1000,
            batch_size: 512,
            learning_rate: 1e-3,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_eps: 1e-8,
            seed: 0,
            architecture: Architecture::Vae3,
            latent_dim: None,
            kl_weight: DEFAULT_KL_WEIGHT,
        }
    }
}

/// Default KL weight. With the reconstruction term averaged over input
/// dimensions and the KL term summed over latent dimensions, a unit weight
/// lets the KL term dominate and the posterior collapses onto the prior.
pub const DEFAULT_KL_WEIGHT: f64 = 1e-3;

impl TrainConfig {
    fn adam(&self) -> AdamConfig {
        AdamConfig {
            learning_rate: self.learning_rate,
            beta1: self.adam_beta1,
            beta2: self.adam_beta2,
            eps: self.adam_eps,
        }
    }

    fn validate(&self) -> Result<(), NeuralError> {
        if self.epochs == 0 || self.batch_size == 0 {
            return Err(NeuralError::Config("epochs and batch_size must be at least 1".into()));
        }
        if !(self.learning_rate > 0.0) || !(self.kl_weight >= 0.0) {
            return Err(NeuralError::Config("learning_rate must be positive and kl_weight non-negative".into()));
        }
        Ok(())
    }
}

/// Losses after one epoch. Validation uses the mean latent (no noise);
/// `mse_term` and `kl_term` are the validation components of `val_loss`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_loss: f64,
    pub mse_term: f64,
    pub kl_term: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainHistory {
    pub epochs: Vec<EpochStats>,
    /// Dataset indices of the validation genomes.
    pub validation: Vec<usize>,
    /// Seconds spent training (not part of any deterministic output).
    pub wall_time: f64,
}

impl TrainHistory {
    pub fn final_val_loss(&self) -> Option<f64> {
        self.epochs.last().map(|e| e.val_loss)
    }
}

/// Train a fresh model on original-space genomes.
pub fn train_vae(
    dataset: &[Genome],
    bounds: &BoundsTable,
    cfg: &TrainConfig,
) -> Result<(VaeModel, TrainHistory), NeuralError> {
    cfg.validate()?;
    if dataset.len() < cfg.batch_size.max(2) {
        return Err(NeuralError::DatasetTooSmall {
            size: dataset.len(),
            batch: cfg.batch_size,
        });
    }
    let started = Instant::now();
    let m = bounds.len();
    let l = cfg.latent_dim.unwrap_or(m);
    let mut model = VaeModel::new(
        cfg.architecture.clone(),
        m,
        l,
        bounds.clone(),
        &mut seed::rng(seed::derive(cfg.seed, "init")),
    )?;
    let all = model.normalized_batch(dataset)?;

    let mut order: Vec<usize> = (0..dataset.len()).collect();
    order.shuffle(&mut seed::rng(seed::derive(cfg.seed, "split")));
    let n_val = ((dataset.len() as f64 * VALIDATION_SHARE).round() as usize).clamp(1, dataset.len() - 1);
    let validation: Vec<usize> = order[..n_val].to_vec();
    let mut train: Vec<usize> = order[n_val..].to_vec();
    let val_x = all.select(Axis(0), &validation);
    let val_eps = Array2::zeros((val_x.nrows(), l));

    let adam = cfg.adam();
    let mut states: Vec<(AdamState, AdamState)> = model
        .layers()
        .iter()
        .map(|layer| (AdamState::new(layer.weights.len()), AdamState::new(layer.biases.len())))
        .collect();
    let mut rng = seed::rng(seed::derive(cfg.seed, "batches"));
    let mut epochs = Vec::with_capacity(cfg.epochs);

    for epoch in 0..cfg.epochs {
        train.shuffle(&mut rng);
        let mut sum = 0.0;
        for chunk in train.chunks(cfg.batch_size) {
            let x = all.select(Axis(0), chunk);
            let eps = standard_normal((chunk.len(), l), &mut rng);
            let (loss, grads) = model.loss_and_gradients(x.view(), eps.view(), cfg.kl_weight)?;
            sum += loss.total * chunk.len() as f64;
            for ((layer, g), (sw, sb)) in model.layers_mut().into_iter().zip(&grads.layers).zip(&mut states) {
                adam_step(
                    layer.weights.as_slice_mut().expect("standard layout"),
                    g.weights.as_slice().expect("standard layout"),
                    sw,
                    &adam,
                );
                adam_step(
                    layer.biases.as_slice_mut().expect("standard layout"),
                    g.biases.as_slice().expect("standard layout"),
                    sb,
                    &adam,
                );
            }
        }
        let out = model.forward(val_x.view(), val_eps.view())?;
        let val = super::elbo_terms(val_x.view(), out.recon.view(), out.mu.view(), out.logvar.view(), cfg.kl_weight);
        epochs.push(EpochStats {
            epoch: epoch + 1,
            train_loss: sum / train.len() as f64,
            val_loss: val.total,
            mse_term: val.mse,
            kl_term: val.kl,
        });
    }
    let history = TrainHistory {
        epochs,
        validation,
        wall_time: started.elapsed().as_secs_f64(),
    };
    Ok((model, history))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{sample_kappa_genome, BoundsTable};

    fn roads(n: usize, s: u64) -> Vec<Genome> {
        let mut rng = seed::rng(s);
        (0..n).map(|_| sample_kappa_genome(&mut rng, &BoundsTable::road())).collect()
    }

    #[test]
    fn one_epoch_one_entry() {
        let cfg = TrainConfig {
            epochs: 1,
            architecture: Architecture::Vae1,
            ..Default::default()
        };
        let (_, h) = train_vae(&roads(512, 1), &BoundsTable::road(), &cfg).unwrap();
        assert_eq!(h.epochs.len(), 1);
        assert_eq!(h.validation.len(), 102);
    }

    #[test]
    fn too_small_dataset_is_rejected() {
        let err = train_vae(&roads(100, 1), &BoundsTable::road(), &TrainConfig::default()).unwrap_err();
        assert!(matches!(err, NeuralError::DatasetTooSmall { size: 100, batch: 512 }));
    }

    #[test]
    fn same_seed_same_weights() {
        let cfg = TrainConfig {
            epochs: 3,
            batch_size: 64,
            architecture: Architecture::Vae1,
            seed: 9,
            ..Default::default()
        };
        let data = roads(300, 2);
        let (a, ha) = train_vae(&data, &BoundsTable::road(), &cfg).unwrap();
        let (b, hb) = train_vae(&data, &BoundsTable::road(), &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(ha.epochs, hb.epochs);
    }

    #[test]
    fn validation_loss_descends() {
        let cfg = TrainConfig {
            epochs: 60,
            batch_size: 128,
            architecture: Architecture::Vae2,
            ..Default::default()
        };
        let (_, h) = train_vae(&roads(1000, 3), &BoundsTable::road(), &cfg).unwrap();
        assert!(h.epochs.last().unwrap().val_loss < h.epochs[0].val_loss);
    }
}
