//! A small multilayer-perceptron VAE written directly on `ndarray`:
//! forward and backward passes, the ELBO, Adam, training and persistence.

mod adam;
mod io;
mod train;

use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{denormalize, normalize, BoundsTable, Genome, SpaceTag};

pub use adam::{adam_step, AdamConfig, AdamState};
pub use io::{load_model, model_from_str, model_to_string, save_model, MODEL_FORMAT, MODEL_VERSION};
pub use train::{train_vae, EpochStats, TrainConfig, TrainHistory, DEFAULT_KL_WEIGHT, VALIDATION_SHARE};

#[derive(Debug, Error)]
pub enum NeuralError {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("dataset of {size} genomes is smaller than the batch size {batch}")]
    DatasetTooSmall { size: usize, batch: usize },
    #[error("invalid training config: {0}")]
    Config(String),
    #[error("malformed model file: {0}")]
    Malformed(String),
    #[error("model file version {found} is not supported (expected {expected})")]
    Version { found: u64, expected: u64 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Activation {
    Relu,
    Tanh,
    Identity,
}

impl Activation {
    fn apply(self, z: &mut Array2<f64>) {
        match self {
            Activation::Relu => z.mapv_inplace(|v| v.max(0.0)),
            Activation::Tanh => z.mapv_inplace(f64::tanh),
            Activation::Identity => {}
        }
    }

    /// Multiply `grad` in place by the derivative, given pre- and post-activations.
    fn backprop(self, grad: &mut Array2<f64>, pre: &Array2<f64>, post: &Array2<f64>) {
        match self {
            Activation::Relu => grad.zip_mut_with(pre, |g, &z| {
                if z <= 0.0 {
                    *g = 0.0
                }
            }),
            Activation::Tanh => grad.zip_mut_with(post, |g, &a| *g *= 1.0 - a * a),
            Activation::Identity => {}
        }
    }
}

/// Dense layer `y = act(W x + b)` with `W` stored as (out × in).
#[derive(Debug, Clone, PartialEq)]
pub struct MlpLayer {
    pub weights: Array2<f64>,
    pub biases: Array1<f64>,
    pub activation: Activation,
}

struct LayerCache {
    input: Array2<f64>,
    pre: Array2<f64>,
    post: Array2<f64>,
}

impl MlpLayer {
    /// Glorot-uniform weights, zero biases.
    pub fn glorot(inputs: usize, outputs: usize, activation: Activation, rng: &mut impl rand::Rng) -> Self {
        let limit = (6.0 / (inputs + outputs) as f64).sqrt();
        let weights = Array2::from_shape_simple_fn((outputs, inputs), || rng.random_range(-limit..=limit));
        Self {
            weights,
            biases: Array1::zeros(outputs),
            activation,
        }
    }

    pub fn inputs(&self) -> usize {
        self.weights.ncols()
    }

    pub fn outputs(&self) -> usize {
        self.weights.nrows()
    }

    pub fn param_count(&self) -> usize {
        self.weights.len() + self.biases.len()
    }

    /// Forward a batch (rows are samples).
    pub fn forward(&self, x: ArrayView2<f64>) -> Array2<f64> {
        let mut z = x.dot(&self.weights.t()) + &self.biases;
        self.activation.apply(&mut z);
        z
    }

    fn forward_cached(&self, x: Array2<f64>) -> LayerCache {
        let pre = x.dot(&self.weights.t()) + &self.biases;
        let mut post = pre.clone();
        self.activation.apply(&mut post);
        LayerCache { input: x, pre, post }
    }

    /// Given dL/d(post), accumulate parameter gradients and return dL/d(input).
    fn backward(&self, cache: &LayerCache, mut grad: Array2<f64>, out: &mut LayerGrad) -> Array2<f64> {
        self.activation.backprop(&mut grad, &cache.pre, &cache.post);
        out.weights += &grad.t().dot(&cache.input);
        out.biases += &grad.sum_axis(Axis(0));
        grad.dot(&self.weights)
    }
}

/// Gradient of one layer's parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerGrad {
    pub weights: Array2<f64>,
    pub biases: Array1<f64>,
}

impl LayerGrad {
    fn zeros_like(l: &MlpLayer) -> Self {
        Self {
            weights: Array2::zeros(l.weights.raw_dim()),
            biases: Array1::zeros(l.biases.raw_dim()),
        }
    }
}

/// Hidden-layer layout of the encoder; the decoder mirrors it. Written as
/// `vae1`, `vae2`, `vae3` or `custom-W1-W2-...` in files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Architecture {
    /// One hidden layer of 34 units.
    Vae1,
    /// Two hidden layers of 36 units.
    Vae2,
    /// Hidden layers of 128 and 64 units.
    Vae3,
    Custom(Vec<usize>),
}

impl Architecture {
    pub fn hidden(&self) -> Vec<usize> {
        match self {
            Architecture::Vae1 => vec![34],
            Architecture::Vae2 => vec![36, 36],
            Architecture::Vae3 => vec![128, 64],
            Architecture::Custom(h) => h.clone(),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Architecture::Vae1 => "vae1".into(),
            Architecture::Vae2 => "vae2".into(),
            Architecture::Vae3 => "vae3".into(),
            Architecture::Custom(h) => {
                let parts: Vec<String> = h.iter().map(|w| w.to_string()).collect();
                format!("custom-{}", parts.join("-"))
            }
        }
    }

    /// Closed-form parameter count for input size `m` and latent size `l`:
    /// encoder `m -> h1 -> ... -> hk`, two heads `hk -> l`, decoder
    /// `l -> hk -> ... -> h1 -> m`, every layer with a bias.
    pub fn param_count(&self, m: usize, l: usize) -> usize {
        let h = self.hidden();
        let dense = |a: usize, b: usize| a * b + b;
        let mut enc = 0;
        let mut prev = m;
        for &w in &h {
            enc += dense(prev, w);
            prev = w;
        }
        let heads = 2 * dense(prev, l);
        let mut dec = 0;
        let mut prev = l;
        for &w in h.iter().rev() {
            dec += dense(prev, w);
            prev = w;
        }
        dec += dense(prev, m);
        enc + heads + dec
    }
}

impl std::str::FromStr for Architecture {
    type Err = NeuralError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "vae1" => Ok(Architecture::Vae1),
            "vae2" => Ok(Architecture::Vae2),
            "vae3" => Ok(Architecture::Vae3),
            other => {
                let widths = other
                    .strip_prefix("custom-")
                    .map(|rest| rest.split('-').map(str::parse::<usize>).collect::<Result<Vec<_>, _>>());
                match widths {
                    Some(Ok(h)) if !h.is_empty() && h.iter().all(|&w| w > 0) => Ok(Architecture::Custom(h)),
                    _ => Err(NeuralError::Config(format!("unknown architecture `{other}`"))),
                }
            }
        }
    }
}

impl From<Architecture> for String {
    fn from(a: Architecture) -> Self {
        a.name()
    }
}

impl TryFrom<String> for Architecture {
    type Error = NeuralError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

/// Encoder/decoder weights plus the bounds used to normalize genomes.
#[derive(Debug, Clone, PartialEq)]
pub struct VaeModel {
    pub architecture: Architecture,
    pub input_dim: usize,
    pub latent_dim: usize,
    pub bounds: BoundsTable,
    pub encoder: Vec<MlpLayer>,
    pub mu_head: MlpLayer,
    pub logvar_head: MlpLayer,
    pub decoder: Vec<MlpLayer>,
}

/// Parameter gradients, in the same order as [`VaeModel::layers`].
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub layers: Vec<LayerGrad>,
}

/// Batch forward pass (rows are samples).
#[derive(Debug, Clone, PartialEq)]
pub struct VaeOutput {
    pub recon: Array2<f64>,
    pub mu: Array2<f64>,
    pub logvar: Array2<f64>,
    pub z: Array2<f64>,
}

/// The three loss terms; `total = mse + kl_weight * kl`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElboLoss {
    pub total: f64,
    pub mse: f64,
    pub kl: f64,
}

impl VaeModel {
    /// Fresh Glorot-initialized model. Encoder layers use ReLU, the two
    /// heads are linear, the decoder mirrors the encoder and ends in tanh.
    pub fn new(
        architecture: Architecture,
        input_dim: usize,
        latent_dim: usize,
        bounds: BoundsTable,
        rng: &mut impl rand::Rng,
    ) -> Result<Self, NeuralError> {
        if bounds.len() != input_dim {
            return Err(NeuralError::DimensionMismatch {
                expected: input_dim,
                actual: bounds.len(),
            });
        }
        let hidden = architecture.hidden();
        if input_dim == 0 || latent_dim == 0 || hidden.is_empty() || hidden.contains(&0) {
            return Err(NeuralError::Config("layer sizes must be positive".into()));
        }
        let mut encoder = Vec::new();
        let mut prev = input_dim;
        for &w in &hidden {
            encoder.push(MlpLayer::glorot(prev, w, Activation::Relu, rng));
            prev = w;
        }
        let mu_head = MlpLayer::glorot(prev, latent_dim, Activation::Identity, rng);
        let logvar_head = MlpLayer::glorot(prev, latent_dim, Activation::Identity, rng);
        let mut decoder = Vec::new();
        let mut prev = latent_dim;
        for &w in hidden.iter().rev() {
            decoder.push(MlpLayer::glorot(prev, w, Activation::Relu, rng));
            prev = w;
        }
        decoder.push(MlpLayer::glorot(prev, input_dim, Activation::Tanh, rng));
        Ok(Self {
            architecture,
            input_dim,
            latent_dim,
            bounds,
            encoder,
            mu_head,
            logvar_head,
            decoder,
        })
    }

    /// Layers in canonical order: encoder, mu head, logvar head, decoder.
    pub fn layers(&self) -> Vec<&MlpLayer> {
        let mut v: Vec<&MlpLayer> = self.encoder.iter().collect();
        v.push(&self.mu_head);
        v.push(&self.logvar_head);
        v.extend(self.decoder.iter());
        v
    }

    pub fn layers_mut(&mut self) -> Vec<&mut MlpLayer> {
        let mut v: Vec<&mut MlpLayer> = self.encoder.iter_mut().collect();
        v.push(&mut self.mu_head);
        v.push(&mut self.logvar_head);
        v.extend(self.decoder.iter_mut());
        v
    }

    pub fn param_count(&self) -> usize {
        self.layers().iter().map(|l| l.param_count()).sum()
    }

    fn check_width(&self, x: &ArrayView2<f64>, expected: usize) -> Result<(), NeuralError> {
        if x.ncols() == expected {
            Ok(())
        } else {
            Err(NeuralError::DimensionMismatch {
                expected,
                actual: x.ncols(),
            })
        }
    }

    fn run(layers: &[MlpLayer], x: ArrayView2<f64>) -> Array2<f64> {
        let mut h = x.to_owned();
        for l in layers {
            h = l.forward(h.view());
        }
        h
    }

    /// Encoder mean and log-variance for a normalized batch.
    pub fn encode_batch(&self, x: ArrayView2<f64>) -> Result<(Array2<f64>, Array2<f64>), NeuralError> {
        self.check_width(&x, self.input_dim)?;
        let h = Self::run(&self.encoder, x);
        Ok((self.mu_head.forward(h.view()), self.logvar_head.forward(h.view())))
    }

    /// Decoder output in `(-1, 1)` for a batch of latent codes.
    pub fn decode_batch(&self, z: ArrayView2<f64>) -> Result<Array2<f64>, NeuralError> {
        self.check_width(&z, self.latent_dim)?;
        Ok(Self::run(&self.decoder, z))
    }

    /// Forward pass with externally supplied noise `eps` (same shape as the
    /// latent batch): `z = mu + exp(logvar / 2) * eps`.
    pub fn forward(&self, x: ArrayView2<f64>, eps: ArrayView2<f64>) -> Result<VaeOutput, NeuralError> {
        let (mu, logvar) = self.encode_batch(x)?;
        self.check_width(&eps, self.latent_dim)?;
        if eps.nrows() != x.nrows() {
            return Err(NeuralError::DimensionMismatch {
                expected: x.nrows(),
                actual: eps.nrows(),
            });
        }
        let z = &mu + &(logvar.mapv(|v| (0.5 * v).exp()) * eps);
        let recon = self.decode_batch(z.view())?;
        Ok(VaeOutput { recon, mu, logvar, z })
    }

    /// ELBO and its gradient for one batch under fixed noise.
    pub fn loss_and_gradients(
        &self,
        x: ArrayView2<f64>,
        eps: ArrayView2<f64>,
        kl_weight: f64,
    ) -> Result<(ElboLoss, Gradients), NeuralError> {
        self.check_width(&x, self.input_dim)?;
        self.check_width(&eps, self.latent_dim)?;
        let b = x.nrows() as f64;
        let mut grads: Vec<LayerGrad> = self.layers().iter().map(|l| LayerGrad::zeros_like(l)).collect();
        let ne = self.encoder.len();

        let mut enc_caches = Vec::with_capacity(ne);
        let mut h = x.to_owned();
        for l in &self.encoder {
            let c = l.forward_cached(h);
            h = c.post.clone();
            enc_caches.push(c);
        }
        let mu_c = self.mu_head.forward_cached(h.clone());
        let lv_c = self.logvar_head.forward_cached(h);
        let (mu, logvar) = (&mu_c.post, &lv_c.post);
        let sigma = logvar.mapv(|v| (0.5 * v).exp());
        let z = mu + &(&sigma * &eps);
        let mut dec_caches = Vec::with_capacity(self.decoder.len());
        let mut h = z;
        for l in &self.decoder {
            let c = l.forward_cached(h);
            h = c.post.clone();
            dec_caches.push(c);
        }
        let recon = h;

        let loss = elbo_terms(x, recon.view(), mu.view(), logvar.view(), kl_weight);

        // Backward through the decoder.
        let n = (x.nrows() * x.ncols()) as f64;
        let mut g = (&recon - &x) * (2.0 / n);
        for (i, l) in self.decoder.iter().enumerate().rev() {
            g = l.backward(&dec_caches[i], g, &mut grads[ne + 2 + i]);
        }
        // Through the reparameterization and the KL term.
        let dmu = &g + &(mu * (kl_weight / b));
        let dlv = &g * &eps * &sigma * 0.5 + logvar.mapv(|v| kl_weight * 0.5 * (v.exp() - 1.0) / b);
        let mut dh = self.mu_head.backward(&mu_c, dmu, &mut grads[ne]);
        dh += &self.logvar_head.backward(&lv_c, dlv, &mut grads[ne + 1]);
        for (i, l) in self.encoder.iter().enumerate().rev() {
            dh = l.backward(&enc_caches[i], dh, &mut grads[i]);
        }
        Ok((loss, Gradients { layers: grads }))
    }

    /// Normalized genome batch as a matrix.
    pub fn normalized_batch(&self, genomes: &[Genome]) -> Result<Array2<f64>, NeuralError> {
        let mut x = Array2::zeros((genomes.len(), self.input_dim));
        for (i, g) in genomes.iter().enumerate() {
            if g.len() != self.input_dim {
                return Err(NeuralError::DimensionMismatch {
                    expected: self.input_dim,
                    actual: g.len(),
                });
            }
            let n = normalize(g, &self.bounds);
            for (j, v) in n.values.iter().enumerate() {
                x[[i, j]] = *v;
            }
        }
        Ok(x)
    }

    /// Latent code of an original-space genome: the encoder mean.
    pub fn encode(&self, g: &Genome) -> Result<Genome, NeuralError> {
        let x = self.normalized_batch(std::slice::from_ref(g))?;
        let (mu, _) = self.encode_batch(x.view())?;
        Ok(Genome::latent(mu.row(0).to_vec()))
    }

    /// Original-space genome decoded from any real latent vector.
    pub fn decode(&self, z: &Genome) -> Result<Genome, NeuralError> {
        if z.len() != self.latent_dim {
            return Err(NeuralError::DimensionMismatch {
                expected: self.latent_dim,
                actual: z.len(),
            });
        }
        let zb = Array2::from_shape_vec((1, self.latent_dim), z.values.clone())
            .expect("shape matches length");
        let r = self.decode_batch(zb.view())?;
        let out = Genome {
            values: r.row(0).to_vec(),
            space: SpaceTag::Original,
        };
        Ok(denormalize(&out, &self.bounds))
    }

    /// `decode(encode(g))`.
    pub fn reconstruct(&self, g: &Genome) -> Result<Genome, NeuralError> {
        self.decode(&self.encode(g)?)
    }
}

/// Single-sample forward pass drawing the noise from `rng`.
pub fn vae_forward(m: &VaeModel, x: &[f64], rng: &mut impl rand::Rng) -> Result<VaeOutput, NeuralError> {
    if x.len() != m.input_dim {
        return Err(NeuralError::DimensionMismatch {
            expected: m.input_dim,
            actual: x.len(),
        });
    }
    let xb = Array2::from_shape_vec((1, x.len()), x.to_vec()).expect("shape matches length");
    let eps = standard_normal((1, m.latent_dim), rng);
    m.forward(xb.view(), eps.view())
}

pub(crate) fn standard_normal(shape: (usize, usize), rng: &mut impl rand::Rng) -> Array2<f64> {
    Array2::from_shape_simple_fn(shape, || StandardNormal.sample(rng))
}

/// Plain ELBO (unit KL weight): mean squared error over batch and
/// dimensions plus the batch-mean KL divergence to the standard normal.
pub fn elbo_loss(x: ArrayView2<f64>, recon: ArrayView2<f64>, mu: ArrayView2<f64>, logvar: ArrayView2<f64>) -> ElboLoss {
    elbo_terms(x, recon, mu, logvar, 1.0)
}

/// ELBO with the KL term scaled by `kl_weight`.
pub fn elbo_terms(
    x: ArrayView2<f64>,
    recon: ArrayView2<f64>,
    mu: ArrayView2<f64>,
    logvar: ArrayView2<f64>,
    kl_weight: f64,
) -> ElboLoss {
    let n = (x.nrows() * x.ncols()).max(1) as f64;
    let mse = (&recon - &x).mapv(|d| d * d).sum() / n;
    let mut kl = 0.0;
    for (m, l) in mu.iter().zip(logvar.iter()) {
        kl += -0.5 * (1.0 + l - m * m - l.exp());
    }
    kl /= mu.nrows().max(1) as f64;
    ElboLoss {
        total: mse + kl_weight * kl,
        mse,
        kl,
    }
}
