//! Versioned, self-describing JSON model files.
//!
//! Weights are written row-major as decimal text with shortest round-trip
//! formatting, so `load(save(m)) == m` bit for bit.

use std::fs;
use std::io::Write;
use std::path::Path;

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use super::{Activation, Architecture, MlpLayer, NeuralError, VaeModel};
use crate::domain::BoundsTable;

pub const MODEL_FORMAT: &str = "latentgen-vae";
pub const MODEL_VERSION: u64 = 1;

#[derive(Serialize, Deserialize)]
struct LayerFile {
    inputs: usize,
    outputs: usize,
    activation: Activation,
    weights: Vec<f64>,
    biases: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u64,
    architecture: Architecture,
    input_dim: usize,
    latent_dim: usize,
    bounds: BoundsTable,
    encoder: Vec<LayerFile>,
    mu_head: LayerFile,
    logvar_head: LayerFile,
    decoder: Vec<LayerFile>,
}

fn to_file(l: &MlpLayer) -> LayerFile {
    LayerFile {
        inputs: l.inputs(),
        outputs: l.outputs(),
        activation: l.activation,
        weights: l.weights.iter().copied().collect(),
        biases: l.biases.to_vec(),
    }
}

fn from_file(f: LayerFile, name: &str) -> Result<MlpLayer, NeuralError> {
    if f.biases.len() != f.outputs {
        return Err(NeuralError::Malformed(format!(
            "{name}.biases: expected {} values, found {}",
            f.outputs,
            f.biases.len()
        )));
    }
    let n = f.weights.len();
    let weights = Array2::from_shape_vec((f.outputs, f.inputs), f.weights).map_err(|_| {
        NeuralError::Malformed(format!(
            "{name}.weights: expected {}x{} values, found {n}",
            f.outputs, f.inputs
        ))
    })?;
    if weights.iter().chain(f.biases.iter()).any(|v| !v.is_finite()) {
        return Err(NeuralError::Malformed(format!("{name}: non-finite parameter")));
    }
    Ok(MlpLayer {
        weights,
        biases: Array1::from_vec(f.biases),
        activation: f.activation,
    })
}

/// Serialize a model to its file text.
pub fn model_to_string(m: &VaeModel) -> String {
    let file = ModelFile {
        format: MODEL_FORMAT.into(),
        version: MODEL_VERSION,
        architecture: m.architecture.clone(),
        input_dim: m.input_dim,
        latent_dim: m.latent_dim,
        bounds: m.bounds.clone(),
        encoder: m.encoder.iter().map(to_file).collect(),
        mu_head: to_file(&m.mu_head),
        logvar_head: to_file(&m.logvar_head),
        decoder: m.decoder.iter().map(to_file).collect(),
    };
    let mut s = serde_json::to_string_pretty(&file).expect("model serializes");
    s.push('\n');
    s
}

/// Parse model file text, checking the version before anything else.
pub fn model_from_str(text: &str) -> Result<VaeModel, NeuralError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| NeuralError::Malformed(e.to_string()))?;
    match value.get("format").and_then(|v| v.as_str()) {
        Some(MODEL_FORMAT) => {}
        _ => return Err(NeuralError::Malformed(format!("format: expected \"{MODEL_FORMAT}\""))),
    }
    let version = value
        .get("version")
        .and_then(|v| v.as_u64())
        .ok_or_else(|| NeuralError::Malformed("version: missing or not an integer".into()))?;
    if version != MODEL_VERSION {
        return Err(NeuralError::Version {
            found: version,
            expected: MODEL_VERSION,
        });
    }
    let f: ModelFile = serde_json::from_value(value).map_err(|e| NeuralError::Malformed(e.to_string()))?;
    let encoder = f
        .encoder
        .into_iter()
        .enumerate()
        .map(|(i, l)| from_file(l, &format!("encoder[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    let decoder = f
        .decoder
        .into_iter()
        .enumerate()
        .map(|(i, l)| from_file(l, &format!("decoder[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    let model = VaeModel {
        architecture: f.architecture,
        input_dim: f.input_dim,
        latent_dim: f.latent_dim,
        bounds: f.bounds,
        encoder,
        mu_head: from_file(f.mu_head, "mu_head")?,
        logvar_head: from_file(f.logvar_head, "logvar_head")?,
        decoder,
    };
    check_shapes(&model)?;
    Ok(model)
}

fn check_shapes(m: &VaeModel) -> Result<(), NeuralError> {
    let bad = |what: &str| Err(NeuralError::Malformed(what.to_string()));
    if m.bounds.len() != m.input_dim {
        return bad("bounds: length differs from input_dim");
    }
    if m.encoder.is_empty() || m.decoder.is_empty() {
        return bad("encoder/decoder: no layers");
    }
    let mut width = m.input_dim;
    for (i, l) in m.encoder.iter().enumerate() {
        if l.inputs() != width {
            return bad(&format!("encoder[{i}]: input width {} does not chain", l.inputs()));
        }
        width = l.outputs();
    }
    for (name, h) in [("mu_head", &m.mu_head), ("logvar_head", &m.logvar_head)] {
        if h.inputs() != width || h.outputs() != m.latent_dim {
            return bad(&format!("{name}: expected {width} -> {}", m.latent_dim));
        }
    }
    let mut width = m.latent_dim;
    for (i, l) in m.decoder.iter().enumerate() {
        if l.inputs() != width {
            return bad(&format!("decoder[{i}]: input width {} does not chain", l.inputs()));
        }
        width = l.outputs();
    }
    let last = m.decoder.last().expect("non-empty");
    if width != m.input_dim || last.activation != Activation::Tanh {
        return bad("decoder: last layer must map to input_dim with tanh");
    }
    Ok(())
}

/// Write the model file atomically (temporary file, then rename).
pub fn save_model(m: &VaeModel, path: &Path) -> Result<(), NeuralError> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(model_to_string(m).as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<VaeModel, NeuralError> {
    model_from_str(&fs::read_to_string(path)?)
}
