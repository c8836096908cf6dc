//! Regressors over flattened time×feature inputs: closed-form ridge, a
//! small feedforward net, and a grid-convolution net that consumes the
//! 2D temporal matrix directly. All three train behind one interface
//! with threshold/patience/max-epoch halting.

mod gridconv;
mod metrics;
mod mlp;
mod ridge;
mod trainer;
mod wls;

pub use gridconv::GridConvNet;
pub use metrics::{improvement_percent, metrics, MetricSet};
pub use mlp::MlpNet;
pub use wls::{weighted_least_squares, DEFAULT_RIDGE_EPS};

use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::dataset::{Sample, TemporalDataset};
use crate::error::{Error, Result};
use crate::grid::Grid;

pub const MODEL_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegressorKind {
    Ridge,
    Mlp,
    Gridconv,
}

impl std::fmt::Display for RegressorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RegressorKind::Ridge => write!(f, "ridge"),
            RegressorKind::Mlp => write!(f, "mlp"),
            RegressorKind::Gridconv => write!(f, "gridconv"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RegressorConfig {
    pub kind: RegressorKind,
    pub ridge_lambda: f64,
    pub mlp_hidden: Vec<usize>,
    pub learning_rate: f64,
    pub max_epochs: usize,
    /// Validation-MSE level at which iterative training halts.
    pub stop_threshold: f64,
    /// Epochs without validation improvement before halting.
    pub patience: usize,
    pub seed: u64,
}

impl Default for RegressorConfig {
    fn default() -> Self {
        RegressorConfig {
            kind: RegressorKind::Mlp,
            ridge_lambda: 1e-3,
            mlp_hidden: vec![32, 16],
            learning_rate: 1e-2,
            max_epochs: 500,
            stop_threshold: 0.02,
            patience: 20,
            seed: 42,
        }
    }
}

impl RegressorConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.ridge_lambda.is_finite() || self.ridge_lambda < 0.0 {
            return Err(Error::config("ridge_lambda must be a nonnegative real"));
        }
        if self.mlp_hidden.is_empty() || self.mlp_hidden.contains(&0) {
            return Err(Error::config(
                "mlp_hidden must be a list of positive integers",
            ));
        }
        if !self.learning_rate.is_finite() || self.learning_rate <= 0.0 {
            return Err(Error::config("learning_rate must be positive"));
        }
        if self.max_epochs == 0 {
            return Err(Error::config("max_epochs must be positive"));
        }
        if self.stop_threshold.is_nan() || self.stop_threshold < 0.0 {
            return Err(Error::config("stop_threshold must be nonnegative"));
        }
        if self.patience == 0 {
            return Err(Error::config("patience must be positive"));
        }
        Ok(())
    }
}

/// The input geometry a trained model accepts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputShape {
    pub t_steps: usize,
    pub n_temporal: usize,
    pub n_static: usize,
}

impl InputShape {
    pub fn of(dataset: &TemporalDataset) -> Self {
        InputShape {
            t_steps: dataset.t_steps(),
            n_temporal: dataset.n_temporal(),
            n_static: dataset.n_static(),
        }
    }

    pub fn flat_dim(&self) -> usize {
        self.t_steps * self.n_temporal + self.n_static
    }
}

/// How a sample is linearized for vector-input models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlattenOrder {
    /// Temporal matrix row by row (time-major), then static features.
    RowMajorTemporalThenStatic,
}

/// Linearize a sample: temporal rows in time order, then statics.
pub fn flatten(sample: &Sample) -> Vec<f64> {
    let mut out = Vec::with_capacity(sample.temporal.len() + sample.static_features.len());
    out.extend_from_slice(sample.temporal.data());
    out.extend_from_slice(&sample.static_features);
    out
}

/// Invert `flatten` for a known shape.
pub fn unflatten(flat: &[f64], shape: &InputShape) -> Result<(Grid, Vec<f64>)> {
    if flat.len() != shape.flat_dim() {
        return Err(Error::shape(format!(
            "flat vector of length {} does not match shape {}x{}+{}",
            flat.len(),
            shape.t_steps,
            shape.n_temporal,
            shape.n_static
        )));
    }
    let split = shape.t_steps * shape.n_temporal;
    let temporal = Grid::from_vec(shape.t_steps, shape.n_temporal, flat[..split].to_vec())?;
    Ok((temporal, flat[split..].to_vec()))
}

/// Anything that maps a flattened input vector to a scalar prediction.
/// `Sync` so explainers can fan out over samples.
pub trait FlatPredictor: Sync {
    fn dim(&self) -> usize;
    fn predict_flat(&self, x: &[f64]) -> f64;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelParams {
    Ridge { weights: Vec<f64>, bias: f64 },
    Mlp(MlpNet),
    Gridconv(GridConvNet),
}

/// An immutable trained regressor. Inference is deterministic and safe
/// to share across threads.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub kind: RegressorKind,
    pub shape: InputShape,
    pub order: FlattenOrder,
    pub params: ModelParams,
}

impl TrainedModel {
    /// One finite prediction per sample; errors on any shape mismatch.
    pub fn predict(&self, samples: &[Sample]) -> Result<Vec<f64>> {
        samples
            .iter()
            .map(|s| {
                let flat = flatten(s);
                if flat.len() != self.shape.flat_dim() {
                    return Err(Error::shape(format!(
                        "sample '{}' flattens to {} values, model expects {}",
                        s.id,
                        flat.len(),
                        self.shape.flat_dim()
                    )));
                }
                Ok(self.predict_flat(&flat))
            })
            .collect()
    }

    pub fn predict_dataset(&self, dataset: &TemporalDataset) -> Result<Vec<f64>> {
        self.predict(&dataset.samples)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let doc = ModelDocument {
            schema_version: MODEL_SCHEMA_VERSION,
            model: self.clone(),
        };
        std::fs::write(path, serde_json::to_string_pretty(&doc)? + "\n")?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<TrainedModel> {
        let raw = std::fs::read_to_string(path)?;
        let doc: ModelDocument = serde_json::from_str(&raw)?;
        if doc.schema_version != MODEL_SCHEMA_VERSION {
            return Err(Error::data(format!(
                "unsupported model schema version {}",
                doc.schema_version
            )));
        }
        Ok(doc.model)
    }
}

impl FlatPredictor for TrainedModel {
    fn dim(&self) -> usize {
        self.shape.flat_dim()
    }

    fn predict_flat(&self, x: &[f64]) -> f64 {
        match &self.params {
            ModelParams::Ridge { weights, bias } => {
                bias + weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>()
            }
            ModelParams::Mlp(net) => net.predict_flat(x),
            ModelParams::Gridconv(net) => net.predict_flat(x),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct ModelDocument {
    schema_version: u32,
    model: TrainedModel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HaltReason {
    /// Validation MSE reached `stop_threshold`.
    Threshold,
    /// No validation improvement for `patience` epochs.
    Patience,
    MaxEpochs,
    /// Non-iterative solve; no halting rule applies.
    ClosedForm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub epochs_run: usize,
    /// Monotonic-clock wall time around the whole train call. Excluded
    /// from JSON so serialized reports stay deterministic; pipelines
    /// surface it through their timing sidecar.
    #[serde(skip)]
    pub wall_time_seconds: f64,
    pub final_train_mse: f64,
    pub final_val_mse: f64,
    pub halted_by: HaltReason,
}

/// Train a regressor on flattened inputs. Both datasets must be
/// normalized, non-empty, and shape-consistent with each other.
pub fn train(
    train: &TemporalDataset,
    val: &TemporalDataset,
    config: &RegressorConfig,
) -> Result<(TrainedModel, TrainReport)> {
    config.validate()?;
    if train.samples.is_empty() || val.samples.is_empty() {
        return Err(Error::data("train called on an empty dataset"));
    }
    if !train.is_normalized() || !val.is_normalized() {
        return Err(Error::config("train expects normalized datasets"));
    }
    let shape = InputShape::of(train);
    if InputShape::of(val) != shape {
        return Err(Error::shape(format!(
            "validation shape {:?} differs from training shape {shape:?}",
            InputShape::of(val)
        )));
    }

    let started = Instant::now();
    let (model, mut report) = match config.kind {
        RegressorKind::Ridge => ridge::train_ridge(train, val, config, shape)?,
        RegressorKind::Mlp => mlp::train_mlp(train, val, config, shape)?,
        RegressorKind::Gridconv => gridconv::train_gridconv(train, val, config, shape)?,
    };
    report.wall_time_seconds = started.elapsed().as_secs_f64();
    Ok((model, report))
}

/// Free-function form of `TrainedModel::predict`.
pub fn predict(model: &TrainedModel, samples: &[Sample]) -> Result<Vec<f64>> {
    model.predict(samples)
}

pub(crate) fn flat_inputs(dataset: &TemporalDataset) -> Vec<Vec<f64>> {
    dataset.samples.iter().map(flatten).collect()
}
