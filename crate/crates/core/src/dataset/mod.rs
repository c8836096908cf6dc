//! Dataset representation: rectangular time×feature samples with scalar
//! targets, CSV ingestion, min-max normalization, splitting, and the
//! seeded synthetic benchmark generator.

mod csv_io;
mod normalize;
mod split;
mod synthetic;

pub use csv_io::{load_csv, load_schema, save_csv, save_schema};
pub use normalize::{denormalize, denormalize_dataset, normalize, FeatureRef};
pub use split::{split, SplitFractions};
pub use synthetic::generate_synthetic;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureKind {
    /// One value per time step (a column of the T×F matrix).
    Temporal,
    /// One value per sample, constant over time.
    Static,
}

/// A named feature. `index` is the position within its own kind's space;
/// temporal and static indices each run contiguously from 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSpec {
    pub name: String,
    pub kind: FeatureKind,
    pub index: usize,
}

impl FeatureSpec {
    pub fn temporal(name: impl Into<String>, index: usize) -> Self {
        FeatureSpec {
            name: name.into(),
            kind: FeatureKind::Temporal,
            index,
        }
    }

    pub fn static_(name: impl Into<String>, index: usize) -> Self {
        FeatureSpec {
            name: name.into(),
            kind: FeatureKind::Static,
            index,
        }
    }
}

/// One observation: a T×F_t matrix (rows = time steps, columns = temporal
/// features), optional static features, and a scalar target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub id: String,
    pub temporal: Grid,
    pub static_features: Vec<f64>,
    pub target: f64,
}

/// Per-feature min/max recorded when a dataset is normalized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureRange {
    pub min: f64,
    pub max: f64,
}

impl FeatureRange {
    pub fn is_constant(&self) -> bool {
        self.max == self.min
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizationSpec {
    pub temporal: Vec<FeatureRange>,
    pub static_features: Vec<FeatureRange>,
    /// Value constant features map to (their range carries no information).
    pub constant_fill: f64,
}

pub const DEFAULT_CONSTANT_FILL: f64 = 0.5;

/// Configuration for the synthetic benchmark generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticConfig {
    pub n_samples: usize,
    /// 1 = flat tabular.
    pub t_steps: usize,
    pub n_structured: usize,
    pub n_noise: usize,
    /// Std of the Gaussian noise added to the raw target.
    pub noise_sigma: f64,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            n_samples: 1000,
            t_steps: 1,
            n_structured: 20,
            n_noise: 10,
            noise_sigma: 0.05,
            seed: 42,
        }
    }
}

impl SyntheticConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return Err(Error::config("n_samples must be positive"));
        }
        if self.t_steps == 0 {
            return Err(Error::config("t_steps must be positive"));
        }
        if self.n_structured == 0 {
            return Err(Error::config("n_structured must be positive"));
        }
        if !self.noise_sigma.is_finite() || self.noise_sigma < 0.0 {
            return Err(Error::config("noise_sigma must be a nonnegative real"));
        }
        Ok(())
    }
}

/// A rectangular collection of samples sharing one feature schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemporalDataset {
    pub features: Vec<FeatureSpec>,
    pub samples: Vec<Sample>,
    pub normalization: Option<NormalizationSpec>,
}

impl TemporalDataset {
    /// Build a dataset, checking every structural invariant: unique ids
    /// and feature names, contiguous per-kind index spaces, a rectangular
    /// time axis, matching feature counts, and finite values.
    pub fn new(features: Vec<FeatureSpec>, samples: Vec<Sample>) -> Result<Self> {
        let ds = TemporalDataset {
            features,
            samples,
            normalization: None,
        };
        ds.validate()?;
        Ok(ds)
    }

    pub fn validate(&self) -> Result<()> {
        let mut names = std::collections::BTreeSet::new();
        for f in &self.features {
            if !names.insert(f.name.as_str()) {
                return Err(Error::data(format!("duplicate feature name '{}'", f.name)));
            }
        }
        for kind in [FeatureKind::Temporal, FeatureKind::Static] {
            let mut indices: Vec<usize> = self
                .features
                .iter()
                .filter(|f| f.kind == kind)
                .map(|f| f.index)
                .collect();
            indices.sort_unstable();
            if indices.iter().enumerate().any(|(i, &idx)| i != idx) {
                return Err(Error::data(format!(
                    "{kind:?} feature indices must be contiguous from 0, got {indices:?}"
                )));
            }
        }

        let n_temporal = self.n_temporal();
        let n_static = self.n_static();
        let t_steps = self.samples.first().map(|s| s.temporal.rows());
        let mut ids = std::collections::BTreeSet::new();
        for s in &self.samples {
            if !ids.insert(s.id.as_str()) {
                return Err(Error::data(format!("duplicate sample id '{}'", s.id)));
            }
            if !s.temporal.is_consistent() {
                return Err(Error::shape(format!(
                    "sample '{}': inconsistent grid",
                    s.id
                )));
            }
            if s.temporal.rows() == 0 {
                return Err(Error::data(format!("sample '{}': T must be >= 1", s.id)));
            }
            if Some(s.temporal.rows()) != t_steps {
                return Err(Error::data(format!(
                    "sample '{}': {} time steps, dataset has {}",
                    s.id,
                    s.temporal.rows(),
                    t_steps.unwrap_or(0)
                )));
            }
            if s.temporal.cols() != n_temporal {
                return Err(Error::shape(format!(
                    "sample '{}': {} temporal features, schema has {n_temporal}",
                    s.id,
                    s.temporal.cols()
                )));
            }
            if s.static_features.len() != n_static {
                return Err(Error::shape(format!(
                    "sample '{}': {} static features, schema has {n_static}",
                    s.id,
                    s.static_features.len()
                )));
            }
            let finite = s.temporal.data().iter().all(|v| v.is_finite())
                && s.static_features.iter().all(|v| v.is_finite())
                && s.target.is_finite();
            if !finite {
                return Err(Error::data(format!(
                    "sample '{}': non-finite value after ingestion",
                    s.id
                )));
            }
        }
        Ok(())
    }

    pub fn n_samples(&self) -> usize {
        self.samples.len()
    }

    /// Time steps per sample (datasets are rectangular). 0 when empty.
    pub fn t_steps(&self) -> usize {
        self.samples.first().map_or(0, |s| s.temporal.rows())
    }

    pub fn n_temporal(&self) -> usize {
        self.features
            .iter()
            .filter(|f| f.kind == FeatureKind::Temporal)
            .count()
    }

    pub fn n_static(&self) -> usize {
        self.features
            .iter()
            .filter(|f| f.kind == FeatureKind::Static)
            .count()
    }

    /// Temporal specs ordered by their column index.
    pub fn temporal_specs(&self) -> Vec<&FeatureSpec> {
        let mut specs: Vec<&FeatureSpec> = self
            .features
            .iter()
            .filter(|f| f.kind == FeatureKind::Temporal)
            .collect();
        specs.sort_by_key(|f| f.index);
        specs
    }

    /// Static specs ordered by index.
    pub fn static_specs(&self) -> Vec<&FeatureSpec> {
        let mut specs: Vec<&FeatureSpec> = self
            .features
            .iter()
            .filter(|f| f.kind == FeatureKind::Static)
            .collect();
        specs.sort_by_key(|f| f.index);
        specs
    }

    pub fn targets(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.target).collect()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalization.is_some()
    }

    /// Total tensor cells: n_samples · (T·F_t + F_s).
    pub fn n_cells(&self) -> usize {
        self.n_samples() * (self.t_steps() * self.n_temporal() + self.n_static())
    }
}
