//! Data-quality pipeline for multivariate temporal regression: train a
//! regressor on normalized time×feature arrays, explain it with
//! Shapley/LIME attribution heatmaps, prune low-value features and
//! samples from the aggregated heatmap, retrain, and report the
//! accuracy/size/time deltas.
//!
//! Modules follow the pipeline stages:
//!
//! - [`dataset`] - rectangular samples, CSV I/O, min-max normalization,
//!   splitting, and the seeded synthetic benchmark generator.
//! - [`model`] - ridge / MLP / grid-convolution regressors behind one
//!   training interface, metrics, and the shared weighted-least-squares
//!   solver.
//! - [`explain`] - KernelSHAP and LIME attribution maps, an exact
//!   Shapley enumeration oracle, and global heatmap aggregation.
//! - [`prune`] - feature and sample prune plans derived from global
//!   importance and out-of-fold residuals.
//! - [`pipeline`] - end-to-end orchestration and report emission.

pub mod dataset;
pub mod error;
pub mod explain;
pub mod grid;
mod linalg;
pub mod model;
pub mod pipeline;
pub mod prune;
pub mod rng;

pub use error::{Error, Result};
