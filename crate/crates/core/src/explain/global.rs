//! Aggregation of per-sample attribution maps into a global heatmap and
//! a feature ranking.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;

use super::{AttributionMap, AttributionMethod};

/// Cellwise aggregate of attribution maps. Ranking and pruning read
/// `per_feature` (time-collapsed absolute means); the signed means are
/// kept because averaging signed heatmaps cancels opposing effects.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlobalImportance {
    pub method: AttributionMethod,
    pub n_samples: usize,
    /// Cellwise arithmetic mean, T×F_t.
    pub signed_mean: Grid,
    pub signed_mean_static: Vec<f64>,
    /// Cellwise mean of absolute values, T×F_t.
    pub abs_mean: Grid,
    pub abs_mean_static: Vec<f64>,
    /// Per-feature score, length F_t+F_s: time-mean of `abs_mean`
    /// columns, then the static entries.
    pub per_feature: Vec<f64>,
}

impl GlobalImportance {
    pub fn n_features(&self) -> usize {
        self.per_feature.len()
    }
}

/// Average attribution maps cellwise. All maps must share one shape and
/// method.
pub fn global_heatmap(maps: &[AttributionMap]) -> Result<GlobalImportance> {
    let first = maps
        .first()
        .ok_or_else(|| Error::data("global_heatmap: empty map list"))?;
    let rows = first.temporal.rows();
    let cols = first.temporal.cols();
    let n_static = first.static_attr.len();
    for m in maps {
        if m.temporal.rows() != rows || m.temporal.cols() != cols || m.static_attr.len() != n_static
        {
            return Err(Error::shape(format!(
                "attribution map '{}' has shape {}x{}+{}, expected {rows}x{cols}+{n_static}",
                m.sample_id,
                m.temporal.rows(),
                m.temporal.cols(),
                m.static_attr.len()
            )));
        }
        if m.method != first.method {
            return Err(Error::data("attribution maps mix methods"));
        }
    }

    let n = maps.len() as f64;
    let mut signed_mean = Grid::zeros(rows, cols);
    let mut abs_mean = Grid::zeros(rows, cols);
    let mut signed_mean_static = vec![0.0; n_static];
    let mut abs_mean_static = vec![0.0; n_static];
    for m in maps {
        for (i, &v) in m.temporal.data().iter().enumerate() {
            signed_mean.data_mut()[i] += v / n;
            abs_mean.data_mut()[i] += v.abs() / n;
        }
        for (i, &v) in m.static_attr.iter().enumerate() {
            signed_mean_static[i] += v / n;
            abs_mean_static[i] += v.abs() / n;
        }
    }

    let mut per_feature = Vec::with_capacity(cols + n_static);
    for c in 0..cols {
        per_feature.push(abs_mean.column(c).sum::<f64>() / rows as f64);
    }
    per_feature.extend_from_slice(&abs_mean_static);

    Ok(GlobalImportance {
        method: first.method,
        n_samples: maps.len(),
        signed_mean,
        signed_mean_static,
        abs_mean,
        abs_mean_static,
        per_feature,
    })
}

/// Features ordered by descending `per_feature` score; ties break toward
/// the lower feature index.
pub fn rank_features(global: &GlobalImportance) -> Vec<(usize, f64)> {
    let mut ranked: Vec<(usize, f64)> = global.per_feature.iter().copied().enumerate().collect();
    ranked.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    ranked
}
