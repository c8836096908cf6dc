//! LIME: a weighted ridge surrogate fit to model predictions on Gaussian
//! perturbations around one sample.

use rand_distr::{Distribution, StandardNormal};

use crate::dataset::Sample;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::model::{flatten, weighted_least_squares, FlatPredictor, InputShape, DEFAULT_RIDGE_EPS};
use crate::rng;

use super::{AttributionMap, AttributionMethod, ExplainConfig};

/// Perturbation standard deviation in normalized units.
const PERTURB_SIGMA: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct LimeExplanation {
    pub map: AttributionMap,
    /// Weighted R² of the surrogate on its own perturbation set.
    pub fidelity_r2: f64,
    pub intercept: f64,
    /// True when the perturbation responses have no weighted variance
    /// (constant model), making fidelity meaningless.
    pub degenerate: bool,
}

/// Fit a local linear surrogate around `sample` (which must be
/// normalized: perturbations are clipped to [0, 1]). Deterministic per
/// (config.seed, sample id).
pub fn lime_explain<M: FlatPredictor>(
    model: &M,
    sample: &Sample,
    config: &ExplainConfig,
) -> Result<LimeExplanation> {
    config.validate()?;
    let x = flatten(sample);
    let d = x.len();
    if d == 0 {
        return Err(Error::data("sample has no attribution units"));
    }
    if d != model.dim() {
        return Err(Error::shape(format!(
            "sample flattens to {d} units, model expects {}",
            model.dim()
        )));
    }
    let shape = InputShape {
        t_steps: sample.temporal.rows(),
        n_temporal: sample.temporal.cols(),
        n_static: sample.static_features.len(),
    };

    let kernel_width = config.lime_kernel_width.unwrap_or(0.75 * (d as f64).sqrt());
    let n = config.lime_n_perturb;
    let mut stream = rng::stream(config.seed, &format!("lime/{}", sample.id));

    // Design matrix [perturbations | 1] with proximity weights.
    let mut design = Grid::zeros(n, d + 1);
    let mut weights = Vec::with_capacity(n);
    let mut responses = Vec::with_capacity(n);
    let mut perturbed = vec![0.0f64; d];
    for i in 0..n {
        let mut dist_sq = 0.0;
        for j in 0..d {
            let noise: f64 = StandardNormal.sample(&mut stream);
            let v = (x[j] + PERTURB_SIGMA * noise).clamp(0.0, 1.0);
            perturbed[j] = v;
            dist_sq += (v - x[j]) * (v - x[j]);
        }
        let y = model.predict_flat(&perturbed);
        if !y.is_finite() {
            return Err(Error::numeric(format!(
                "model produced a non-finite output on perturbation {i}"
            )));
        }
        let row = design.row_mut(i);
        row[..d].copy_from_slice(&perturbed);
        row[d] = 1.0;
        weights.push((-dist_sq / (kernel_width * kernel_width)).exp());
        responses.push(y);
    }

    let beta = weighted_least_squares(&design, &weights, &responses, DEFAULT_RIDGE_EPS)?;
    let (coefficients, intercept) = (beta[..d].to_vec(), beta[d]);

    // Weighted R² of the surrogate on the perturbation set.
    let w_sum: f64 = weights.iter().sum();
    let y_mean_w: f64 = weights
        .iter()
        .zip(&responses)
        .map(|(w, y)| w * y)
        .sum::<f64>()
        / w_sum;
    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    for i in 0..n {
        let pred: f64 = design.row(i).iter().zip(&beta).map(|(z, b)| z * b).sum();
        ss_res += weights[i] * (responses[i] - pred) * (responses[i] - pred);
        ss_tot += weights[i] * (responses[i] - y_mean_w) * (responses[i] - y_mean_w);
    }
    let degenerate = ss_tot <= 1e-12 * w_sum.max(1.0);
    let fidelity_r2 = if degenerate {
        if ss_res <= 1e-12 * w_sum.max(1.0) {
            1.0
        } else {
            f64::NEG_INFINITY
        }
    } else {
        1.0 - ss_res / ss_tot
    };

    let mut map = AttributionMap::from_flat(
        &sample.id,
        &shape,
        &coefficients,
        intercept,
        AttributionMethod::Lime,
    )?;
    if degenerate {
        map.warning =
            Some("degenerate perturbation responses: surrogate fidelity is undefined".to_string());
    }
    Ok(LimeExplanation {
        map,
        fidelity_r2,
        intercept,
        degenerate,
    })
}
