//! Regression accuracy metrics and the pruning-impact figure.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSet {
    pub mse: f64,
    pub r2: f64,
    pub mae: f64,
}

pub(crate) fn mean_squared_error(y: &[f64], y_hat: &[f64]) -> f64 {
    let n = y.len() as f64;
    y.iter()
        .zip(y_hat)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        / n
}

/// MSE, MAE, and R² of predictions against targets.
///
/// R² = 1 − SS_res/SS_tot with SS_tot about the mean of `y`. When `y` is
/// constant (SS_tot = 0), R² is 1 for a perfect fit and −∞ otherwise;
/// the −∞ sentinel marks the degenerate case in downstream reports.
pub fn metrics(y: &[f64], y_hat: &[f64]) -> Result<MetricSet> {
    if y.is_empty() {
        return Err(Error::data("metrics: empty vectors"));
    }
    if y.len() != y_hat.len() {
        return Err(Error::shape(format!(
            "metrics: {} targets vs {} predictions",
            y.len(),
            y_hat.len()
        )));
    }
    let n = y.len() as f64;
    let mean_y = y.iter().sum::<f64>() / n;
    let ss_res: f64 = y.iter().zip(y_hat).map(|(a, b)| (a - b) * (a - b)).sum();
    let ss_tot: f64 = y.iter().map(|a| (a - mean_y) * (a - mean_y)).sum();
    let mae = y.iter().zip(y_hat).map(|(a, b)| (a - b).abs()).sum::<f64>() / n;
    let r2 = if ss_tot == 0.0 {
        if ss_res == 0.0 {
            1.0
        } else {
            f64::NEG_INFINITY
        }
    } else {
        1.0 - ss_res / ss_tot
    };
    Ok(MetricSet {
        mse: ss_res / n,
        r2,
        mae,
    })
}

/// Relative MSE reduction in percent: `100·(base − new)/base`.
/// Negative when quality degrades.
pub fn improvement_percent(mse_base: f64, mse_new: f64) -> Result<f64> {
    if !mse_base.is_finite() || mse_base <= 0.0 {
        return Err(Error::data(format!(
            "improvement_percent requires mse_base > 0, got {mse_base}"
        )));
    }
    Ok(100.0 * (mse_base - mse_new) / mse_base)
}
