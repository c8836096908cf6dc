//! Weighted least squares via normal equations, the shared solver behind
//! ridge training, the Shapley-kernel regression, and LIME surrogates.

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::linalg::solve_spd;

/// Default ridge term guarding against rank deficiency.
pub const DEFAULT_RIDGE_EPS: f64 = 1e-10;

/// Minimize `Σ wᵢ (tᵢ − Zᵢ·β)² + ridge_eps·‖β‖²`.
///
/// Weights must be nonnegative with at least one strictly positive entry;
/// zero-weight rows are exactly ignored.
pub fn weighted_least_squares(z: &Grid, w: &[f64], t: &[f64], ridge_eps: f64) -> Result<Vec<f64>> {
    let penalty = vec![ridge_eps; z.cols()];
    solve_weighted_penalized(z, w, t, &penalty)
}

/// Same as `weighted_least_squares` with a per-coefficient penalty
/// (lets ridge leave its intercept unpenalized).
pub(crate) fn solve_weighted_penalized(
    z: &Grid,
    w: &[f64],
    t: &[f64],
    penalty: &[f64],
) -> Result<Vec<f64>> {
    let n = z.rows();
    let d = z.cols();
    if w.len() != n || t.len() != n {
        return Err(Error::shape(format!(
            "weighted least squares: {n} rows, {} weights, {} targets",
            w.len(),
            t.len()
        )));
    }
    if penalty.len() != d {
        return Err(Error::shape(
            "penalty length must match column count".to_string(),
        ));
    }
    if z.data().iter().any(|v| !v.is_finite())
        || t.iter().any(|v| !v.is_finite())
        || w.iter().any(|v| !v.is_finite())
    {
        return Err(Error::numeric("weighted least squares: non-finite input"));
    }
    if w.iter().any(|&wi| wi < 0.0) {
        return Err(Error::numeric("weighted least squares: negative weight"));
    }
    if !w.iter().any(|&wi| wi > 0.0) {
        return Err(Error::numeric(
            "weighted least squares: all weights are zero",
        ));
    }

    // Gram matrix ZᵀWZ + diag(penalty) and right-hand side ZᵀWt.
    let mut gram = vec![0.0f64; d * d];
    let mut rhs = vec![0.0f64; d];
    for i in 0..n {
        let wi = w[i];
        if wi == 0.0 {
            continue;
        }
        let row = z.row(i);
        for a in 0..d {
            let wa = wi * row[a];
            rhs[a] += wa * t[i];
            for b in a..d {
                gram[a * d + b] += wa * row[b];
            }
        }
    }
    for a in 0..d {
        gram[a * d + a] += penalty[a];
        for b in 0..a {
            gram[a * d + b] = gram[b * d + a];
        }
    }

    solve_spd(&mut gram, &rhs, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_column_gives_weighted_mean() {
        let z = Grid::from_rows(vec![vec![1.0], vec![1.0]]).unwrap();
        let beta = weighted_least_squares(&z, &[1.0, 1.0], &[2.0, 4.0], DEFAULT_RIDGE_EPS).unwrap();
        assert!((beta[0] - 3.0).abs() < 1e-8);
    }

    #[test]
    fn zero_weight_rows_are_ignored() {
        let z = Grid::from_rows(vec![vec![1.0], vec![1.0]]).unwrap();
        let beta =
            weighted_least_squares(&z, &[1.0, 0.0], &[2.0, 99.0], DEFAULT_RIDGE_EPS).unwrap();
        assert!((beta[0] - 2.0).abs() < 1e-8);
    }

    #[test]
    fn all_zero_weights_are_an_error() {
        let z = Grid::from_rows(vec![vec![1.0], vec![1.0]]).unwrap();
        assert!(weighted_least_squares(&z, &[0.0, 0.0], &[1.0, 2.0], 0.0).is_err());
    }

    #[test]
    fn non_finite_inputs_are_an_error() {
        let z = Grid::from_rows(vec![vec![f64::NAN]]).unwrap();
        assert!(weighted_least_squares(&z, &[1.0], &[1.0], 0.0).is_err());
        let z = Grid::from_rows(vec![vec![1.0]]).unwrap();
        assert!(weighted_least_squares(&z, &[1.0], &[f64::INFINITY], 0.0).is_err());
    }
}
