//! Mini-batch gradient-descent loop shared by the MLP and grid-conv
//! regressors, with threshold / patience / max-epoch halting.

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::rng;

use super::metrics::mean_squared_error;
use super::{HaltReason, RegressorConfig};

pub(super) const BATCH_SIZE: usize = 32;

/// A model trainable by gradient descent on batch-mean squared error.
pub(super) trait GradNet {
    fn predict_flat(&self, x: &[f64]) -> f64;
    fn params(&self) -> Vec<f64>;
    fn set_params(&mut self, params: &[f64]);
    /// Batch-mean squared error and its gradient w.r.t. the flat params.
    fn loss_and_grad(&self, xs: &[&[f64]], ys: &[f64]) -> (f64, Vec<f64>);
}

pub(super) struct IterativeOutcome {
    pub epochs_run: usize,
    pub final_train_mse: f64,
    pub final_val_mse: f64,
    pub halted_by: HaltReason,
}

fn eval_mse<N: GradNet>(net: &N, xs: &[Vec<f64>], ys: &[f64]) -> f64 {
    let preds: Vec<f64> = xs.iter().map(|x| net.predict_flat(x)).collect();
    mean_squared_error(ys, &preds)
}

/// Run seeded mini-batch gradient descent until the validation MSE drops
/// to `stop_threshold`, fails to improve for `patience` epochs, or
/// `max_epochs` elapse (checked in that order after each epoch).
pub(super) fn train_iterative<N: GradNet>(
    net: &mut N,
    train_x: &[Vec<f64>],
    train_y: &[f64],
    val_x: &[Vec<f64>],
    val_y: &[f64],
    config: &RegressorConfig,
) -> Result<IterativeOutcome> {
    let mut shuffle_rng = rng::stream(config.seed, "batches");
    let mut indices: Vec<usize> = (0..train_x.len()).collect();
    let mut best_val = f64::INFINITY;
    let mut epochs_since_best = 0usize;

    let mut epoch = 0usize;
    let halted_by = loop {
        epoch += 1;
        indices.shuffle(&mut shuffle_rng);
        for chunk in indices.chunks(BATCH_SIZE) {
            let xs: Vec<&[f64]> = chunk.iter().map(|&i| train_x[i].as_slice()).collect();
            let ys: Vec<f64> = chunk.iter().map(|&i| train_y[i]).collect();
            let (loss, grad) = net.loss_and_grad(&xs, &ys);
            if !loss.is_finite() {
                return Err(Error::numeric(format!("non-finite loss at epoch {epoch}")));
            }
            let mut params = net.params();
            for (p, g) in params.iter_mut().zip(&grad) {
                *p -= config.learning_rate * g;
            }
            net.set_params(&params);
        }

        let val_mse = eval_mse(net, val_x, val_y);
        if !val_mse.is_finite() {
            return Err(Error::numeric(format!(
                "non-finite validation loss at epoch {epoch}"
            )));
        }
        if val_mse <= config.stop_threshold {
            break HaltReason::Threshold;
        }
        if val_mse < best_val {
            best_val = val_mse;
            epochs_since_best = 0;
        } else {
            epochs_since_best += 1;
            if epochs_since_best >= config.patience {
                break HaltReason::Patience;
            }
        }
        if epoch >= config.max_epochs {
            break HaltReason::MaxEpochs;
        }
    };

    Ok(IterativeOutcome {
        epochs_run: epoch,
        final_train_mse: eval_mse(net, train_x, train_y),
        final_val_mse: eval_mse(net, val_x, val_y),
        halted_by,
    })
}
