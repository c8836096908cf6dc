//! Closed-form ridge regression on flattened inputs.

use crate::dataset::TemporalDataset;
use crate::error::{Error, Result};
use crate::grid::Grid;

use super::metrics::mean_squared_error;
use super::wls::solve_weighted_penalized;
use super::{
    FlattenOrder, HaltReason, InputShape, ModelParams, RegressorConfig, TrainReport, TrainedModel,
};

/// Solve `(XᵀX + λI)β = Xᵀy` with an appended bias column whose
/// coefficient is left unpenalized.
pub(super) fn train_ridge(
    train: &TemporalDataset,
    val: &TemporalDataset,
    config: &RegressorConfig,
    shape: InputShape,
) -> Result<(TrainedModel, TrainReport)> {
    let d = shape.flat_dim();
    let inputs = super::flat_inputs(train);
    let targets = train.targets();

    let mut design = Grid::zeros(inputs.len(), d + 1);
    for (i, x) in inputs.iter().enumerate() {
        let row = design.row_mut(i);
        row[..d].copy_from_slice(x);
        row[d] = 1.0;
    }
    let weights = vec![1.0f64; inputs.len()];
    let mut penalty = vec![config.ridge_lambda; d + 1];
    penalty[d] = 0.0;

    let beta = match solve_weighted_penalized(&design, &weights, &targets, &penalty) {
        Ok(beta) => beta,
        // Rank-deficient with lambda = 0: retry with a tiny jitter.
        Err(Error::Numeric(_)) if config.ridge_lambda == 0.0 => {
            let jitter = vec![1e-10; d + 1];
            solve_weighted_penalized(&design, &weights, &targets, &jitter)?
        }
        Err(e) => return Err(e),
    };

    let model = TrainedModel {
        kind: super::RegressorKind::Ridge,
        shape,
        order: FlattenOrder::RowMajorTemporalThenStatic,
        params: ModelParams::Ridge {
            weights: beta[..d].to_vec(),
            bias: beta[d],
        },
    };

    let train_pred = model.predict_dataset(train)?;
    let val_pred = model.predict_dataset(val)?;
    let report = TrainReport {
        epochs_run: 0,
        wall_time_seconds: 0.0, // filled by the dispatcher
        final_train_mse: mean_squared_error(&targets, &train_pred),
        final_val_mse: mean_squared_error(&val.targets(), &val_pred),
        halted_by: HaltReason::ClosedForm,
    };
    Ok((model, report))
}
