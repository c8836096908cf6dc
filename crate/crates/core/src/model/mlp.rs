//! Feedforward net: tanh hidden layers, linear scalar head, trained by
//! seeded mini-batch gradient descent on MSE.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::TemporalDataset;
use crate::error::Result;
use crate::grid::Grid;
use crate::rng;

use super::trainer::{train_iterative, GradNet};
use super::{
    FlatPredictor, FlattenOrder, InputShape, ModelParams, RegressorConfig, TrainReport,
    TrainedModel,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct DenseLayer {
    /// out×in weight matrix.
    w: Grid,
    b: Vec<f64>,
    tanh: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpNet {
    input_dim: usize,
    layers: Vec<DenseLayer>,
}

impl MlpNet {
    /// Xavier-uniform initialization, deterministic per seed. Hidden
    /// layers use tanh; the scalar output layer is linear.
    pub fn new(input_dim: usize, hidden: &[usize], seed: u64) -> Self {
        let mut rng = rng::stream(seed, "mlp_init");
        let mut layers = Vec::with_capacity(hidden.len() + 1);
        let mut fan_in = input_dim;
        for &h in hidden {
            layers.push(Self::init_layer(&mut rng, h, fan_in, true));
            fan_in = h;
        }
        layers.push(Self::init_layer(&mut rng, 1, fan_in, false));
        MlpNet { input_dim, layers }
    }

    fn init_layer(rng: &mut impl Rng, out_dim: usize, in_dim: usize, tanh: bool) -> DenseLayer {
        let limit = (6.0 / (in_dim + out_dim) as f64).sqrt();
        let mut w = Grid::zeros(out_dim, in_dim);
        for v in w.data_mut() {
            *v = rng.random_range(-limit..limit);
        }
        DenseLayer {
            w,
            b: vec![0.0; out_dim],
            tanh,
        }
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn n_params(&self) -> usize {
        self.layers.iter().map(|l| l.w.len() + l.b.len()).sum()
    }

    /// Forward pass keeping every layer's activations.
    fn activations(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let mut acts = Vec::with_capacity(self.layers.len());
        let mut input = x.to_vec();
        for layer in &self.layers {
            let mut out = Vec::with_capacity(layer.b.len());
            for (j, &bj) in layer.b.iter().enumerate() {
                let mut v = bj;
                for (wi, xi) in layer.w.row(j).iter().zip(&input) {
                    v += wi * xi;
                }
                out.push(if layer.tanh { v.tanh() } else { v });
            }
            acts.push(out.clone());
            input = out;
        }
        acts
    }

    pub fn predict_flat(&self, x: &[f64]) -> f64 {
        let mut input = x.to_vec();
        for layer in &self.layers {
            let mut out = Vec::with_capacity(layer.b.len());
            for (j, &bj) in layer.b.iter().enumerate() {
                let mut v = bj;
                for (wi, xi) in layer.w.row(j).iter().zip(&input) {
                    v += wi * xi;
                }
                out.push(if layer.tanh { v.tanh() } else { v });
            }
            input = out;
        }
        input[0]
    }

    /// Flat parameter vector: per layer, weights row-major then biases.
    pub fn params(&self) -> Vec<f64> {
        let mut p = Vec::with_capacity(self.n_params());
        for layer in &self.layers {
            p.extend_from_slice(layer.w.data());
            p.extend_from_slice(&layer.b);
        }
        p
    }

    pub fn set_params(&mut self, params: &[f64]) {
        assert_eq!(params.len(), self.n_params(), "parameter vector length");
        let mut offset = 0;
        for layer in &mut self.layers {
            let wl = layer.w.len();
            layer
                .w
                .data_mut()
                .copy_from_slice(&params[offset..offset + wl]);
            offset += wl;
            let bl = layer.b.len();
            layer.b.copy_from_slice(&params[offset..offset + bl]);
            offset += bl;
        }
    }

    /// Batch-mean squared error and its gradient in `params` layout.
    pub fn loss_and_grad(&self, xs: &[&[f64]], ys: &[f64]) -> (f64, Vec<f64>) {
        let m = xs.len() as f64;
        let mut grad_w: Vec<Grid> = self
            .layers
            .iter()
            .map(|l| Grid::zeros(l.w.rows(), l.w.cols()))
            .collect();
        let mut grad_b: Vec<Vec<f64>> = self.layers.iter().map(|l| vec![0.0; l.b.len()]).collect();
        let mut loss = 0.0;

        for (x, &y) in xs.iter().zip(ys) {
            let acts = self.activations(x);
            let pred = acts.last().unwrap()[0];
            let err = pred - y;
            loss += err * err / m;

            // d(loss)/d(output) for batch-mean squared error.
            let mut delta = vec![2.0 * err / m];
            for (l, layer) in self.layers.iter().enumerate().rev() {
                // delta is d(loss)/d(activation); map through tanh.
                if layer.tanh {
                    for (dj, aj) in delta.iter_mut().zip(&acts[l]) {
                        *dj *= 1.0 - aj * aj;
                    }
                }
                let below: &[f64] = if l == 0 { x } else { &acts[l - 1] };
                for (j, &dj) in delta.iter().enumerate() {
                    grad_b[l][j] += dj;
                    let grow = grad_w[l].row_mut(j);
                    for (gi, xi) in grow.iter_mut().zip(below) {
                        *gi += dj * xi;
                    }
                }
                if l > 0 {
                    let mut next = vec![0.0; below.len()];
                    for (j, &dj) in delta.iter().enumerate() {
                        for (ni, wi) in next.iter_mut().zip(layer.w.row(j)) {
                            *ni += dj * wi;
                        }
                    }
                    delta = next;
                }
            }
        }

        let mut grad = Vec::with_capacity(self.n_params());
        for (gw, gb) in grad_w.iter().zip(&grad_b) {
            grad.extend_from_slice(gw.data());
            grad.extend_from_slice(gb);
        }
        (loss, grad)
    }
}

impl FlatPredictor for MlpNet {
    fn dim(&self) -> usize {
        self.input_dim
    }

    fn predict_flat(&self, x: &[f64]) -> f64 {
        MlpNet::predict_flat(self, x)
    }
}

impl GradNet for MlpNet {
    fn predict_flat(&self, x: &[f64]) -> f64 {
        MlpNet::predict_flat(self, x)
    }

    fn params(&self) -> Vec<f64> {
        MlpNet::params(self)
    }

    fn set_params(&mut self, params: &[f64]) {
        MlpNet::set_params(self, params)
    }

    fn loss_and_grad(&self, xs: &[&[f64]], ys: &[f64]) -> (f64, Vec<f64>) {
        MlpNet::loss_and_grad(self, xs, ys)
    }
}

pub(super) fn train_mlp(
    train: &TemporalDataset,
    val: &TemporalDataset,
    config: &RegressorConfig,
    shape: InputShape,
) -> Result<(TrainedModel, TrainReport)> {
    let mut net = MlpNet::new(shape.flat_dim(), &config.mlp_hidden, config.seed);
    let outcome = train_iterative(
        &mut net,
        &super::flat_inputs(train),
        &train.targets(),
        &super::flat_inputs(val),
        &val.targets(),
        config,
    )?;
    let model = TrainedModel {
        kind: super::RegressorKind::Mlp,
        shape,
        order: FlattenOrder::RowMajorTemporalThenStatic,
        params: ModelParams::Mlp(net),
    };
    Ok((
        model,
        TrainReport {
            epochs_run: outcome.epochs_run,
            wall_time_seconds: 0.0,
            final_train_mse: outcome.final_train_mse,
            final_val_mse: outcome.final_val_mse,
            halted_by: outcome.halted_by,
        },
    ))
}
