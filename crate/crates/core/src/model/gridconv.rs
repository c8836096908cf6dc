//! Grid-convolution regressor: a single 3×3/4-channel convolution over
//! the T×F temporal matrix (zero padding, stride 1), global mean pooling
//! per channel, static features concatenated, one tanh dense layer, and
//! a linear scalar head. The 2D analogue of the image-style models the
//! vector regressors cannot replace.

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

const CHANNELS: usize = 4;
const KSIZE: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridConvNet {
    t_steps: usize,
    n_temporal: usize,
    n_static: usize,
    /// One 3×3 kernel per channel.
    kernels: Vec<Grid>,
    conv_bias: Vec<f64>,
    /// hidden × (channels + n_static).
    w1: Grid,
    b1: Vec<f64>,
    w2: Vec<f64>,
    b2: f64,
}

struct Forward {
    conv: Vec<Grid>,
    pooled: Vec<f64>,
    hidden: Vec<f64>,
    out: f64,
}

impl GridConvNet {
    pub fn new(shape: &InputShape, hidden: usize, seed: u64) -> Self {
        let mut rng = rng::stream(seed, "gridconv_init");
        let k_limit = (6.0 / (2 * KSIZE * KSIZE) as f64).sqrt();
        let kernels = (0..CHANNELS)
            .map(|_| {
                let mut k = Grid::zeros(KSIZE, KSIZE);
                for v in k.data_mut() {
                    *v = rng.random_range(-k_limit..k_limit);
                }
                k
            })
            .collect();
        let dense_in = CHANNELS + shape.n_static;
        let w1_limit = (6.0 / (dense_in + hidden) as f64).sqrt();
        let mut w1 = Grid::zeros(hidden, dense_in);
        for v in w1.data_mut() {
            *v = rng.random_range(-w1_limit..w1_limit);
        }
        let w2_limit = (6.0 / (hidden + 1) as f64).sqrt();
        let w2 = (0..hidden)
            .map(|_| rng.random_range(-w2_limit..w2_limit))
            .collect();
        GridConvNet {
            t_steps: shape.t_steps,
            n_temporal: shape.n_temporal,
            n_static: shape.n_static,
            kernels,
            conv_bias: vec![0.0; CHANNELS],
            w1,
            b1: vec![0.0; hidden],
            w2,
            b2: 0.0,
        }
    }

    fn temporal_cells(&self) -> usize {
        self.t_steps * self.n_temporal
    }

    fn forward(&self, flat: &[f64]) -> Forward {
        let (temporal, statics) = flat.split_at(self.temporal_cells());
        let cell = |t: isize, f: isize| -> f64 {
            if t < 0 || f < 0 || t as usize >= self.t_steps || f as usize >= self.n_temporal {
                0.0
            } else {
                temporal[t as usize * self.n_temporal + f as usize]
            }
        };

        let mut conv = Vec::with_capacity(CHANNELS);
        let mut pooled = Vec::with_capacity(CHANNELS);
        let area = (self.t_steps * self.n_temporal) as f64;
        for c in 0..CHANNELS {
            let mut act = Grid::zeros(self.t_steps, self.n_temporal);
            let mut sum = 0.0;
            for t in 0..self.t_steps {
                for f in 0..self.n_temporal {
                    let mut v = self.conv_bias[c];
                    for dt in 0..KSIZE {
                        for df in 0..KSIZE {
                            v += self.kernels[c].get(dt, df)
                                * cell(t as isize + dt as isize - 1, f as isize + df as isize - 1);
                        }
                    }
                    let a = v.tanh();
                    act.set(t, f, a);
                    sum += a;
                }
            }
            conv.push(act);
            pooled.push(sum / area);
        }

        let mut hidden = Vec::with_capacity(self.b1.len());
        for (j, &bj) in self.b1.iter().enumerate() {
            let mut v = bj;
            let row = self.w1.row(j);
            for (i, &p) in pooled.iter().enumerate() {
                v += row[i] * p;
            }
            for (i, &s) in statics.iter().enumerate() {
                v += row[CHANNELS + i] * s;
            }
            hidden.push(v.tanh());
        }
        let out = self.b2 + self.w2.iter().zip(&hidden).map(|(w, h)| w * h).sum::<f64>();
        Forward {
            conv,
            pooled,
            hidden,
            out,
        }
    }

    pub fn predict_flat(&self, x: &[f64]) -> f64 {
        self.forward(x).out
    }

    pub fn n_params(&self) -> usize {
        CHANNELS * KSIZE * KSIZE + CHANNELS + self.w1.len() + self.b1.len() + self.w2.len() + 1
    }

    /// Flat layout: kernels (row-major, channel order), conv biases,
    /// dense weights, dense biases, head weights, head bias.
    pub fn params(&self) -> Vec<f64> {
        let mut p = Vec::with_capacity(self.n_params());
        for k in &self.kernels {
            p.extend_from_slice(k.data());
        }
        p.extend_from_slice(&self.conv_bias);
        p.extend_from_slice(self.w1.data());
        p.extend_from_slice(&self.b1);
        p.extend_from_slice(&self.w2);
        p.push(self.b2);
        p
    }

    pub fn set_params(&mut self, params: &[f64]) {
        assert_eq!(params.len(), self.n_params(), "parameter vector length");
        let mut offset = 0;
        for k in &mut self.kernels {
            let len = k.len();
            k.data_mut().copy_from_slice(&params[offset..offset + len]);
            offset += len;
        }
        self.conv_bias
            .copy_from_slice(&params[offset..offset + CHANNELS]);
        offset += CHANNELS;
        let w1l = self.w1.len();
        self.w1
            .data_mut()
            .copy_from_slice(&params[offset..offset + w1l]);
        offset += w1l;
        let b1l = self.b1.len();
        self.b1.copy_from_slice(&params[offset..offset + b1l]);
        offset += b1l;
        let w2l = self.w2.len();
        self.w2.copy_from_slice(&params[offset..offset + w2l]);
        offset += w2l;
        self.b2 = params[offset];
    }

    pub fn loss_and_grad(&self, xs: &[&[f64]], ys: &[f64]) -> (f64, Vec<f64>) {
        let m = xs.len() as f64;
        let mut gk: Vec<Grid> = (0..CHANNELS).map(|_| Grid::zeros(KSIZE, KSIZE)).collect();
        let mut gcb = vec![0.0; CHANNELS];
        let mut gw1 = Grid::zeros(self.w1.rows(), self.w1.cols());
        let mut gb1 = vec![0.0; self.b1.len()];
        let mut gw2 = vec![0.0; self.w2.len()];
        let mut gb2 = 0.0;
        let mut loss = 0.0;
        let area = (self.t_steps * self.n_temporal) as f64;

        for (x, &y) in xs.iter().zip(ys) {
            let fwd = self.forward(x);
            let (temporal, statics) = x.split_at(self.temporal_cells());
            let err = fwd.out - y;
            loss += err * err / m;
            let dout = 2.0 * err / m;

            gb2 += dout;
            let mut dpooled = [0.0; CHANNELS];
            for (j, &hj) in fwd.hidden.iter().enumerate() {
                gw2[j] += dout * hj;
                let dpre = dout * self.w2[j] * (1.0 - hj * hj);
                gb1[j] += dpre;
                let grow = gw1.row_mut(j);
                for (i, &p) in fwd.pooled.iter().enumerate() {
                    grow[i] += dpre * p;
                }
                for (i, &s) in statics.iter().enumerate() {
                    grow[CHANNELS + i] += dpre * s;
                }
                let wrow = self.w1.row(j);
                for (i, dp) in dpooled.iter_mut().enumerate() {
                    *dp += dpre * wrow[i];
                }
            }

            let cell = |t: isize, f: isize| -> f64 {
                if t < 0 || f < 0 || t as usize >= self.t_steps || f as usize >= self.n_temporal {
                    0.0
                } else {
                    temporal[t as usize * self.n_temporal + f as usize]
                }
            };
            for c in 0..CHANNELS {
                let dact = dpooled[c] / area;
                for t in 0..self.t_steps {
                    for f in 0..self.n_temporal {
                        let a = fwd.conv[c].get(t, f);
                        let dpre = dact * (1.0 - a * a);
                        gcb[c] += dpre;
                        for dt in 0..KSIZE {
                            for df in 0..KSIZE {
                                let v = cell(
                                    t as isize + dt as isize - 1,
                                    f as isize + df as isize - 1,
                                );
                                if v != 0.0 {
                                    let cur = gk[c].get(dt, df);
                                    gk[c].set(dt, df, cur + dpre * v);
                                }
                            }
                        }
                    }
                }
            }
        }

        let mut grad = Vec::with_capacity(self.n_params());
        for k in &gk {
            grad.extend_from_slice(k.data());
        }
        grad.extend_from_slice(&gcb);
        grad.extend_from_slice(gw1.data());
        grad.extend_from_slice(&gb1);
        grad.extend_from_slice(&gw2);
        grad.push(gb2);
        (loss, grad)
    }
}

impl FlatPredictor for GridConvNet {
    fn dim(&self) -> usize {
        self.temporal_cells() + self.n_static
    }

    fn predict_flat(&self, x: &[f64]) -> f64 {
        GridConvNet::predict_flat(self, x)
    }
}

impl GradNet for GridConvNet {
    fn predict_flat(&self, x: &[f64]) -> f64 {
        GridConvNet::predict_flat(self, x)
    }

    fn params(&self) -> Vec<f64> {
        GridConvNet::params(self)
    }

    fn set_params(&mut self, params: &[f64]) {
        GridConvNet::set_params(self, params)
    }

    fn loss_and_grad(&self, xs: &[&[f64]], ys: &[f64]) -> (f64, Vec<f64>) {
        GridConvNet::loss_and_grad(self, xs, ys)
    }
}

pub(super) fn train_gridconv(
    train: &TemporalDataset,
    val: &TemporalDataset,
    config: &RegressorConfig,
    shape: InputShape,
) -> Result<(TrainedModel, TrainReport)> {
    let hidden = config.mlp_hidden.first().copied().unwrap_or(16);
    let mut net = GridConvNet::new(&shape, hidden, config.seed);
    let outcome = train_iterative(
        &mut net,
        &super::flat_inputs(train),
        &train.targets(),
        &super::flat_inputs(val),
        &val.targets(),
        config,
    )?;
    let model = TrainedModel {
        kind: super::RegressorKind::Gridconv,
        shape,
        order: FlattenOrder::RowMajorTemporalThenStatic,
        params: ModelParams::Gridconv(net),
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
