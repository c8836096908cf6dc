//! Min-max scaling of every feature into [0, 1].
//!
//! Bounds are computed per feature over the whole dataset (all samples,
//! all time steps). Constant features carry no scale information and map
//! to `constant_fill`; denormalization maps them back to their observed
//! value exactly.

use crate::error::{Error, Result};

use super::{FeatureKind, FeatureRange, NormalizationSpec, TemporalDataset, DEFAULT_CONSTANT_FILL};

/// Identifies a feature inside a `NormalizationSpec`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeatureRef {
    pub kind: FeatureKind,
    pub index: usize,
}

impl FeatureRef {
    pub fn temporal(index: usize) -> Self {
        FeatureRef {
            kind: FeatureKind::Temporal,
            index,
        }
    }

    pub fn static_(index: usize) -> Self {
        FeatureRef {
            kind: FeatureKind::Static,
            index,
        }
    }
}

/// Scale every feature of `dataset` into [0, 1], returning the scaled
/// dataset and the per-feature bounds used.
pub fn normalize(dataset: &TemporalDataset) -> Result<(TemporalDataset, NormalizationSpec)> {
    if dataset.is_normalized() {
        return Err(Error::config("dataset is already normalized"));
    }
    if dataset.samples.is_empty() {
        return Err(Error::data("cannot normalize an empty dataset"));
    }

    let n_temporal = dataset.n_temporal();
    let n_static = dataset.n_static();

    let mut temporal = vec![
        FeatureRange {
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
        };
        n_temporal
    ];
    let mut statics = vec![
        FeatureRange {
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
        };
        n_static
    ];
    for sample in &dataset.samples {
        for t in 0..sample.temporal.rows() {
            for (c, range) in temporal.iter_mut().enumerate() {
                let v = sample.temporal.get(t, c);
                range.min = range.min.min(v);
                range.max = range.max.max(v);
            }
        }
        for (c, range) in statics.iter_mut().enumerate() {
            let v = sample.static_features[c];
            range.min = range.min.min(v);
            range.max = range.max.max(v);
        }
    }

    let spec = NormalizationSpec {
        temporal,
        static_features: statics,
        constant_fill: DEFAULT_CONSTANT_FILL,
    };

    let mut out = dataset.clone();
    for sample in &mut out.samples {
        for t in 0..sample.temporal.rows() {
            for (c, range) in spec.temporal.iter().enumerate() {
                let v = sample.temporal.get(t, c);
                sample
                    .temporal
                    .set(t, c, scale(v, range, spec.constant_fill));
            }
        }
        for (c, range) in spec.static_features.iter().enumerate() {
            sample.static_features[c] = scale(sample.static_features[c], range, spec.constant_fill);
        }
    }
    out.normalization = Some(spec.clone());
    Ok((out, spec))
}

#[inline]
fn scale(v: f64, range: &FeatureRange, fill: f64) -> f64 {
    if range.is_constant() {
        fill
    } else {
        (v - range.min) / (range.max - range.min)
    }
}

/// Map normalized values of one feature back to original units:
/// `v·(max−min)+min` elementwise.
pub fn denormalize(
    values: &[f64],
    spec: &NormalizationSpec,
    feature: FeatureRef,
) -> Result<Vec<f64>> {
    let range = match feature.kind {
        FeatureKind::Temporal => spec.temporal.get(feature.index),
        FeatureKind::Static => spec.static_features.get(feature.index),
    }
    .ok_or_else(|| {
        Error::data(format!(
            "unknown {:?} feature index {} in normalization spec",
            feature.kind, feature.index
        ))
    })?;
    Ok(values
        .iter()
        .map(|&v| v * (range.max - range.min) + range.min)
        .collect())
}

/// Invert `normalize` over a whole dataset.
pub fn denormalize_dataset(
    dataset: &TemporalDataset,
    spec: &NormalizationSpec,
) -> Result<TemporalDataset> {
    if spec.temporal.len() != dataset.n_temporal()
        || spec.static_features.len() != dataset.n_static()
    {
        return Err(Error::shape(format!(
            "normalization spec covers {}+{} features, dataset has {}+{}",
            spec.temporal.len(),
            spec.static_features.len(),
            dataset.n_temporal(),
            dataset.n_static()
        )));
    }
    let mut out = dataset.clone();
    for sample in &mut out.samples {
        for t in 0..sample.temporal.rows() {
            for (c, range) in spec.temporal.iter().enumerate() {
                let v = sample.temporal.get(t, c);
                sample
                    .temporal
                    .set(t, c, v * (range.max - range.min) + range.min);
            }
        }
        for (c, range) in spec.static_features.iter().enumerate() {
            let v = sample.static_features[c];
            sample.static_features[c] = v * (range.max - range.min) + range.min;
        }
    }
    out.normalization = None;
    Ok(out)
}
