//! Attribution heatmaps for trained regressors.
//!
//! The attribution unit is the flattened time×feature cell (plus each
//! static feature), so a per-sample map resolves feature relevance at
//! specific temporal points. KernelSHAP and the exact enumeration oracle
//! share one value function: v(S) is the model output with absent cells
//! replaced by background values, averaged over the background set.

mod exact;
mod global;
mod kernel_shap;
mod lime;

pub use exact::exact_shapley;
pub use global::{global_heatmap, rank_features, GlobalImportance};
pub use kernel_shap::kernel_shap;
pub use lime::{lime_explain, LimeExplanation};

use rayon::prelude::*;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::dataset::Sample;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::model::{flatten, FlatPredictor, InputShape};

/// Exhaustive enumeration is limited to this many attribution units
/// (2^d coalitions grow too fast beyond it).
pub const MAX_EXHAUSTIVE_UNITS: usize = 20;

/// The exact oracle is limited further; it exists to verify estimators
/// at small d, not to scale.
pub const MAX_EXACT_UNITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttributionMethod {
    KernelShap,
    ExactShapley,
    Lime,
}

/// Per-sample attribution heatmap. For Shapley methods,
/// `base_value + Σ cells` equals the model prediction (local accuracy).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributionMap {
    pub sample_id: String,
    /// T×F_t attribution scores.
    pub temporal: Grid,
    /// One score per static feature.
    #[serde(rename = "static")]
    pub static_attr: Vec<f64>,
    /// Expected model output over the background set.
    pub base_value: f64,
    pub method: AttributionMethod,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

impl AttributionMap {
    pub(crate) fn from_flat(
        sample_id: &str,
        shape: &InputShape,
        phi: &[f64],
        base_value: f64,
        method: AttributionMethod,
    ) -> Result<Self> {
        let (temporal, static_attr) = crate::model::unflatten(phi, shape)?;
        Ok(AttributionMap {
            sample_id: sample_id.to_string(),
            temporal,
            static_attr,
            base_value,
            method,
            warning: None,
        })
    }

    /// Sum of every attribution cell.
    pub fn total(&self) -> f64 {
        self.temporal.data().iter().sum::<f64>() + self.static_attr.iter().sum::<f64>()
    }

    /// Attributions in flattened-input order.
    pub fn flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.temporal.len() + self.static_attr.len());
        out.extend_from_slice(self.temporal.data());
        out.extend_from_slice(&self.static_attr);
        out
    }
}

/// Coalition budget for KernelSHAP.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoalitionBudget {
    Exhaustive,
    Sampled(usize),
}

impl Serialize for CoalitionBudget {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            CoalitionBudget::Exhaustive => serializer.serialize_str("exhaustive"),
            CoalitionBudget::Sampled(n) => serializer.serialize_u64(*n as u64),
        }
    }
}

impl<'de> Deserialize<'de> for CoalitionBudget {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let value = serde_json::Value::deserialize(deserializer)?;
        match &value {
            serde_json::Value::String(s) if s == "exhaustive" => Ok(CoalitionBudget::Exhaustive),
            serde_json::Value::Number(n) => n
                .as_u64()
                .filter(|&n| n > 0)
                .map(|n| CoalitionBudget::Sampled(n as usize))
                .ok_or_else(|| D::Error::custom("n_coalitions must be a positive integer")),
            _ => Err(D::Error::custom(
                "n_coalitions must be a positive integer or \"exhaustive\"",
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExplainConfig {
    pub n_coalitions: CoalitionBudget,
    pub background_size: usize,
    pub lime_n_perturb: usize,
    /// Defaults to 0.75·√d when unset.
    pub lime_kernel_width: Option<f64>,
    pub seed: u64,
}

impl Default for ExplainConfig {
    fn default() -> Self {
        ExplainConfig {
            n_coalitions: CoalitionBudget::Sampled(512),
            background_size: 50,
            lime_n_perturb: 1000,
            lime_kernel_width: None,
            seed: 42,
        }
    }
}

impl ExplainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.background_size == 0 {
            return Err(Error::config("background_size must be positive"));
        }
        if self.lime_n_perturb == 0 {
            return Err(Error::config("lime_n_perturb must be positive"));
        }
        if let Some(w) = self.lime_kernel_width {
            if !w.is_finite() || w <= 0.0 {
                return Err(Error::config("lime_kernel_width must be positive"));
            }
        }
        Ok(())
    }
}

/// Validated flattened view of (sample, background) against a model.
pub(crate) struct FlatTarget {
    pub shape: InputShape,
    pub x: Vec<f64>,
    pub background: Vec<Vec<f64>>,
}

impl FlatTarget {
    pub fn new<M: FlatPredictor>(
        model: &M,
        sample: &Sample,
        background: &[Sample],
    ) -> Result<FlatTarget> {
        if background.is_empty() {
            return Err(Error::data("background set is empty"));
        }
        let shape = InputShape {
            t_steps: sample.temporal.rows(),
            n_temporal: sample.temporal.cols(),
            n_static: sample.static_features.len(),
        };
        let x = flatten(sample);
        if x.len() != model.dim() {
            return Err(Error::shape(format!(
                "sample flattens to {} units, model expects {}",
                x.len(),
                model.dim()
            )));
        }
        let mut bg = Vec::with_capacity(background.len());
        for b in background {
            let flat = flatten(b);
            if flat.len() != x.len() {
                return Err(Error::shape(format!(
                    "background sample '{}' flattens to {} units, expected {}",
                    b.id,
                    flat.len(),
                    x.len()
                )));
            }
            bg.push(flat);
        }
        Ok(FlatTarget {
            shape,
            x,
            background: bg,
        })
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    /// Every background row identical to the sample: no contrast to
    /// attribute against.
    pub fn is_degenerate(&self) -> bool {
        self.background.iter().all(|b| b == &self.x)
    }

    /// v(S) for a u64 coalition mask (bit i set = cell i present):
    /// masked prediction averaged over the background set.
    pub fn value_u64<M: FlatPredictor>(&self, model: &M, mask: u64) -> f64 {
        let mut sum = 0.0;
        let mut masked = vec![0.0; self.dim()];
        for bg in &self.background {
            for i in 0..self.dim() {
                masked[i] = if mask >> i & 1 == 1 { self.x[i] } else { bg[i] };
            }
            sum += model.predict_flat(&masked);
        }
        sum / self.background.len() as f64
    }

    /// v(S) for an arbitrary-width coalition bitset.
    pub fn value_bits<M: FlatPredictor>(&self, model: &M, mask: &BitSet) -> f64 {
        let mut sum = 0.0;
        let mut masked = vec![0.0; self.dim()];
        for bg in &self.background {
            for i in 0..self.dim() {
                masked[i] = if mask.contains(i) { self.x[i] } else { bg[i] };
            }
            sum += model.predict_flat(&masked);
        }
        sum / self.background.len() as f64
    }
}

/// Coalition bitset sized at runtime; `Ord` so dedup maps iterate in a
/// stable order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) struct BitSet {
    words: Vec<u64>,
    len: usize,
}

impl BitSet {
    pub fn new(len: usize) -> Self {
        BitSet {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn insert(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn contains(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    #[cfg(test)]
    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }
}

/// Explain every sample with KernelSHAP, fanning out across threads.
/// Each sample owns an RNG stream derived from (config.seed, sample id),
/// so parallel and serial execution agree bit for bit.
pub fn explain_all<M: FlatPredictor>(
    model: &M,
    samples: &[Sample],
    background: &[Sample],
    config: &ExplainConfig,
) -> Result<Vec<AttributionMap>> {
    samples
        .par_iter()
        .map(|s| kernel_shap(model, s, background, config))
        .collect()
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bitset_roundtrip() {
        let mut b = BitSet::new(70);
        b.insert(0);
        b.insert(69);
        assert!(b.contains(0) && b.contains(69) && !b.contains(33));
        assert_eq!(b.count(), 2);
    }

    #[test]
    fn coalition_budget_serde() {
        let e: CoalitionBudget = serde_json::from_str("\"exhaustive\"").unwrap();
        assert_eq!(e, CoalitionBudget::Exhaustive);
        let s: CoalitionBudget = serde_json::from_str("256").unwrap();
        assert_eq!(s, CoalitionBudget::Sampled(256));
        assert!(serde_json::from_str::<CoalitionBudget>("0").is_err());
        assert_eq!(serde_json::to_string(&e).unwrap(), "\"exhaustive\"");
        assert_eq!(serde_json::to_string(&s).unwrap(), "256");
    }
}
