//! Prune plans: importance-thresholded feature removal (selective and
//! max strategies) and out-of-fold residual sample removal.
//!
//! Feature positions follow the global-importance order: temporal
//! features by column index, then static features by index.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::dataset::{FeatureKind, Sample, TemporalDataset};
use crate::error::{Error, Result};
use crate::explain::{rank_features, GlobalImportance};
use crate::model::RegressorConfig;
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PruneStrategy {
    Selective,
    Max,
    SampleResidual,
    Combined,
}

/// Feature-pruning strategy. Selective removes features scoring below
/// `tau` times the maximum score; max retains only the `top_k` ranked
/// features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "strategy", rename_all = "snake_case", deny_unknown_fields)]
pub enum FeaturePruneConfig {
    Selective { tau: f64 },
    Max { top_k: usize },
}

impl Default for FeaturePruneConfig {
    fn default() -> Self {
        FeaturePruneConfig::Selective { tau: 0.05 }
    }
}

impl FeaturePruneConfig {
    pub fn validate(&self) -> Result<()> {
        match self {
            FeaturePruneConfig::Selective { tau } => {
                if !tau.is_finite() || *tau < 0.0 {
                    return Err(Error::config("tau must be a nonnegative real"));
                }
            }
            FeaturePruneConfig::Max { top_k } => {
                if *top_k == 0 {
                    return Err(Error::config("top_k must be positive"));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplePruneConfig {
    /// Remove samples whose residual score exceeds the (1−q) quantile.
    pub quantile_q: f64,
    pub folds: usize,
    pub seed: u64,
}

impl Default for SamplePruneConfig {
    fn default() -> Self {
        SamplePruneConfig {
            quantile_q: 0.1,
            folds: 5,
            seed: 42,
        }
    }
}

impl SamplePruneConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.quantile_q) {
            return Err(Error::config("quantile_q must lie in [0, 1)"));
        }
        if self.folds < 2 {
            return Err(Error::config("folds must be at least 2"));
        }
        Ok(())
    }
}

/// Explicit removal sets plus the strategy and thresholds that produced
/// them, so a plan can be audited and replayed exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrunePlan {
    pub features_removed: BTreeSet<usize>,
    pub samples_removed: BTreeSet<String>,
    pub strategy: PruneStrategy,
    pub params: BTreeMap<String, serde_json::Value>,
}

impl PrunePlan {
    pub fn empty(strategy: PruneStrategy) -> Self {
        PrunePlan {
            features_removed: BTreeSet::new(),
            samples_removed: BTreeSet::new(),
            strategy,
            params: BTreeMap::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.features_removed.is_empty() && self.samples_removed.is_empty()
    }

    /// Merge a feature plan with an optional sample plan.
    pub fn combine(feature_plan: PrunePlan, sample_plan: Option<PrunePlan>) -> PrunePlan {
        match sample_plan {
            None => feature_plan,
            Some(sp) => {
                let mut params = feature_plan.params.clone();
                params.extend(sp.params.clone());
                PrunePlan {
                    features_removed: feature_plan.features_removed,
                    samples_removed: sp.samples_removed,
                    strategy: PruneStrategy::Combined,
                    params,
                }
            }
        }
    }
}

/// Dataset after pruning plus the old→new position mapping for the
/// retained features.
#[derive(Debug, Clone, PartialEq)]
pub struct PrunedDataset {
    pub dataset: TemporalDataset,
    pub feature_index_map: BTreeMap<usize, usize>,
}

/// Derive a feature prune plan from global importance scores. Always
/// retains at least the top-ranked feature.
pub fn plan_feature_prune(
    global: &GlobalImportance,
    config: &FeaturePruneConfig,
) -> Result<PrunePlan> {
    config.validate()?;
    let scores = &global.per_feature;
    let max_score = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !max_score.is_finite() || max_score <= 0.0 {
        return Err(Error::data(
            "degenerate importance: every per-feature score is zero",
        ));
    }

    let mut removed: BTreeSet<usize> = BTreeSet::new();
    let mut params = BTreeMap::new();
    let strategy = match config {
        FeaturePruneConfig::Selective { tau } => {
            for (i, &score) in scores.iter().enumerate() {
                if score < tau * max_score {
                    removed.insert(i);
                }
            }
            params.insert("tau".to_string(), serde_json::json!(tau));
            PruneStrategy::Selective
        }
        FeaturePruneConfig::Max { top_k } => {
            for (i, _) in rank_features(global).into_iter().skip(*top_k) {
                removed.insert(i);
            }
            params.insert("top_k".to_string(), serde_json::json!(top_k));
            PruneStrategy::Max
        }
    };

    if removed.len() == scores.len() {
        // Guard: never empty the feature set.
        let keep = rank_features(global)[0].0;
        removed.remove(&keep);
    }

    Ok(PrunePlan {
        features_removed: removed,
        samples_removed: BTreeSet::new(),
        strategy,
        params,
    })
}

/// Score every sample by its squared out-of-fold residual under seeded
/// k-fold cross-fitting. Fold membership depends only on (seed, id), and
/// fold training consumes samples in id order, so scores are invariant
/// to the dataset's sample order.
pub fn score_samples(
    dataset: &TemporalDataset,
    model_config: &RegressorConfig,
    sample_config: &SamplePruneConfig,
) -> Result<BTreeMap<String, f64>> {
    sample_config.validate()?;
    let n = dataset.n_samples();
    if n < sample_config.folds {
        return Err(Error::data(format!(
            "{n} samples cannot be split into {} folds",
            sample_config.folds
        )));
    }

    // Seeded permutation of ids via hash sort.
    let mut keyed: Vec<(u64, &Sample)> = dataset
        .samples
        .iter()
        .map(|s| {
            (
                rng::derive_seed(sample_config.seed, &format!("fold/{}", s.id)),
                s,
            )
        })
        .collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.id.cmp(&b.1.id)));

    let folds = sample_config.folds;
    let mut scores = BTreeMap::new();
    for fold in 0..folds {
        let lo = fold * n / folds;
        let hi = (fold + 1) * n / folds;
        let mut held_out: Vec<Sample> = keyed[lo..hi].iter().map(|(_, s)| (*s).clone()).collect();
        let mut train_part: Vec<Sample> = keyed[..lo]
            .iter()
            .chain(&keyed[hi..])
            .map(|(_, s)| (*s).clone())
            .collect();
        held_out.sort_by(|a, b| a.id.cmp(&b.id));
        train_part.sort_by(|a, b| a.id.cmp(&b.id));

        let train_ds = TemporalDataset {
            features: dataset.features.clone(),
            samples: train_part,
            normalization: dataset.normalization.clone(),
        };
        let fold_config = RegressorConfig {
            seed: rng::derive_seed(model_config.seed, &format!("fold{fold}")),
            ..model_config.clone()
        };
        let (model, _) = crate::model::train(&train_ds, &train_ds, &fold_config)
            .map_err(|e| e.in_stage("score_samples"))?;
        let preds = model.predict(&held_out)?;
        for (sample, pred) in held_out.iter().zip(preds) {
            let residual = sample.target - pred;
            scores.insert(sample.id.clone(), residual * residual);
        }
    }
    Ok(scores)
}

/// Remove samples whose score exceeds the empirical (1−q) quantile
/// (linear interpolation). q = 0 removes none.
pub fn plan_sample_prune(
    scores: &BTreeMap<String, f64>,
    config: &SamplePruneConfig,
) -> Result<PrunePlan> {
    config.validate()?;
    if scores.is_empty() {
        return Err(Error::data("plan_sample_prune: empty score map"));
    }

    let mut sorted: Vec<f64> = scores.values().copied().collect();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let threshold = interpolated_quantile(&sorted, 1.0 - config.quantile_q);

    let removed: BTreeSet<String> = scores
        .iter()
        .filter(|(_, &score)| score > threshold)
        .map(|(id, _)| id.clone())
        .collect();
    debug_assert!(removed.len() < scores.len());

    let mut params = BTreeMap::new();
    params.insert(
        "quantile_q".to_string(),
        serde_json::json!(config.quantile_q),
    );
    params.insert("folds".to_string(), serde_json::json!(config.folds));
    Ok(PrunePlan {
        features_removed: BTreeSet::new(),
        samples_removed: removed,
        strategy: PruneStrategy::SampleResidual,
        params,
    })
}

/// Quantile of ascending `sorted` at probability `p`, interpolating
/// linearly between order statistics.
fn interpolated_quantile(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = p * (n - 1) as f64;
    let lo = h.floor() as usize;
    if lo + 1 >= n {
        return sorted[n - 1];
    }
    sorted[lo] + (h - lo as f64) * (sorted[lo + 1] - sorted[lo])
}

/// Apply a plan, producing a new dataset with removed features and
/// samples dropped and feature indices re-compacted. The input dataset
/// is untouched.
pub fn apply(dataset: &TemporalDataset, plan: &PrunePlan) -> Result<PrunedDataset> {
    let temporal_specs = dataset.temporal_specs();
    let static_specs = dataset.static_specs();
    let n_temporal = temporal_specs.len();
    let n_features = n_temporal + static_specs.len();

    for &pos in &plan.features_removed {
        if pos >= n_features {
            return Err(Error::data(format!(
                "prune plan references unknown feature position {pos} (dataset has {n_features})"
            )));
        }
    }
    if plan.features_removed.len() == n_features && n_features > 0 {
        return Err(Error::data("prune plan removes every feature"));
    }
    let known_ids: BTreeSet<&str> = dataset.samples.iter().map(|s| s.id.as_str()).collect();
    for id in &plan.samples_removed {
        if !known_ids.contains(id.as_str()) {
            return Err(Error::data(format!(
                "prune plan references unknown sample '{id}'"
            )));
        }
    }
    if plan.samples_removed.len() == dataset.n_samples() && dataset.n_samples() > 0 {
        return Err(Error::data("prune plan removes every sample"));
    }

    let removed_temporal: BTreeSet<usize> = plan
        .features_removed
        .iter()
        .filter(|&&p| p < n_temporal)
        .copied()
        .collect();
    let removed_static: BTreeSet<usize> = plan
        .features_removed
        .iter()
        .filter(|&&p| p >= n_temporal)
        .map(|&p| p - n_temporal)
        .collect();

    let mut feature_index_map = BTreeMap::new();
    let mut next = 0usize;
    for pos in 0..n_features {
        if !plan.features_removed.contains(&pos) {
            feature_index_map.insert(pos, next);
            next += 1;
        }
    }

    // Rebuild the schema with compacted per-kind indices.
    let mut features = Vec::with_capacity(n_features - plan.features_removed.len());
    let mut new_idx = 0usize;
    for (idx, spec) in temporal_specs.iter().enumerate() {
        if !removed_temporal.contains(&idx) {
            features.push(crate::dataset::FeatureSpec {
                name: spec.name.clone(),
                kind: FeatureKind::Temporal,
                index: new_idx,
            });
            new_idx += 1;
        }
    }
    let mut new_idx = 0usize;
    for (idx, spec) in static_specs.iter().enumerate() {
        if !removed_static.contains(&idx) {
            features.push(crate::dataset::FeatureSpec {
                name: spec.name.clone(),
                kind: FeatureKind::Static,
                index: new_idx,
            });
            new_idx += 1;
        }
    }

    let samples: Vec<Sample> = dataset
        .samples
        .iter()
        .filter(|s| !plan.samples_removed.contains(&s.id))
        .map(|s| Sample {
            id: s.id.clone(),
            temporal: s.temporal.without_columns(&removed_temporal),
            static_features: s
                .static_features
                .iter()
                .enumerate()
                .filter(|(i, _)| !removed_static.contains(i))
                .map(|(_, &v)| v)
                .collect(),
            target: s.target,
        })
        .collect();

    let normalization =
        dataset
            .normalization
            .as_ref()
            .map(|spec| crate::dataset::NormalizationSpec {
                temporal: spec
                    .temporal
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| !removed_temporal.contains(i))
                    .map(|(_, r)| *r)
                    .collect(),
                static_features: spec
                    .static_features
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| !removed_static.contains(i))
                    .map(|(_, r)| *r)
                    .collect(),
                constant_fill: spec.constant_fill,
            });

    let mut pruned = TemporalDataset::new(features, samples)?;
    pruned.normalization = normalization;
    Ok(PrunedDataset {
        dataset: pruned,
        feature_index_map,
    })
}

/// Retained tensor cells after pruning, as a percentage of the original:
/// `100·cells_after/cells_before`.
pub fn size_percent(before: &TemporalDataset, after: &TemporalDataset) -> Result<f64> {
    let cells_before = before.n_cells();
    if cells_before == 0 {
        return Err(Error::data("size_percent: empty reference dataset"));
    }
    Ok(100.0 * after.n_cells() as f64 / cells_before as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{FeatureSpec, NormalizationSpec, SyntheticConfig};
    use crate::explain::{AttributionMethod, GlobalImportance};
    use crate::grid::Grid;
    use crate::model::RegressorKind;
    use rand::Rng;

    fn importance(scores: Vec<f64>) -> GlobalImportance {
        GlobalImportance {
            method: AttributionMethod::KernelShap,
            n_samples: 1,
            signed_mean: Grid::zeros(1, scores.len()),
            signed_mean_static: vec![],
            abs_mean: Grid::zeros(1, scores.len()),
            abs_mean_static: vec![],
            per_feature: scores,
        }
    }

    #[test]
    fn selective_removes_below_relative_threshold() {
        let plan = plan_feature_prune(
            &importance(vec![0.5, 0.3, 0.01]),
            &FeaturePruneConfig::Selective { tau: 0.05 },
        )
        .unwrap();
        assert_eq!(plan.features_removed, [2].into_iter().collect());
        assert_eq!(plan.strategy, PruneStrategy::Selective);
    }

    #[test]
    fn max_keeps_top_k() {
        let plan = plan_feature_prune(
            &importance(vec![0.5, 0.3, 0.01]),
            &FeaturePruneConfig::Max { top_k: 1 },
        )
        .unwrap();
        assert_eq!(plan.features_removed, [1, 2].into_iter().collect());
    }

    #[test]
    fn degenerate_importance_is_an_error() {
        assert!(
            plan_feature_prune(&importance(vec![0.0, 0.0]), &FeaturePruneConfig::default())
                .is_err()
        );
    }

    #[test]
    fn guard_always_retains_one_feature() {
        // tau above 1 would remove everything; the top feature survives.
        let plan = plan_feature_prune(
            &importance(vec![0.5, 0.3]),
            &FeaturePruneConfig::Selective { tau: 2.0 },
        )
        .unwrap();
        assert_eq!(plan.features_removed, [1].into_iter().collect());
    }

    #[test]
    fn identity_configs_remove_nothing() {
        let global = importance(vec![0.5, 0.3, 0.1]);
        let selective =
            plan_feature_prune(&global, &FeaturePruneConfig::Selective { tau: 0.0 }).unwrap();
        assert!(selective.features_removed.is_empty());
        let max = plan_feature_prune(&global, &FeaturePruneConfig::Max { top_k: 3 }).unwrap();
        assert!(max.features_removed.is_empty());
    }

    #[test]
    fn raising_tau_removes_supersets() {
        let mut rng = crate::rng::stream(3, "prune_monotone");
        for _ in 0..20 {
            let scores: Vec<f64> = (0..8).map(|_| rng.random::<f64>()).collect();
            let global = importance(scores);
            let mut previous: BTreeSet<usize> = BTreeSet::new();
            for tau in [0.0, 0.1, 0.3, 0.7, 1.0] {
                let plan =
                    plan_feature_prune(&global, &FeaturePruneConfig::Selective { tau }).unwrap();
                assert!(plan.features_removed.is_superset(&previous));
                previous = plan.features_removed;
            }
        }
    }

    #[test]
    fn lowering_top_k_removes_supersets() {
        let global = importance(vec![0.9, 0.1, 0.5, 0.3]);
        let mut previous: BTreeSet<usize> = BTreeSet::new();
        for top_k in [4, 3, 2, 1] {
            let plan = plan_feature_prune(&global, &FeaturePruneConfig::Max { top_k }).unwrap();
            assert!(plan.features_removed.is_superset(&previous));
            previous = plan.features_removed;
        }
    }

    fn linear_dataset(n: usize, corrupt: Option<(usize, f64)>) -> TemporalDataset {
        let mut rng = crate::rng::stream(8, "prune_linear");
        let samples = (0..n)
            .map(|i| {
                let a: f64 = rng.random();
                let b: f64 = rng.random();
                let c: f64 = rng.random();
                let mut target = 0.8 * a - 0.4 * b + 0.2 * c + 0.1;
                if let Some((idx, offset)) = corrupt {
                    if idx == i {
                        target += offset;
                    }
                }
                Sample {
                    id: format!("s{i:03}"),
                    temporal: Grid::from_rows(vec![vec![a, b, c]]).unwrap(),
                    static_features: vec![],
                    target,
                }
            })
            .collect();
        let mut ds = TemporalDataset::new(
            vec![
                FeatureSpec::temporal("a", 0),
                FeatureSpec::temporal("b", 1),
                FeatureSpec::temporal("c", 2),
            ],
            samples,
        )
        .unwrap();
        ds.normalization = Some(NormalizationSpec {
            temporal: vec![crate::dataset::FeatureRange { min: 0.0, max: 1.0 }; 3],
            static_features: vec![],
            constant_fill: 0.5,
        });
        ds
    }

    fn ridge_config() -> RegressorConfig {
        RegressorConfig {
            kind: RegressorKind::Ridge,
            ridge_lambda: 0.0,
            ..RegressorConfig::default()
        }
    }

    #[test]
    fn noise_free_linear_data_scores_near_zero() {
        let ds = linear_dataset(50, None);
        let scores = score_samples(&ds, &ridge_config(), &SamplePruneConfig::default()).unwrap();
        assert_eq!(scores.len(), 50);
        for (id, score) in &scores {
            assert!(*score < 1e-8, "sample {id} scored {score}");
        }
    }

    #[test]
    fn corrupted_target_gets_the_max_score() {
        let ds = linear_dataset(100, Some((37, 10.0)));
        let scores = score_samples(&ds, &ridge_config(), &SamplePruneConfig::default()).unwrap();
        let (max_id, _) = scores
            .iter()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap();
        assert_eq!(max_id, "s037");
    }

    #[test]
    fn scoring_is_deterministic_and_order_invariant() {
        let ds = linear_dataset(40, Some((5, 3.0)));
        let a = score_samples(&ds, &ridge_config(), &SamplePruneConfig::default()).unwrap();
        let b = score_samples(&ds, &ridge_config(), &SamplePruneConfig::default()).unwrap();
        assert_eq!(a, b);

        let mut reversed = ds.clone();
        reversed.samples.reverse();
        let c = score_samples(&reversed, &ridge_config(), &SamplePruneConfig::default()).unwrap();
        assert_eq!(a, c);
    }

    #[test]
    fn fewer_samples_than_folds_is_an_error() {
        let ds = linear_dataset(3, None);
        let config = SamplePruneConfig {
            folds: 5,
            ..SamplePruneConfig::default()
        };
        assert!(score_samples(&ds, &ridge_config(), &config).is_err());
    }

    #[test]
    fn quantile_zero_removes_nothing() {
        let scores: BTreeMap<String, f64> = [("a", 1.0), ("b", 2.0), ("c", 100.0)]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();
        let plan = plan_sample_prune(
            &scores,
            &SamplePruneConfig {
                quantile_q: 0.0,
                ..SamplePruneConfig::default()
            },
        )
        .unwrap();
        assert!(plan.samples_removed.is_empty());
    }

    #[test]
    fn quantile_picks_the_outlier() {
        // Quantile at p = 0.66 of [1, 2, 100] interpolates to 33.36:
        // only c exceeds it.
        let scores: BTreeMap<String, f64> = [("a", 1.0), ("b", 2.0), ("c", 100.0)]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();
        let plan = plan_sample_prune(
            &scores,
            &SamplePruneConfig {
                quantile_q: 0.34,
                ..SamplePruneConfig::default()
            },
        )
        .unwrap();
        assert_eq!(
            plan.samples_removed,
            ["c".to_string()].into_iter().collect()
        );
    }

    #[test]
    fn interpolated_quantile_matches_hand_arithmetic() {
        let sorted = [1.0, 2.0, 100.0];
        let q = interpolated_quantile(&sorted, 0.66);
        assert!((q - 33.36).abs() < 1e-9, "{q}");
        assert_eq!(interpolated_quantile(&sorted, 1.0), 100.0);
        assert_eq!(interpolated_quantile(&sorted, 0.0), 1.0);
    }

    #[test]
    fn empty_plan_leaves_dataset_unchanged() {
        let ds = linear_dataset(10, None);
        let out = apply(&ds, &PrunePlan::empty(PruneStrategy::Selective)).unwrap();
        assert_eq!(out.dataset, ds);
        assert_eq!(out.feature_index_map.len(), 3);
    }

    #[test]
    fn removing_middle_feature_compacts_indices() {
        let ds = linear_dataset(10, None);
        let mut plan = PrunePlan::empty(PruneStrategy::Selective);
        plan.features_removed.insert(1);
        let out = apply(&ds, &plan).unwrap();
        assert_eq!(out.dataset.n_temporal(), 2);
        let expected: BTreeMap<usize, usize> = [(0, 0), (2, 1)].into_iter().collect();
        assert_eq!(out.feature_index_map, expected);
        assert_eq!(out.dataset.features[1].name, "c");
        assert_eq!(out.dataset.features[1].index, 1);
        // Column values shifted over.
        assert_eq!(
            out.dataset.samples[0].temporal.get(0, 1),
            ds.samples[0].temporal.get(0, 2)
        );
    }

    #[test]
    fn unknown_references_are_errors() {
        let ds = linear_dataset(5, None);
        let mut plan = PrunePlan::empty(PruneStrategy::Selective);
        plan.features_removed.insert(9);
        assert!(apply(&ds, &plan).is_err());

        let mut plan = PrunePlan::empty(PruneStrategy::SampleResidual);
        plan.samples_removed.insert("nope".to_string());
        assert!(apply(&ds, &plan).is_err());
    }

    #[test]
    fn apply_never_grows_and_shrinks_strictly_when_nonempty() {
        let ds = linear_dataset(12, None);
        let mut plan = PrunePlan::empty(PruneStrategy::Combined);
        plan.features_removed.insert(0);
        plan.samples_removed.insert("s003".to_string());
        let out = apply(&ds, &plan).unwrap();
        assert!(out.dataset.n_cells() < ds.n_cells());
        assert_eq!(out.dataset.n_samples(), 11);
        assert_eq!(out.dataset.n_temporal(), 2);
    }

    #[test]
    fn size_percent_examples() {
        let ds = linear_dataset(10, None);
        assert_eq!(size_percent(&ds, &ds).unwrap(), 100.0);

        let mut plan = PrunePlan::empty(PruneStrategy::SampleResidual);
        for i in 0..5 {
            plan.samples_removed.insert(format!("s{i:03}"));
        }
        let half = apply(&ds, &plan).unwrap();
        assert_eq!(size_percent(&ds, &half.dataset).unwrap(), 50.0);
    }

    #[test]
    fn size_percent_feature_ratio() {
        let config = SyntheticConfig {
            n_samples: 10,
            t_steps: 1,
            n_structured: 20,
            n_noise: 10,
            noise_sigma: 0.0,
            seed: 1,
        };
        let ds = crate::dataset::generate_synthetic(&config).unwrap();
        let mut plan = PrunePlan::empty(PruneStrategy::Max);
        for pos in 0..10 {
            plan.features_removed.insert(pos);
        }
        let out = apply(&ds, &plan).unwrap();
        let retained = size_percent(&ds, &out.dataset).unwrap();
        assert!((retained - 100.0 * 20.0 / 30.0).abs() < 1e-9);
    }
}
