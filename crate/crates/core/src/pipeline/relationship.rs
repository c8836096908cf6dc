//! Structured per-feature relationship report, generated from fixed
//! templates over the computed statistics.

use serde::{Deserialize, Serialize};

use crate::dataset::FeatureSpec;
use crate::error::{Error, Result};
use crate::explain::GlobalImportance;
use crate::prune::PrunePlan;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PeakSign {
    Positive,
    Negative,
    Zero,
}

impl PeakSign {
    fn of(v: f64) -> PeakSign {
        if v > 0.0 {
            PeakSign::Positive
        } else if v < 0.0 {
            PeakSign::Negative
        } else {
            PeakSign::Zero
        }
    }

    fn glyph(&self) -> &'static str {
        match self {
            PeakSign::Positive => "+",
            PeakSign::Negative => "-",
            PeakSign::Zero => "0",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationshipEntry {
    pub name: String,
    /// Position in the global-importance ordering (temporal, then static).
    pub feature_position: usize,
    pub importance: f64,
    /// 1-based pre-prune rank.
    pub rank: usize,
    /// Time row where the absolute attribution peaks (0 for statics).
    pub peak_time_index: usize,
    /// Sign of the signed mean at that peak.
    pub peak_sign: PeakSign,
    pub retained: bool,
    /// Templated one-line summary, a pure function of the fields above.
    pub summary: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationshipReport {
    pub entries: Vec<RelationshipEntry>,
}

/// Build one entry per original feature, ordered by rank. `ranking` is
/// the output of `rank_features` on `global`; `feature_specs` lists the
/// original (pre-prune) features.
pub fn build_relationship_report(
    global: &GlobalImportance,
    ranking: &[(usize, f64)],
    plan: &PrunePlan,
    feature_specs: &[FeatureSpec],
) -> Result<RelationshipReport> {
    // Canonical position order: temporal by index, then static by index.
    let mut temporal: Vec<&FeatureSpec> = feature_specs
        .iter()
        .filter(|f| f.kind == crate::dataset::FeatureKind::Temporal)
        .collect();
    temporal.sort_by_key(|f| f.index);
    let mut statics: Vec<&FeatureSpec> = feature_specs
        .iter()
        .filter(|f| f.kind == crate::dataset::FeatureKind::Static)
        .collect();
    statics.sort_by_key(|f| f.index);
    let ordered: Vec<&FeatureSpec> = temporal.iter().chain(statics.iter()).copied().collect();

    if ordered.len() != global.n_features() || ranking.len() != global.n_features() {
        return Err(Error::shape(format!(
            "{} features in schema, {} in importance, {} in ranking",
            ordered.len(),
            global.n_features(),
            ranking.len()
        )));
    }

    let n_temporal = global.abs_mean.cols();
    let mut entries = Vec::with_capacity(ranking.len());
    for (rank0, &(position, importance)) in ranking.iter().enumerate() {
        let spec = ordered[position];
        let (peak_time_index, peak_sign) = if position < n_temporal {
            let mut best_t = 0usize;
            let mut best_v = f64::NEG_INFINITY;
            for t in 0..global.abs_mean.rows() {
                let v = global.abs_mean.get(t, position);
                if v > best_v {
                    best_v = v;
                    best_t = t;
                }
            }
            (
                best_t,
                PeakSign::of(global.signed_mean.get(best_t, position)),
            )
        } else {
            (
                0,
                PeakSign::of(global.signed_mean_static[position - n_temporal]),
            )
        };
        let retained = !plan.features_removed.contains(&position);
        let rank = rank0 + 1;
        let summary = format!(
            "{}: rank {}, peak influence at t={}, {}",
            spec.name,
            rank,
            peak_time_index,
            if retained { "retained" } else { "pruned" }
        );
        entries.push(RelationshipEntry {
            name: spec.name.clone(),
            feature_position: position,
            importance,
            rank,
            peak_time_index,
            peak_sign,
            retained,
            summary,
        });
    }

    Ok(RelationshipReport { entries })
}

impl RelationshipReport {
    pub fn to_markdown(&self) -> String {
        let mut out = String::from("# Feature relationships\n\n");
        out.push_str("| Rank | Feature | Importance | Peak t | Sign at peak | Status |\n");
        out.push_str("|---|---|---|---|---|---|\n");
        for e in &self.entries {
            out.push_str(&format!(
                "| {} | {} | {:.6} | {} | {} | {} |\n",
                e.rank,
                e.name,
                e.importance,
                e.peak_time_index,
                e.peak_sign.glyph(),
                if e.retained { "retained" } else { "pruned" }
            ));
        }
        out.push('\n');
        for e in &self.entries {
            out.push_str(&format!("- {}\n", e.summary));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::FeatureSpec;
    use crate::explain::{global_heatmap, rank_features, AttributionMap, AttributionMethod};
    use crate::grid::Grid;
    use crate::prune::{PrunePlan, PruneStrategy};

    fn two_step_global() -> GlobalImportance {
        let map = AttributionMap {
            sample_id: "s".into(),
            temporal: Grid::from_rows(vec![vec![0.1, -0.9], vec![0.6, 0.2]]).unwrap(),
            static_attr: vec![-0.05],
            base_value: 0.0,
            method: AttributionMethod::KernelShap,
            warning: None,
        };
        global_heatmap(&[map]).unwrap()
    }

    fn specs() -> Vec<FeatureSpec> {
        vec![
            FeatureSpec::temporal("a", 0),
            FeatureSpec::temporal("b", 1),
            FeatureSpec::static_("s", 0),
        ]
    }

    #[test]
    fn covers_every_feature_once_with_peaks_and_flags() {
        let global = two_step_global();
        let ranking = rank_features(&global);
        let mut plan = PrunePlan::empty(PruneStrategy::Selective);
        plan.features_removed.insert(2);
        let report = build_relationship_report(&global, &ranking, &plan, &specs()).unwrap();

        assert_eq!(report.entries.len(), 3);
        // b: abs means (0.9, 0.2) -> peak at t=0, signed -0.9 there.
        let b = report.entries.iter().find(|e| e.name == "b").unwrap();
        assert_eq!(b.rank, 1);
        assert_eq!(b.peak_time_index, 0);
        assert_eq!(b.peak_sign, PeakSign::Negative);
        assert!(b.retained);
        // a: abs means (0.1, 0.6) -> peak at t=1.
        let a = report.entries.iter().find(|e| e.name == "a").unwrap();
        assert_eq!(a.peak_time_index, 1);
        assert_eq!(a.peak_sign, PeakSign::Positive);
        // Pruned static keeps its pre-prune rank.
        let s = report.entries.iter().find(|e| e.name == "s").unwrap();
        assert!(!s.retained);
        assert_eq!(s.rank, 3);
        assert!(s.summary.contains("pruned"));
        assert!(s.summary.contains("rank 3"));
    }

    #[test]
    fn single_time_step_peaks_at_zero() {
        let map = AttributionMap {
            sample_id: "s".into(),
            temporal: Grid::from_rows(vec![vec![0.3, 0.7]]).unwrap(),
            static_attr: vec![],
            base_value: 0.0,
            method: AttributionMethod::KernelShap,
            warning: None,
        };
        let global = global_heatmap(&[map]).unwrap();
        let ranking = rank_features(&global);
        let plan = PrunePlan::empty(PruneStrategy::Selective);
        let specs = vec![FeatureSpec::temporal("a", 0), FeatureSpec::temporal("b", 1)];
        let report = build_relationship_report(&global, &ranking, &plan, &specs).unwrap();
        assert!(report.entries.iter().all(|e| e.peak_time_index == 0));
    }

    #[test]
    fn summary_is_a_pure_function_of_fields() {
        let global = two_step_global();
        let ranking = rank_features(&global);
        let plan = PrunePlan::empty(PruneStrategy::Selective);
        let a = build_relationship_report(&global, &ranking, &plan, &specs()).unwrap();
        let b = build_relationship_report(&global, &ranking, &plan, &specs()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_markdown(), b.to_markdown());
    }
}
