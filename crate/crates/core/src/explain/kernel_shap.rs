//! KernelSHAP: Shapley values recovered by a weighted least-squares fit
//! over coalitions, weighted by the Shapley kernel
//!
//! ```text
//! w(|z|) = (d−1) / (C(d,|z|)·|z|·(d−|z|))
//! ```
//!
//! The efficiency constraint Σφ = f(x) − base is enforced by eliminating
//! the last attribution unit from the regression, so local accuracy holds
//! exactly. With every proper coalition enumerated, the solution equals
//! the exact Shapley value; under a budget, coalition sizes are
//! enumerated fully in ascending (k, d−k) pairs while they fit -
//! singletons and all-but-one coalitions always first - and the leftover
//! budget is sampled from the kernel distribution over remaining sizes,
//! each draw carrying an equal share of the remaining kernel mass.

use std::collections::BTreeMap;

use rand::Rng;

use crate::dataset::Sample;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::model::{weighted_least_squares, FlatPredictor, DEFAULT_RIDGE_EPS};
use crate::rng;

use super::{
    AttributionMap, AttributionMethod, BitSet, CoalitionBudget, ExplainConfig, FlatTarget,
    MAX_EXHAUSTIVE_UNITS,
};

/// Shapley kernel weight for a coalition of size `k` out of `d`.
fn kernel_weight(k: usize, d: usize) -> f64 {
    (d as f64 - 1.0) / (binomial(d, k) * k as f64 * (d - k) as f64)
}

/// Kernel mass of a whole size class: `C(d,k)·w(k)`.
fn size_mass(k: usize, d: usize) -> f64 {
    (d as f64 - 1.0) / (k as f64 * (d - k) as f64)
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    let mut r = 1.0f64;
    for i in 0..k {
        r *= (n - i) as f64;
        r /= (i + 1) as f64;
    }
    r
}

/// `C(n,k)` clamped to `cap` (avoids overflow when only a budget
/// comparison is needed).
fn binomial_capped(n: usize, k: usize, cap: usize) -> usize {
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r.saturating_mul((n - i) as u128) / (i + 1) as u128;
        if r >= cap as u128 {
            return cap;
        }
    }
    r.min(cap as u128) as usize
}

/// Advance `idx` to the next k-combination of 0..d in lexicographic
/// order; false when exhausted.
fn next_combination(idx: &mut [usize], d: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] < d - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn mask_from_indices(d: usize, indices: &[usize]) -> BitSet {
    let mut mask = BitSet::new(d);
    for &i in indices {
        mask.insert(i);
    }
    mask
}

/// Coalition rows for the regression: mask → accumulated weight, plus a
/// flag for whether every proper coalition was enumerated.
fn build_coalitions(
    d: usize,
    budget: CoalitionBudget,
    rng: &mut impl Rng,
) -> Result<(BTreeMap<BitSet, f64>, bool)> {
    let mut rows: BTreeMap<BitSet, f64> = BTreeMap::new();
    let mut remaining = match budget {
        CoalitionBudget::Exhaustive => {
            if d > MAX_EXHAUSTIVE_UNITS {
                return Err(Error::config(format!(
                    "exhaustive mode is limited to {MAX_EXHAUSTIVE_UNITS} units, got {d}"
                )));
            }
            usize::MAX
        }
        CoalitionBudget::Sampled(n) => n,
    };

    // Enumerate size classes in ascending (k, d−k) pairs while the whole
    // class fits the budget. The k = 1 class (singletons and their
    // complements) is always enumerated, budget or not.
    let mut enumerated = vec![false; d]; // by size 1..=d−1, index k
    let max_pair = d / 2;
    let mut all_enumerated = true;
    for k in 1..=max_pair {
        let sizes: &[usize] = if k == d - k { &[k] } else { &[k, d - k] };
        let class_count: usize = sizes
            .iter()
            .map(|&s| binomial_capped(d, s, usize::MAX))
            .fold(0usize, |a, b| a.saturating_add(b));
        if k > 1 && class_count > remaining {
            all_enumerated = false;
            break;
        }
        for &s in sizes {
            let w = kernel_weight(s, d);
            let mut idx: Vec<usize> = (0..s).collect();
            loop {
                rows.insert(mask_from_indices(d, &idx), w);
                if !next_combination(&mut idx, d) {
                    break;
                }
            }
        }
        enumerated[k] = true;
        enumerated[d - k] = true;
        remaining = remaining.saturating_sub(class_count);
    }
    // Odd d leaves no middle class; even d's middle is handled above.
    if d >= 2 && (1..d).any(|k| !enumerated[k]) {
        all_enumerated = false;
    }

    if !all_enumerated && remaining > 0 {
        let open_sizes: Vec<usize> = (1..d).filter(|&k| !enumerated[k]).collect();
        let masses: Vec<f64> = open_sizes.iter().map(|&k| size_mass(k, d)).collect();
        let total_mass: f64 = masses.iter().sum();
        let per_draw = total_mass / remaining as f64;
        for _ in 0..remaining {
            let mut pick = rng.random::<f64>() * total_mass;
            let mut chosen = open_sizes[open_sizes.len() - 1];
            for (&k, &m) in open_sizes.iter().zip(&masses) {
                if pick < m {
                    chosen = k;
                    break;
                }
                pick -= m;
            }
            let indices = rand::seq::index::sample(rng, d, chosen).into_vec();
            *rows.entry(mask_from_indices(d, &indices)).or_insert(0.0) += per_draw;
        }
    }

    Ok((rows, all_enumerated))
}

/// KernelSHAP attribution of one sample. Deterministic per
/// (config.seed, sample id).
pub fn kernel_shap<M: FlatPredictor>(
    model: &M,
    sample: &Sample,
    background: &[Sample],
    config: &ExplainConfig,
) -> Result<AttributionMap> {
    config.validate()?;
    let target = FlatTarget::new(model, sample, background)?;
    let d = target.dim();
    if d == 0 {
        return Err(Error::data("sample has no attribution units"));
    }

    let base_value = target.value_bits(model, &BitSet::new(d));
    if target.is_degenerate() {
        let mut map = AttributionMap::from_flat(
            &sample.id,
            &target.shape,
            &vec![0.0; d],
            base_value,
            AttributionMethod::KernelShap,
        )?;
        map.warning = Some(
            "degenerate background: every background row equals the sample; \
             attributions set to zero"
                .to_string(),
        );
        return Ok(map);
    }

    let fx = model.predict_flat(&target.x);
    let delta = fx - base_value;
    let phi = if d == 1 {
        vec![delta]
    } else {
        let mut stream = rng::stream(config.seed, &format!("shap/{}", sample.id));
        let (rows, complete) = build_coalitions(d, config.n_coalitions, &mut stream)?;

        let n_rows = rows.len();
        let mut design = Grid::zeros(n_rows, d - 1);
        let mut weights = Vec::with_capacity(n_rows);
        let mut targets = Vec::with_capacity(n_rows);
        for (i, (mask, w)) in rows.iter().enumerate() {
            let v = target.value_bits(model, mask);
            if !v.is_finite() {
                return Err(Error::numeric(
                    "model produced a non-finite masked prediction",
                ));
            }
            let z_last = if mask.contains(d - 1) { 1.0 } else { 0.0 };
            for j in 0..d - 1 {
                let z_j = if mask.contains(j) { 1.0 } else { 0.0 };
                design.set(i, j, z_j - z_last);
            }
            weights.push(*w);
            targets.push(v - base_value - z_last * delta);
        }

        let eps = if complete { 0.0 } else { DEFAULT_RIDGE_EPS };
        let mut phi = weighted_least_squares(&design, &weights, &targets, eps)?;
        let allocated: f64 = phi.iter().sum();
        phi.push(delta - allocated);
        phi
    };

    AttributionMap::from_flat(
        &sample.id,
        &target.shape,
        &phi,
        base_value,
        AttributionMethod::KernelShap,
    )
}
