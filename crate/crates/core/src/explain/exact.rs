//! Exact Shapley values by full subset enumeration.
//!
//! φᵢ = Σ_{S ∌ i} |S|!·(d−|S|−1)!/d! · [v(S∪{i}) − v(S)]
//!
//! Cost is O(2^d·|background|) model calls, so this is a verification
//! oracle for small d, guarded at `MAX_EXACT_UNITS`.

use crate::dataset::Sample;
use crate::error::{Error, Result};
use crate::model::FlatPredictor;

use super::{AttributionMap, AttributionMethod, FlatTarget, MAX_EXACT_UNITS};

pub fn exact_shapley<M: FlatPredictor>(
    model: &M,
    sample: &Sample,
    background: &[Sample],
) -> Result<AttributionMap> {
    let target = FlatTarget::new(model, sample, background)?;
    let d = target.dim();
    if d == 0 {
        return Err(Error::data("sample has no attribution units"));
    }
    if d > MAX_EXACT_UNITS {
        return Err(Error::config(format!(
            "exact Shapley enumeration is limited to {MAX_EXACT_UNITS} units, got {d}"
        )));
    }

    // Memoize v over all 2^d coalitions.
    let n_masks = 1usize << d;
    let mut values = Vec::with_capacity(n_masks);
    for mask in 0..n_masks as u64 {
        values.push(target.value_u64(model, mask));
    }

    // factorial[k] = k! as f64 (d ≤ 12 keeps these exact).
    let mut factorial = vec![1.0f64; d + 1];
    for k in 1..=d {
        factorial[k] = factorial[k - 1] * k as f64;
    }

    let mut phi = vec![0.0f64; d];
    for (i, phi_i) in phi.iter_mut().enumerate() {
        let bit = 1u64 << i;
        for mask in 0..n_masks as u64 {
            if mask & bit != 0 {
                continue;
            }
            let s = mask.count_ones() as usize;
            let weight = factorial[s] * factorial[d - s - 1] / factorial[d];
            *phi_i += weight * (values[(mask | bit) as usize] - values[mask as usize]);
        }
    }

    AttributionMap::from_flat(
        &sample.id,
        &target.shape,
        &phi,
        values[0],
        AttributionMethod::ExactShapley,
    )
}
