//! Seeded train/validation/test partitioning.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

use super::TemporalDataset;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitFractions {
    pub train: f64,
    pub val: f64,
    pub test: f64,
}

impl Default for SplitFractions {
    fn default() -> Self {
        SplitFractions {
            train: 0.8,
            val: 0.1,
            test: 0.1,
        }
    }
}

impl SplitFractions {
    pub fn validate(&self) -> Result<()> {
        let parts = [self.train, self.val, self.test];
        if parts.iter().any(|&f| !f.is_finite() || f <= 0.0) {
            return Err(Error::config("split fractions must all be positive"));
        }
        let sum: f64 = parts.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::config(format!(
                "split fractions must sum to 1, got {sum}"
            )));
        }
        Ok(())
    }
}

/// Largest-remainder apportionment of `n` into three parts; ties go to
/// the earlier part.
fn part_sizes(n: usize, fractions: &SplitFractions) -> [usize; 3] {
    let fs = [fractions.train, fractions.val, fractions.test];
    let mut sizes = [0usize; 3];
    let mut remainders = [0.0f64; 3];
    let mut assigned = 0usize;
    for i in 0..3 {
        let exact = fs[i] * n as f64;
        sizes[i] = exact.floor() as usize;
        remainders[i] = exact - exact.floor();
        assigned += sizes[i];
    }
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| {
        remainders[b]
            .partial_cmp(&remainders[a])
            .unwrap()
            .then(a.cmp(&b))
    });
    for i in 0..(n - assigned) {
        sizes[order[i % 3]] += 1;
    }
    sizes
}

/// Partition a dataset into disjoint (train, val, test) sets by a seeded
/// shuffle. Deterministic per seed; the union equals the input.
pub fn split(
    dataset: &TemporalDataset,
    fractions: &SplitFractions,
    seed: u64,
) -> Result<(TemporalDataset, TemporalDataset, TemporalDataset)> {
    fractions.validate()?;
    let n = dataset.n_samples();
    let sizes = part_sizes(n, fractions);
    if sizes.contains(&0) {
        return Err(Error::data(format!(
            "split {:?} of {n} samples leaves an empty part (sizes {sizes:?})",
            (fractions.train, fractions.val, fractions.test)
        )));
    }

    let mut indices: Vec<usize> = (0..n).collect();
    indices.shuffle(&mut rng::stream(seed, "split"));

    let pick = |range: std::ops::Range<usize>| -> TemporalDataset {
        let mut chosen: Vec<usize> = indices[range].to_vec();
        // Keep the original sample order inside each part.
        chosen.sort_unstable();
        TemporalDataset {
            features: dataset.features.clone(),
            samples: chosen.iter().map(|&i| dataset.samples[i].clone()).collect(),
            normalization: dataset.normalization.clone(),
        }
    };

    let train = pick(0..sizes[0]);
    let val = pick(sizes[0]..sizes[0] + sizes[1]);
    let test = pick(sizes[0] + sizes[1]..n);
    Ok((train, val, test))
}
