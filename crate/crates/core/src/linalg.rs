//! Dense symmetric positive-definite solves via Cholesky factorization.
//!
//! Small hand-rolled kernel: the systems solved here (ridge normal
//! equations, Shapley-kernel regressions, LIME surrogates) are at most a
//! few thousand unknowns and must be bit-reproducible across runs.

use crate::error::{Error, Result};

/// Solve `A x = b` for symmetric positive-definite `A` (row-major n×n).
/// `A` is consumed as scratch space.
pub(crate) fn solve_spd(a: &mut [f64], b: &[f64], n: usize) -> Result<Vec<f64>> {
    debug_assert_eq!(a.len(), n * n);
    debug_assert_eq!(b.len(), n);

    // In-place lower Cholesky: A = L Lᵀ.
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= a[j * n + k] * a[j * n + k];
        }
        if !d.is_finite() || d <= 0.0 {
            return Err(Error::numeric(format!(
                "matrix not positive definite (pivot {d:e} at column {j})"
            )));
        }
        let l_jj = d.sqrt();
        a[j * n + j] = l_jj;
        for i in (j + 1)..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= a[i * n + k] * a[j * n + k];
            }
            a[i * n + j] = s / l_jj;
        }
    }

    // Forward substitution: L y = b.
    let mut x = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            x[i] -= a[i * n + k] * x[k];
        }
        x[i] /= a[i * n + i];
    }
    // Back substitution: Lᵀ x = y.
    for i in (0..n).rev() {
        for k in (i + 1)..n {
            x[i] -= a[k * n + i] * x[k];
        }
        x[i] /= a[i * n + i];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_spd_system() {
        // A = [[4,2],[2,3]], b = [10, 9] -> x = [1.5, 2]
        let mut a = vec![4.0, 2.0, 2.0, 3.0];
        let x = solve_spd(&mut a, &[10.0, 9.0], 2).unwrap();
        assert!((x[0] - 1.5).abs() < 1e-12);
        assert!((x[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_indefinite_matrix() {
        let mut a = vec![1.0, 2.0, 2.0, 1.0];
        assert!(solve_spd(&mut a, &[1.0, 1.0], 2).is_err());
    }
}
