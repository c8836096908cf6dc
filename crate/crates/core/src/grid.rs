//! Row-major 2D grid of `f64`, the in-memory form of every time×feature
//! matrix (sample values, attribution heatmaps, design matrices).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    rows: usize,
    cols: usize,
    /// Row-major values, `data[r * cols + c]`.
    data: Vec<f64>,
}

impl Grid {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Grid {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::shape(format!(
                "grid {rows}x{cols} needs {} values, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Grid { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n_cols {
                return Err(Error::shape(format!(
                    "ragged grid: row {i} has {} values, expected {n_cols}",
                    row.len()
                )));
            }
            data.extend(row);
        }
        Ok(Grid {
            rows: n_rows,
            cols: n_cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        debug_assert!(r < self.rows && c < self.cols);
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        debug_assert!(r < self.rows && c < self.cols);
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> impl Iterator<Item = f64> + '_ {
        (0..self.rows).map(move |r| self.get(r, c))
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// True when deserialized dimensions and buffer length agree.
    pub fn is_consistent(&self) -> bool {
        self.data.len() == self.rows * self.cols
    }

    /// Drop the listed columns (indices into 0..cols), keeping order.
    pub fn without_columns(&self, drop: &std::collections::BTreeSet<usize>) -> Grid {
        let kept: Vec<usize> = (0..self.cols).filter(|c| !drop.contains(c)).collect();
        let mut out = Grid::zeros(self.rows, kept.len());
        for r in 0..self.rows {
            for (new_c, &old_c) in kept.iter().enumerate() {
                out.set(r, new_c, self.get(r, old_c));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn from_rows_rejects_ragged_input() {
        let err = Grid::from_rows(vec![vec![1.0, 2.0], vec![3.0]]).unwrap_err();
        assert!(err.to_string().contains("ragged"));
    }

    #[test]
    fn row_major_layout() {
        let g = Grid::from_rows(vec![vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        assert_eq!(g.data(), &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(g.get(1, 0), 3.0);
        assert_eq!(g.row(1), &[3.0, 4.0]);
        assert_eq!(g.column(1).collect::<Vec<_>>(), vec![2.0, 4.0]);
    }

    #[test]
    fn without_columns_compacts() {
        let g = Grid::from_rows(vec![vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]).unwrap();
        let dropped: BTreeSet<usize> = [1].into_iter().collect();
        let out = g.without_columns(&dropped);
        assert_eq!(out.cols(), 2);
        assert_eq!(out.data(), &[1.0, 3.0, 4.0, 6.0]);
    }
}
