//! Row-sparse linear maps between vertex sets.

use std::collections::HashMap;
use std::ops::{Add, Mul};

use num_traits::Zero;

use crate::rational::{to_f64, Rational};

/// A linear map: row `r` lists `(column, weight)` pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseRows<W> {
    pub ncols: usize,
    pub rows: Vec<Vec<(usize, W)>>,
}

impl<W> SparseRows<W>
where
    W: Clone + Zero + Add<Output = W> + Mul<Output = W>,
{
    pub fn new(ncols: usize) -> Self {
        Self { ncols, rows: Vec::new() }
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn push_row(&mut self, row: Vec<(usize, W)>) -> usize {
        self.rows.push(row);
        self.rows.len() - 1
    }

    /// `self ∘ earlier`: rows of `self` index rows of `earlier`.
    pub fn compose(&self, earlier: &SparseRows<W>) -> SparseRows<W> {
        let rows = self
            .rows
            .iter()
            .map(|row| expand_row(row, earlier))
            .collect();
        SparseRows { ncols: earlier.ncols, rows }
    }

    pub fn select_rows(&self, keep: &[usize]) -> SparseRows<W> {
        SparseRows {
            ncols: self.ncols,
            rows: keep.iter().map(|&r| self.rows[r].clone()).collect(),
        }
    }
}

/// Substitutes `earlier` into a single row, merging duplicate columns and
/// dropping exact zeros.
pub fn expand_row<W>(row: &[(usize, W)], earlier: &SparseRows<W>) -> Vec<(usize, W)>
where
    W: Clone + Zero + Add<Output = W> + Mul<Output = W>,
{
    let mut acc: HashMap<usize, W> = HashMap::new();
    for (k, w) in row {
        for (c, v) in &earlier.rows[*k] {
            let term = w.clone() * v.clone();
            acc.entry(*c)
                .and_modify(|e| *e = e.clone() + term.clone())
                .or_insert(term);
        }
    }
    let mut out: Vec<(usize, W)> = acc.into_iter().filter(|(_, w)| !w.is_zero()).collect();
    out.sort_by_key(|(c, _)| *c);
    out
}

impl SparseRows<Rational> {
    pub fn to_f64(&self) -> SparseRows<f64> {
        SparseRows {
            ncols: self.ncols,
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().map(|(c, w)| (*c, to_f64(w))).collect())
                .collect(),
        }
    }
}

impl SparseRows<f64> {
    pub fn apply<const D: usize>(&self, x: &[[f64; D]]) -> Vec<[f64; D]> {
        self.rows
            .iter()
            .map(|row| {
                let mut p = [0.0; D];
                for (c, w) in row {
                    for (pk, xk) in p.iter_mut().zip(x[*c].iter()) {
                        *pk += w * xk;
                    }
                }
                p
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn compose_merges_and_cancels() {
        let mut first = SparseRows::new(2);
        first.push_row(vec![(0, rat(1, 2)), (1, rat(1, 2))]);
        first.push_row(vec![(0, rat(1, 1))]);
        let mut second = SparseRows::new(2);
        second.push_row(vec![(0, rat(2, 1)), (1, rat(-1, 1))]);
        let c = second.compose(&first);
        assert_eq!(c.rows[0], vec![(1, rat(1, 1))]);
    }

    #[test]
    fn apply_averages() {
        let m = SparseRows { ncols: 2, rows: vec![vec![(0, 0.5), (1, 0.5)]] };
        let out = m.apply(&[[0.0, 2.0], [2.0, 0.0]]);
        assert_eq!(out, vec![[1.0, 1.0]]);
    }
}
