//! Convergence of the extraordinary element: stochasticity, a positive
//! column of a power of `S`, and a simple dominant eigenvalue 1.

use fixedbitset::FixedBitSet;
use num_complex::Complex64;
use serde::Serialize;

use super::eigen::{algebraic_multiplicity, eigenvalues, to_complex};
use super::matrix::SubdivisionMatrix;
use crate::error::Result;

#[derive(Debug, Clone, Serialize)]
pub struct C0Check {
    pub stochastic: bool,
    pub max_row_sum_error: f64,
    /// Smallest `l` with a strictly positive column in `S^l`.
    pub positive_column_power: Option<usize>,
    pub positive_column: Option<usize>,
    pub eigenvalue_one_multiplicity: usize,
    /// Largest magnitude among the other eigenvalues.
    pub second_magnitude: f64,
    pub certified: bool,
}

/// Smallest `l <= max_power` such that some column of `S^l` is positive.
///
/// Column `j` of `S^l` is positive iff every vertex reaches `j` in `l`
/// steps of the sparsity graph, so only reachability sets are tracked.
pub fn positive_column(rows: &[Vec<(usize, impl Sized)>], max_power: usize) -> Option<(usize, usize)> {
    let n = rows.len();
    // reach[i] = columns reachable from row i in exactly l steps.
    let mut reach: Vec<FixedBitSet> = (0..n)
        .map(|i| {
            let mut b = FixedBitSet::with_capacity(n);
            b.insert(i);
            b
        })
        .collect();
    for l in 1..=max_power {
        let next: Vec<FixedBitSet> = rows
            .iter()
            .map(|row| {
                let mut b = FixedBitSet::with_capacity(n);
                for (c, _) in row {
                    b.union_with(&reach[*c]);
                }
                b
            })
            .collect();
        reach = next;
        let mut common = reach[0].clone();
        for r in &reach[1..] {
            common.intersect_with(r);
        }
        if let Some(j) = common.ones().next() {
            return Some((l, j));
        }
    }
    None
}

pub fn check_c0(s: &SubdivisionMatrix, max_power: usize, cluster_tol: f64) -> Result<C0Check> {
    let structure = s.check_structure();
    let positive = positive_column(&s.rows, max_power);
    let eig = eigenvalues(&to_complex(&s.dense()))?;
    let one = Complex64::new(1.0, 0.0);
    let mult = algebraic_multiplicity(&eig, one, cluster_tol);
    let second = eig.iter().filter(|z| (**z - one).norm() > cluster_tol).map(|z| z.norm()).fold(0.0, f64::max);
    let certified = structure.stochastic && positive.is_some() && mult == 1 && second < 1.0 - cluster_tol;
    Ok(C0Check {
        stochastic: structure.stochastic,
        max_row_sum_error: structure.max_row_sum_error,
        positive_column_power: positive.map(|p| p.0),
        positive_column: positive.map(|p| p.1),
        eigenvalue_one_multiplicity: mult,
        second_magnitude: second,
        certified,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use super::super::matrix::build_subdivision_matrix;
    use crate::operators::word::parse_word;
    use crate::rational::rat;

    #[test]
    fn midpoint_is_c0() {
        let s = build_subdivision_matrix(&parse_word("AAR").unwrap(), 5, None).unwrap();
        let c = check_c0(&s, 40, 1e-6).unwrap();
        assert!(c.certified);
        assert_eq!(c.eigenvalue_one_multiplicity, 1);
    }

    #[test]
    fn identity_has_no_positive_column() {
        let s = build_subdivision_matrix(&parse_word("AAR").unwrap(), 5, None).unwrap();
        let id = s.with_rows((0..s.n()).map(|i| vec![(i, rat(1, 1))]).collect());
        let c = check_c0(&id, 40, 1e-6).unwrap();
        assert!(c.positive_column_power.is_none());
        assert!(!c.certified);
    }

    #[test]
    fn reachability_matches_dense_powers() {
        let rows = vec![vec![(1, ())], vec![(2, ())], vec![(0, ()), (2, ())]];
        // S: 0->1, 1->2, 2->{0,2}; S^3 has column 2 positive.
        assert_eq!(positive_column(&rows, 10), Some((2, 2)));
    }
}
