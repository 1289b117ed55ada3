//! Eigenvalues of small dense blocks.
//!
//! Subdivision matrices are block triangular after a permutation, so the
//! spectrum is the union of the spectra of the strongly connected
//! components of the sparsity graph. Nilpotent parts then give exact zeros
//! and repeated eigenvalues from different components are not smeared by a
//! joint Schur decomposition.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

pub fn to_complex(a: &DMatrix<f64>) -> CMatrix {
    a.map(|x| Complex64::new(x, 0.0))
}

/// Index sets of the strongly connected components of the nonzero pattern.
pub fn components(a: &CMatrix) -> Vec<Vec<usize>> {
    let n = a.nrows();
    let mut g = DiGraph::<(), ()>::with_capacity(n, n * 4);
    let nodes: Vec<_> = (0..n).map(|_| g.add_node(())).collect();
    for i in 0..n {
        for j in 0..n {
            if a[(i, j)] != Complex64::new(0.0, 0.0) {
                g.add_edge(nodes[i], nodes[j], ());
            }
        }
    }
    tarjan_scc(&g)
        .into_iter()
        .map(|c| {
            let mut v: Vec<usize> = c.into_iter().map(|n| n.index()).collect();
            v.sort_unstable();
            v
        })
        .collect()
}

fn submatrix(a: &CMatrix, idx: &[usize]) -> CMatrix {
    CMatrix::from_fn(idx.len(), idx.len(), |i, j| a[(idx[i], idx[j])])
}

fn schur_eigenvalues(a: CMatrix) -> Result<Vec<Complex64>> {
    let n = a.nrows();
    let schur = nalgebra::linalg::Schur::try_new(a, 1e-15, 100_000)
        .ok_or_else(|| Error::Numerical(format!("Schur iteration did not converge on a {n}x{n} block")))?;
    let (_, t) = schur.unpack();
    Ok((0..n).map(|i| t[(i, i)]).collect())
}

/// All eigenvalues, unordered.
pub fn eigenvalues(a: &CMatrix) -> Result<Vec<Complex64>> {
    let mut out = Vec::with_capacity(a.nrows());
    for c in components(a) {
        if c.len() == 1 {
            out.push(a[(c[0], c[0])]);
        } else {
            out.extend(schur_eigenvalues(submatrix(a, &c))?);
        }
    }
    Ok(out)
}

pub fn eigenvalues_real(a: &DMatrix<f64>) -> Result<Vec<Complex64>> {
    eigenvalues(&to_complex(a))
}

pub fn spectral_radius(a: &CMatrix) -> Result<f64> {
    if a.nrows() == 0 {
        return Ok(0.0);
    }
    Ok(eigenvalues(a)?.iter().map(|z| z.norm()).fold(0.0, f64::max))
}

/// Eigenvalues sorted by decreasing magnitude, ties by argument.
pub fn sorted_by_magnitude(mut v: Vec<Complex64>) -> Vec<Complex64> {
    v.sort_by(|a, b| b.norm().total_cmp(&a.norm()).then(a.arg().total_cmp(&b.arg())));
    v
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    PowerIteration,
    Dense,
}

#[derive(Debug, Clone)]
pub struct Dominant {
    pub value: Complex64,
    pub vector: DVector<Complex64>,
    pub iterations: usize,
    pub residual: f64,
    pub method: Method,
}

fn max_abs(v: &DVector<Complex64>) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Dominant eigenpair by power iteration with max-abs normalisation; falls
/// back to a dense solve when the iteration does not settle within
/// `max_iter` steps.
pub fn dominant(a: &CMatrix, start: Option<&DVector<Complex64>>, tol: f64, max_iter: usize) -> Result<Dominant> {
    let n = a.nrows();
    if n == 0 {
        return Err(Error::Numerical("empty matrix".into()));
    }
    let mut x = match start {
        Some(s) if max_abs(s) > 0.0 => s.clone(),
        _ => DVector::from_fn(n, |i, _| Complex64::new(1.0 + (i as f64 * 0.7548776662).fract(), (i as f64 * 0.5698402910).fract())),
    };
    let scale = a.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
    x /= Complex64::new(max_abs(&x), 0.0);
    for it in 1..=max_iter {
        let y = a * &x;
        let lambda = x.dotc(&y) / x.dotc(&x);
        let residual = max_abs(&(&y - &x * lambda));
        if residual <= tol * scale * max_abs(&x) {
            return Ok(Dominant { value: lambda, vector: x, iterations: it, residual, method: Method::PowerIteration });
        }
        let norm = max_abs(&y);
        if norm == 0.0 {
            return Ok(Dominant { value: Complex64::new(0.0, 0.0), vector: x, iterations: it, residual: 0.0, method: Method::PowerIteration });
        }
        // Keep the phase of the largest entry fixed so complex iterates settle.
        let k = (0..n).max_by(|&i, &j| y[i].norm().total_cmp(&y[j].norm())).unwrap_or(0);
        let phase = y[k] / y[k].norm();
        x = y / (phase * norm);
    }
    dominant_dense(a, max_iter)
}

pub fn dominant_dense(a: &CMatrix, iterations: usize) -> Result<Dominant> {
    let eig = sorted_by_magnitude(eigenvalues(a)?);
    let value = eig[0];
    let vector = null_vector(a, value)?;
    let residual = max_abs(&(a * &vector - &vector * value));
    Ok(Dominant { value, vector, iterations, residual, method: Method::Dense })
}

/// Right singular vector of the smallest singular value of `a - lambda I`.
pub fn null_vector(a: &CMatrix, lambda: Complex64) -> Result<DVector<Complex64>> {
    let basis = null_space(a, lambda, f64::INFINITY)?;
    Ok(basis.column(0).into_owned())
}

/// Orthonormal basis of the numerical kernel of `a - lambda I`, columns
/// ordered by increasing singular value. With an infinite tolerance only the
/// best vector is returned.
pub fn null_space(a: &CMatrix, lambda: Complex64, tol: f64) -> Result<CMatrix> {
    let n = a.nrows();
    let shifted = a - CMatrix::identity(n, n) * lambda;
    // SVD of the adjoint: right singular vectors of `shifted` are the left
    // ones of its adjoint, which nalgebra returns as `u`.
    let svd = shifted.adjoint().svd(true, false);
    let u = svd.u.ok_or_else(|| Error::Numerical("SVD failed".into()))?;
    let s = svd.singular_values;
    let mut idx: Vec<usize> = (0..s.len()).collect();
    idx.sort_by(|&i, &j| s[i].total_cmp(&s[j]));
    let keep: Vec<usize> = if tol.is_infinite() {
        vec![idx[0]]
    } else {
        idx.into_iter().filter(|&i| s[i] <= tol).collect()
    };
    Ok(CMatrix::from_fn(n, keep.len(), |r, c| u[(r, keep[c])]))
}

/// Dimension of the kernel of `a - lambda I` with singular-value cut-off
/// `tol`.
pub fn nullity(a: &CMatrix, lambda: Complex64, tol: f64) -> usize {
    let n = a.nrows();
    let shifted = a - CMatrix::identity(n, n) * lambda;
    shifted.singular_values().iter().filter(|&&s| s <= tol).count()
}

/// `(dim ker (A - lambda I), dim ker (A - lambda I)^2)` with rank
/// tolerance `rel_tol * ||A||`.
pub fn generalized_kernel_dims(a: &CMatrix, lambda: Complex64, rel_tol: f64) -> (usize, usize) {
    let n = a.nrows();
    let norm = a.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
    let shifted = a - CMatrix::identity(n, n) * lambda;
    let sq = &shifted * &shifted;
    let tol = rel_tol * norm;
    let k1 = shifted.singular_values().iter().filter(|&&s| s <= tol).count();
    let k2 = sq.singular_values().iter().filter(|&&s| s <= tol * norm).count();
    (k1, k2)
}

/// Number of eigenvalues within `tol` of `lambda`.
pub fn algebraic_multiplicity(eig: &[Complex64], lambda: Complex64, tol: f64) -> usize {
    eig.iter().filter(|z| (**z - lambda).norm() <= tol).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn triangular_blocks_give_exact_values() {
        let a = DMatrix::from_row_slice(3, 3, &[0.5, 0.0, 0.0, 0.25, 0.0, 0.0, 0.1, 0.3, 0.25]);
        let mut e: Vec<f64> = eigenvalues_real(&a).unwrap().iter().map(|z| z.re).collect();
        e.sort_by(f64::total_cmp);
        assert_eq!(e, vec![0.0, 0.25, 0.5]);
    }

    #[test]
    fn rotation_block_has_complex_pair() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        let e = eigenvalues_real(&a).unwrap();
        assert!(e.iter().all(|z| (z.norm() - 1.0).abs() < 1e-12));
        assert!(e.iter().any(|z| (z.im - 1.0).abs() < 1e-12));
    }

    #[test]
    fn power_iteration_matches_dense() {
        let a = DMatrix::from_fn(6, 6, |i, j| 1.0 / (1.0 + i as f64 + 2.0 * j as f64));
        let a = to_complex(&a);
        let p = dominant(&a, None, 1e-12, 100_000).unwrap();
        let d = dominant_dense(&a, 0).unwrap();
        assert_eq!(p.method, Method::PowerIteration);
        assert!((p.value - d.value).norm() < 1e-10);
    }

    #[test]
    fn jordan_block_kernel_dims() {
        let a = to_complex(&DMatrix::from_row_slice(3, 3, &[0.25, 1.0, 0.0, 0.0, 0.25, 0.0, 0.0, 0.0, 0.5]));
        assert_eq!(generalized_kernel_dims(&a, c(0.25), 1e-9), (1, 2));
        let d = to_complex(&DMatrix::from_diagonal(&DVector::from_vec(vec![0.25, 0.25, 0.5])));
        assert_eq!(generalized_kernel_dims(&d, c(0.25), 1e-9), (2, 2));
        assert_eq!(nullity(&d, c(0.5), 1e-9), 1);
    }
}
