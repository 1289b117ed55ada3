//! Characteristic meshes: subdominant frequency-1 eigennets of `S`.

use std::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mesh::ringnet::{grid_position, topological_net, NetIndex, NetKind};
use crate::mesh::QuadMesh;
use crate::spectral::eigen::{self, CMatrix};
use crate::spectral::freq::{omega, FrequencyBlocks};
use crate::spectral::matrix::SubdivisionMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CharMethod {
    /// Normalised iteration of a frequency-1 grid mesh.
    Iteration,
    /// Top of the Jordan chain of the subdominant eigenvalue.
    GeneralizedEigenvector,
}

#[derive(Debug, Clone, Serialize)]
pub struct CharacteristicMesh {
    pub m: usize,
    pub kind: NetKind,
    /// Vertex indices, in the order of the subdivision matrix.
    pub order: Vec<NetIndex>,
    /// Planar positions; max-abs normalised, spoke 0 along the positive real
    /// axis.
    pub net: Vec<Complex64>,
    pub lambda: f64,
    /// `max |S C - lambda C| / max |C|`.
    pub residual: f64,
    pub iterations: usize,
    pub frequency: usize,
    pub method: CharMethod,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum CharOutcome {
    Converged(CharacteristicMesh),
    /// Iterates kept moving: the subdominant eigenvalue is not a simple
    /// pair, e.g. because of a Jordan block or a tie with other eigenvalues.
    NoSimplePair { iterations: usize, last_change: f64, lambda_estimate: f64 },
}

fn max_abs(x: &[Complex64]) -> f64 {
    x.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Frequency-1 grid mesh on the c.rho-net of `s`.
pub fn grid_start(s: &SubdivisionMatrix) -> Vec<Complex64> {
    let phi = 2.0 * PI / s.m as f64;
    s.order.iter().map(|k| grid_position(k, s.kind, s.m, phi)).collect()
}

/// Direction of spoke 0: the spoke vertices of a primal net, or the mid
/// points of the edges crossing it in a dual net.
fn spoke_direction(s: &SubdivisionMatrix, x: &[Complex64]) -> Complex64 {
    let mut d = Complex64::new(0.0, 0.0);
    for (p, k) in s.order.iter().enumerate() {
        if let NetIndex::Seg { l, i, j } = *k {
            let on_spoke = match s.kind {
                NetKind::Primal => l == 0 && j == 0,
                NetKind::Dual => (l == 0 && j == 1) || (l == s.m - 1 && i == 1),
            };
            if on_spoke {
                d += x[p];
            }
        }
    }
    d
}

/// Scales `x` to max-abs 1 and rotates spoke 0 onto the positive real axis.
pub fn fix_gauge(s: &SubdivisionMatrix, x: &mut [Complex64]) {
    let d = spoke_direction(s, x);
    let phase = if d.norm() > 1e-300 { d.conj() / d.norm() } else { Complex64::new(1.0, 0.0) };
    let scale = max_abs(x).max(1e-300);
    for z in x.iter_mut() {
        *z = *z * phase / scale;
    }
}

pub fn residual(s: &SubdivisionMatrix, x: &[Complex64], lambda: f64) -> f64 {
    let sx = s.apply(x);
    let r = sx.iter().zip(x).map(|(a, b)| (a - b * lambda).norm()).fold(0.0, f64::max);
    r / max_abs(x).max(1e-300)
}

/// Normalised iteration `M_{k+1} = S M_k / |S M_k|` from the frequency-1
/// grid mesh.
pub fn characteristic_mesh(s: &SubdivisionMatrix, tol: f64, max_iter: usize) -> Result<CharOutcome> {
    if s.m == 4 {
        return Err(Error::InvalidParameter("valence 4 is regular; use the regular analysis".into()));
    }
    let mut x = grid_start(s);
    project_frequency(s, &mut x, 1);
    fix_gauge(s, &mut x);
    let mut change = f64::INFINITY;
    let mut lambda = 0.0;
    for it in 1..=max_iter {
        let mut y = s.apply(&x);
        // Rounding feeds the dominant frequency-0 part; keep it out.
        project_frequency(s, &mut y, 1);
        lambda = max_abs(&y);
        if lambda == 0.0 {
            return Err(Error::Numerical("the grid mesh is annihilated by S".into()));
        }
        fix_gauge(s, &mut y);
        change = y.iter().zip(&x).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        x = y;
        if change <= tol {
            let lambda = rayleigh(s, &x);
            return Ok(CharOutcome::Converged(CharacteristicMesh {
                m: s.m,
                kind: s.kind,
                order: s.order.clone(),
                residual: residual(s, &x, lambda),
                net: x,
                lambda,
                iterations: it,
                frequency: 1,
                method: CharMethod::Iteration,
            }));
        }
    }
    Ok(CharOutcome::NoSimplePair { iterations: max_iter, last_change: change, lambda_estimate: lambda })
}

/// Replaces `x` by its frequency-`f` component.
pub fn project_frequency(s: &SubdivisionMatrix, x: &mut [Complex64], f: usize) {
    let m = s.m;
    let mut done = vec![false; x.len()];
    for p in 0..x.len() {
        if done[p] {
            continue;
        }
        let k = s.order[p];
        if k == NetIndex::Center {
            if f % m != 0 {
                x[p] = Complex64::new(0.0, 0.0);
            }
            done[p] = true;
            continue;
        }
        let orbit: Vec<usize> = (0..m).map(|l| s.position(&k.rotated(l, m)).expect("rotation-closed net")).collect();
        let c: Complex64 = orbit.iter().enumerate().map(|(l, &q)| x[q] * omega(m, l * f).conj()).sum::<Complex64>() / m as f64;
        for (l, &q) in orbit.iter().enumerate() {
            x[q] = c * omega(m, l * f);
            done[q] = true;
        }
    }
}

/// Least-squares eigenvalue of an approximate eigennet.
fn rayleigh(s: &SubdivisionMatrix, x: &[Complex64]) -> f64 {
    let sx = s.apply(x);
    let num: Complex64 = x.iter().zip(&sx).map(|(a, b)| a.conj() * b).sum();
    let den: f64 = x.iter().map(|a| a.norm_sqr()).sum();
    (num / den).re
}

#[derive(Debug, Clone, Serialize)]
pub struct JordanChain {
    pub lambda: f64,
    /// `dim ker (S_1 - lambda)` on the frequency-1 block.
    pub kernel: usize,
    /// `dim ker (S_1 - lambda)^2` on the frequency-1 block.
    pub kernel2: usize,
    /// Dimension of `(S_1 - lambda) ker (S_1 - lambda)^2`.
    pub top_rank: usize,
}

/// Characteristic mesh from the Jordan chain of `lambda` in the frequency-1
/// block: the image of the generalized eigenvectors under `S - lambda`,
/// which is the proper eigenvector dominating `S^k` on them.
pub fn chain_top(
    s: &SubdivisionMatrix,
    fb: &FrequencyBlocks,
    lambda: f64,
    rank_tol: f64,
) -> Result<(CharacteristicMesh, JordanChain)> {
    let b = fb.block(1);
    let n = b.nrows();
    let q = Complex64::new(lambda, 0.0);
    let shifted = b - CMatrix::identity(n, n) * q;
    let (kernel, kernel2) = eigen::generalized_kernel_dims(b, q, rank_tol);
    let sq = &shifted * &shifted;
    // Kernel of the square as the kernel of an auxiliary matrix with the
    // same shift convention.
    let k2 = eigen::null_space(&(sq.clone() + CMatrix::identity(n, n) * q), q, rank_tol * norm(&sq).max(1.0))?;
    let image = &shifted * &k2;
    let svd = image.clone().svd(true, false);
    let u = svd.u.ok_or_else(|| Error::Numerical("SVD failed".into()))?;
    let sv = svd.singular_values;
    let top = sv.iter().fold(0.0f64, |a, &x| a.max(x));
    let top_rank = sv.iter().filter(|&&x| x > rank_tol.sqrt() * top.max(1e-300)).count();
    let best = (0..sv.len()).max_by(|&i, &j| sv[i].total_cmp(&sv[j])).ok_or_else(|| {
        Error::Numerical(format!("no generalized eigenvectors for {lambda}"))
    })?;
    if top <= 1e-12 {
        return Err(Error::Numerical(format!("{lambda} has no Jordan chain in frequency 1")));
    }
    let y: Vec<Complex64> = DVector::from(u.column(best)).iter().copied().collect();
    let mut x = fb.expand(s, 1, &y);
    fix_gauge(s, &mut x);
    let mesh = CharacteristicMesh {
        m: s.m,
        kind: s.kind,
        order: s.order.clone(),
        residual: residual(s, &x, lambda),
        net: x,
        lambda,
        iterations: 0,
        frequency: 1,
        method: CharMethod::GeneralizedEigenvector,
    };
    Ok((mesh, JordanChain { lambda, kernel, kernel2, top_rank }))
}

fn norm(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

impl CharacteristicMesh {
    pub fn value(&self, k: &NetIndex) -> Option<Complex64> {
        self.order.iter().position(|o| o == k).map(|p| self.net[p])
    }

    /// Largest deviation from `p^{l+1} = e^{i 2 pi / m} p^l`.
    pub fn rotation_residual(&self) -> f64 {
        let w = Complex64::from_polar(1.0, 2.0 * PI / self.m as f64);
        let lookup: std::collections::HashMap<NetIndex, usize> =
            self.order.iter().enumerate().map(|(p, k)| (*k, p)).collect();
        let mut worst: f64 = 0.0;
        for (p, k) in self.order.iter().enumerate() {
            if let Some(&q) = lookup.get(&k.rotated(1, self.m)) {
                let expect = if *k == NetIndex::Center { self.net[p] } else { w * self.net[p] };
                worst = worst.max((self.net[q] - expect).norm());
            }
        }
        worst
    }

    /// Largest deviation from `p^{m-1-l}_{ji} = conj(p^l_{ij})`.
    pub fn reflection_residual(&self) -> f64 {
        let lookup: std::collections::HashMap<NetIndex, usize> =
            self.order.iter().enumerate().map(|(p, k)| (*k, p)).collect();
        let m = self.m;
        let mut worst: f64 = 0.0;
        for (p, k) in self.order.iter().enumerate() {
            let mirrored = match (*k, self.kind) {
                (NetIndex::Center, _) => NetIndex::Center,
                (NetIndex::Seg { l, i, j }, NetKind::Dual) => NetIndex::seg((2 * m - 1 - l) % m, j, i),
                (NetIndex::Seg { l, i, j }, NetKind::Primal) => {
                    // p^l_{ij} sits between spokes l and l+1; its mirror sits
                    // between spokes -l-1 and -l with the roles swapped, and
                    // p^{l'}_{j i} with j = 0 is the spoke alias.
                    if j == 0 {
                        NetIndex::seg((m - l) % m, i, 0)
                    } else {
                        NetIndex::seg((2 * m - 1 - l) % m, j, i)
                    }
                }
            };
            if let Some(&q) = lookup.get(&mirrored) {
                worst = worst.max((self.net[q] - self.net[p].conj()).norm());
            }
        }
        worst
    }
}

/// Planar quad mesh of the c.rho-net carrying the characteristic positions;
/// faces with a vertex outside the net are dropped.
pub fn to_quad_mesh(mesh: &CharacteristicMesh) -> Result<QuadMesh> {
    let depth = mesh.order.iter().map(|k| k.grid_ring(mesh.kind)).max().unwrap_or(0) + 1;
    let net = topological_net(mesh.m, depth, mesh.kind)?;
    let lookup: std::collections::HashMap<NetIndex, usize> =
        mesh.order.iter().enumerate().map(|(p, k)| (*k, p)).collect();
    let position: Vec<Option<usize>> = net.index.iter().map(|k| lookup.get(k).copied()).collect();
    let faces: Vec<Vec<usize>> = net
        .mesh
        .topology
        .faces()
        .into_iter()
        .filter(|f| f.iter().all(|&v| position[v].is_some()))
        .map(|f| f.into_iter().map(|v| position[v].expect("filtered")).collect())
        .collect();
    let points: Vec<[f64; 2]> = mesh.net.iter().map(|z| [z.re, z.im]).collect();
    QuadMesh::planar(&points, &faces)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::word::parse_word;
    use crate::spectral::freq::frequency_decompose;
    use crate::spectral::matrix::build_subdivision_matrix;

    fn converged(o: CharOutcome) -> CharacteristicMesh {
        match o {
            CharOutcome::Converged(c) => c,
            other => panic!("did not converge: {other:?}"),
        }
    }

    #[test]
    fn midpoint_valence_five_matches_block_eigenvalue() {
        let s = build_subdivision_matrix(&parse_word("AAR").unwrap(), 5, None).unwrap();
        let fb = frequency_decompose(&s).unwrap();
        let c = converged(characteristic_mesh(&s, 1e-13, 10_000).unwrap());
        let dense = eigen::dominant_dense(&fb.core_block(1), 0).unwrap();
        assert!((c.lambda - dense.value.re).abs() < 1e-8);
        assert!(c.residual < 1e-10);
        assert!(c.rotation_residual() < 1e-9);
        assert!(c.reflection_residual() < 1e-9);
    }

    #[test]
    fn dual_nets_are_symmetric_too() {
        let s = build_subdivision_matrix(&parse_word("VAV").unwrap(), 6, None).unwrap();
        let c = converged(characteristic_mesh(&s, 1e-13, 10_000).unwrap());
        assert!(c.rotation_residual() < 1e-9);
        assert!(c.reflection_residual() < 1e-9);
    }

    #[test]
    fn jordan_block_stalls_the_iteration() {
        let s = build_subdivision_matrix(&parse_word("VV").unwrap(), 3, None).unwrap();
        let o = characteristic_mesh(&s, 1e-12, 2_000).unwrap();
        assert!(matches!(o, CharOutcome::NoSimplePair { .. }));
        let fb = frequency_decompose(&s).unwrap();
        let (c, chain) = chain_top(&s, &fb, 0.25, 1e-9).unwrap();
        assert_eq!((chain.kernel, chain.kernel2, chain.top_rank), (2, 3, 1));
        assert!(c.residual < 1e-10);
        assert!(c.rotation_residual() < 1e-9);
    }

    #[test]
    fn exported_mesh_keeps_every_vertex() {
        let s = build_subdivision_matrix(&parse_word("AAR").unwrap(), 5, None).unwrap();
        let c = converged(characteristic_mesh(&s, 1e-13, 10_000).unwrap());
        let q = to_quad_mesh(&c).unwrap();
        assert_eq!(q.n_vertices(), c.net.len());
        assert!(q.n_faces() >= 5 * s.rho * s.rho / 2);
    }
}
