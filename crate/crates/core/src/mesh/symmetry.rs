//! Rotation and reflection symmetry predicates for planar ringnets.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::param::Q;
use super::ringnet::{NetIndex, Ringnet};
use crate::error::{Error, Result};

pub const SYMMETRY_TOL: f64 = 1e-9;

fn planar(net: &Ringnet) -> Result<Vec<Complex64>> {
    if net.mesh.dim != 2 {
        return Err(Error::InvalidParameter("symmetry predicates need planar positions".into()));
    }
    Ok(net.positions_complex())
}

fn tolerance(net: &Ringnet) -> f64 {
    SYMMETRY_TOL * net.mesh.diameter().max(1e-300)
}

/// Largest deviation from `p^{l+1}_{ij} = e^{i 2 pi f / m} p^l_{ij}`.
pub fn rotation_residual(net: &Ringnet, f: usize) -> Result<f64> {
    let z = planar(net)?;
    let rot = Complex64::from_polar(1.0, 2.0 * PI * f as f64 / net.m as f64);
    let mut worst: f64 = 0.0;
    for (v, k) in net.index.iter().enumerate() {
        let image = match k {
            NetIndex::Center => Some(v),
            _ => net.vertex(&k.rotated(1, net.m)),
        };
        if let Some(w) = image {
            worst = worst.max((z[w] - rot * z[v]).norm());
        }
    }
    Ok(worst)
}

pub fn is_rotation_symmetric(net: &Ringnet, f: usize) -> Result<bool> {
    Ok(rotation_residual(net, f)? <= tolerance(net))
}

/// Largest deviation from `p^{m-1-l}_{ji} = conj(p^l_{ij})`.
pub fn reflection_residual(net: &Ringnet) -> Result<f64> {
    let z = planar(net)?;
    let mut worst: f64 = 0.0;
    for (v, k) in net.index.iter().enumerate() {
        let mirrored = k.param(net.kind).reflected(net.m);
        if let Some(w) = NetIndex::from_param(&mirrored, net.kind, Q::from_integer(1)).and_then(|k| net.vertex(&k)) {
            worst = worst.max((z[w] - z[v].conj()).norm());
        }
    }
    Ok(worst)
}

pub fn is_reflection_symmetric(net: &Ringnet) -> Result<bool> {
    Ok(reflection_residual(net)? <= tolerance(net))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::ringnet::{build_grid_mesh, NetKind};

    #[test]
    fn grid_meshes_are_symmetric() {
        for kind in [NetKind::Primal, NetKind::Dual] {
            for m in [3, 5, 6, 8] {
                for f in 1..m {
                    let net = build_grid_mesh(m, f, 3, kind).unwrap();
                    assert!(is_rotation_symmetric(&net, f).unwrap(), "{kind} m={m} f={f}");
                    assert!(is_reflection_symmetric(&net).unwrap(), "{kind} m={m} f={f}");
                }
            }
        }
    }

    #[test]
    fn perturbation_breaks_symmetry() {
        let mut net = build_grid_mesh(5, 1, 3, NetKind::Primal).unwrap();
        let v = net.vertex(&NetIndex::seg(0, 1, 1)).unwrap();
        net.mesh.positions[v][0] += 1.0;
        assert!(!is_rotation_symmetric(&net, 1).unwrap());
        assert!(!is_reflection_symmetric(&net).unwrap());
    }

    #[test]
    fn three_dimensional_nets_are_rejected() {
        let mut net = build_grid_mesh(5, 1, 2, NetKind::Primal).unwrap();
        net.mesh.dim = 3;
        assert!(is_rotation_symmetric(&net, 1).is_err());
    }
}
