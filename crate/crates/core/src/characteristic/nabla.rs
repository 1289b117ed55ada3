//! Vertical differences `p^0_{ij} - p^0_{i,j-1}` of segment 0.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mesh::ringnet::{NetIndex, NetKind, Ringnet};
use crate::spectral::matrix::SubdivisionMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct EdgeLabel {
    pub i: usize,
    pub j: usize,
}

/// Index of `p^l_{ij}` including the aliases on the spokes: for primal nets
/// `p^l_{0j} = p^{l+1}_{j0}` and `p^l_{00}` is the centre; for dual nets
/// `p^l_{i0} = p^{l-1}_{1i}` and `p^l_{0j} = p^{l+1}_{j1}`.
pub fn extended_index(kind: NetKind, m: usize, l: usize, i: usize, j: usize) -> Option<NetIndex> {
    match kind {
        NetKind::Primal => match (i, j) {
            (0, 0) => Some(NetIndex::Center),
            (0, j) => Some(NetIndex::seg((l + 1) % m, j, 0)),
            _ => Some(NetIndex::seg(l % m, i, j)),
        },
        NetKind::Dual => match (i, j) {
            (0, 0) => None,
            (i, 0) => Some(NetIndex::seg((l + m - 1) % m, 1, i)),
            (0, j) => Some(NetIndex::seg((l + 1) % m, j, 1)),
            _ => Some(NetIndex::seg(l % m, i, j)),
        },
    }
}

/// All `nabla_2 p^0_{ij}` (`j >= 1`, `i >= 0` for primal and `i >= 1` for
/// dual nets) whose two endpoints are known to `value`.
pub fn nabla2_with(
    kind: NetKind,
    m: usize,
    extent: usize,
    value: impl Fn(&NetIndex) -> Option<Complex64>,
) -> Vec<(EdgeLabel, Complex64)> {
    let i0 = usize::from(kind == NetKind::Dual);
    let mut out = Vec::new();
    for j in 1..=extent {
        for i in i0..=extent {
            let top = extended_index(kind, m, 0, i, j).and_then(|k| value(&k));
            let bottom = extended_index(kind, m, 0, i, j - 1).and_then(|k| value(&k));
            if let (Some(a), Some(b)) = (top, bottom) {
                out.push((EdgeLabel { i, j }, a - b));
            }
        }
    }
    out
}

/// Vertical differences of a planar ringnet.
pub fn nabla2(net: &Ringnet) -> Result<Vec<(EdgeLabel, Complex64)>> {
    if net.mesh.dim != 2 {
        return Err(Error::InvalidParameter("vertical differences need a planar ringnet".into()));
    }
    let z = net.positions_complex();
    let extent = net.index.iter().filter_map(|k| k.local()).map(|(i, j)| i.max(j)).max().unwrap_or(0);
    Ok(nabla2_with(net.kind, net.m, extent, |k| net.vertex(k).map(|v| z[v])))
}

/// Vertical differences of values on the c.rho-net of `s`.
pub fn nabla2_matrix(s: &SubdivisionMatrix, x: &[Complex64]) -> Vec<(EdgeLabel, Complex64)> {
    let extent = s.order.iter().filter_map(|k| k.local()).map(|(i, j)| i.max(j)).max().unwrap_or(0);
    nabla2_with(s.kind, s.m, extent, |k| s.position(k).map(|p| x[p]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characteristic::cone::{cone_contains, Cone};
    use crate::mesh::ringnet::build_grid_mesh;

    #[test]
    fn grid_mesh_edges_lie_in_the_pointed_cone() {
        for kind in [NetKind::Primal, NetKind::Dual] {
            for m in [3, 5, 6, 7, 9] {
                let net = build_grid_mesh(m, 1, 4, kind).unwrap();
                let e = nabla2(&net).unwrap();
                assert!(!e.is_empty());
                assert!(cone_contains(&Cone::spokes(m, true), &e, 1e-12).contained, "{kind} {m}");
            }
        }
    }

    #[test]
    fn constant_net_has_zero_edges() {
        let mut net = build_grid_mesh(5, 1, 3, NetKind::Primal).unwrap();
        let n = net.index.len();
        net.set_positions_complex(&vec![Complex64::new(2.0, -1.0); n]);
        assert!(nabla2(&net).unwrap().iter().all(|(_, z)| z.norm() == 0.0));
    }

    #[test]
    fn dual_lookup_reaches_into_the_previous_segment() {
        // c_11 - c^{m-1}_11 for a frequency-1 dual net.
        let net = build_grid_mesh(3, 1, 2, NetKind::Dual).unwrap();
        let z = net.positions_complex();
        let e = nabla2(&net).unwrap();
        let (_, first) = e.iter().find(|(l, _)| l.i == 1 && l.j == 1).unwrap();
        let a = z[net.vertex(&NetIndex::seg(0, 1, 1)).unwrap()];
        let b = z[net.vertex(&NetIndex::seg(2, 1, 1)).unwrap()];
        assert!((first - (a - b)).norm() < 1e-15);
    }
}
