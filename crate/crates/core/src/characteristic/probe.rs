//! Pushing a grid mesh with an arbitrary segment angle through a word.
//!
//! Near segment 0 the result only depends on a few neighbouring segments
//! and on vertices created at the centre, which are 0 for every symmetric
//! net of non-zero frequency. Working on a net of large valence with the
//! centre pinned to 0 therefore gives the segment-0 values for any angle.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::nabla::{nabla2_with, EdgeLabel};
use crate::error::{Error, Result};
use crate::mesh::param::Q;
use crate::mesh::ringnet::{grid_point, grid_position, topological_net, NetIndex, NetKind};
use crate::operators::net::{crop_schedule, output_indices, output_scale, trace_word};
use crate::operators::word::{parse_word, OperatorWord};

/// Placement of dual grid vertices: `Centered` puts `p_ij` at the centre of
/// the primal grid cell `(i-1, j-1)`, `Lattice` at the primal grid point
/// `(i, j)`, which drops the spokes of the primal grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridStyle {
    Centered,
    Lattice,
}

/// Valence of the auxiliary net; segments far from 0 never reach segment 0
/// within a few rounds.
const PROBE_VALENCE: usize = 21;

/// `rounds` applications of `word` to a grid mesh of `kind` with segment
/// angle `phi`; returns the segment-0 vertical differences.
pub fn grid_differences(
    word: &OperatorWord,
    kind: NetKind,
    phi: f64,
    rounds: usize,
    extent: usize,
    style: GridStyle,
) -> Result<Vec<(EdgeLabel, Complex64)>> {
    if !(phi > 0.0 && phi < PI) {
        return Err(Error::InvalidParameter(format!("segment angle must lie in (0, pi), got {phi}")));
    }
    let mut out_kind = kind;
    for _ in 0..rounds {
        out_kind = word.output_kind(out_kind);
    }
    let m = PROBE_VALENCE;
    let scale = output_scale(word, rounds)?;
    let target = Q::from_integer(extent as i64 + 2) * scale;
    let (crop, need) = crop_schedule(word, rounds, target, Q::from_integer(2));
    let depth = need.to_f64_lossy().ceil() as usize + 2;
    let net = topological_net(m, depth, kind)?;
    let labels: Vec<_> = (0..net.index.len()).map(|v| net.param(v)).collect();
    let trace = trace_word(&net.mesh.topology, &labels, m, word, rounds, Some(&crop))?;
    let z: Vec<Complex64> = net
        .index
        .iter()
        .map(|k| match (style, k) {
            (GridStyle::Lattice, NetIndex::Seg { l, i, j }) if kind == NetKind::Dual => {
                let l = if 2 * l <= m { *l as f64 } else { *l as f64 - m as f64 };
                grid_point(l, *i as f64, *j as f64, phi)
            }
            _ => grid_position(k, kind, m, phi),
        })
        .collect();
    let out = trace.apply_pinned(&z);
    let lookup: std::collections::HashMap<NetIndex, usize> = output_indices(&trace, out_kind, scale)
        .into_iter()
        .enumerate()
        .filter_map(|(v, k)| k.map(|k| (k, v)))
        .collect();
    let near = |k: &NetIndex| match k.segment() {
        Some(l) => l <= 2 || l + 2 >= m,
        None => true,
    };
    Ok(nabla2_with(out_kind, m, extent, |k| if near(k) { lookup.get(k).map(|&v| out[v]) } else { None }))
}

trait ToF64 {
    fn to_f64_lossy(&self) -> f64;
}

impl ToF64 for Q {
    fn to_f64_lossy(&self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }
}

/// Edge of `(VRVR)^2 M` with the largest direction angle, `M` a dual grid
/// mesh with segment angle `phi`. Any edge leaving the pointed spoke cone
/// through its upper side shows up here first.
pub fn vrvr_probe(phi: f64) -> Result<(EdgeLabel, f64)> {
    if !(phi > 0.0 && phi < PI / 2.0) {
        return Err(Error::InvalidParameter(format!("segment angle must lie in (0, pi/2), got {phi}")));
    }
    let word = parse_word("VRVR")?;
    let edges = grid_differences(&word, NetKind::Dual, phi, 2, 4, GridStyle::Centered)?;
    edges
        .iter()
        .filter(|(_, e)| e.norm() > 1e-12)
        .map(|(l, e)| (*l, e.im.atan2(e.re)))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or_else(|| Error::Structural("no edges in the subdivided net".into()))
}

/// `pi - arctan(16 tan phi)`.
pub fn vrvr_closed_form(phi: f64) -> f64 {
    PI - (16.0 * phi.tan()).atan()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characteristic::cone::{cone_contains, Cone};
    use crate::characteristic::nabla::nabla2;
    use crate::mesh::ringnet::build_grid_mesh;
    use crate::operators::net::apply_word_net;

    #[test]
    fn probe_agrees_with_a_real_net() {
        // Segment angle 2 pi / 5 is realised by an actual valence-5 net.
        let word = parse_word("VRVR").unwrap();
        let m = 5;
        let phi = 2.0 * PI / m as f64;
        let net = build_grid_mesh(m, 1, 5, NetKind::Dual).unwrap();
        let out = apply_word_net(&net, &word, 2, None).unwrap();
        let full: std::collections::HashMap<_, _> = nabla2(&out).unwrap().into_iter().collect();
        let probe = grid_differences(&word, NetKind::Dual, phi, 2, 3, GridStyle::Centered).unwrap();
        assert!(!probe.is_empty());
        for (l, e) in probe {
            let f = full[&l];
            assert!((f - e).norm() < 1e-12, "{l:?}: {f} vs {e}");
        }
    }

    #[test]
    fn grid_stays_in_cone_for_vav() {
        for phi in [0.4, 1.0, 1.4] {
            let edges = grid_differences(&parse_word("VAV").unwrap(), NetKind::Dual, phi, 2, 4, GridStyle::Centered).unwrap();
            let check = cone_contains(&Cone::new(phi, PI / 2.0, true), &edges, 1e-12);
            assert!(check.contained, "{phi}: {:?}", check.violations);
        }
    }

    #[test]
    fn closed_form_at_quarter_turn() {
        assert!((vrvr_closed_form(PI / 4.0) - (PI - 16f64.atan())).abs() < 1e-15);
    }
}
