//! Core meshes, rings around the core and convex corners.

use std::collections::{BTreeSet, HashSet};

use super::netmap::NetMap;
use crate::error::{Error, Result};
use crate::mesh::ringnet::{rings_around, topological_net, NetIndex, NetKind, Ringnet};

#[derive(Debug, Clone, serde::Serialize)]
pub struct CoreLabeling {
    pub m: usize,
    pub kind: NetKind,
    /// Vertices of the extraordinary element.
    pub center: Vec<NetIndex>,
    pub core: Vec<NetIndex>,
    /// `rings[k]` is ring `c.(k+1)`.
    pub rings: Vec<Vec<NetIndex>>,
    /// Convex corners of ring `c.1`.
    pub corners: Vec<NetIndex>,
    /// The rest of ring `c.1`.
    pub others: Vec<NetIndex>,
    /// Number of rounds after which the dependency sets start repeating.
    pub rounds: usize,
}

impl CoreLabeling {
    /// Largest grid ring touched by the core and its first `rho` rings.
    pub fn max_grid_ring(&self, rho: usize) -> usize {
        self.core
            .iter()
            .chain(self.rings.iter().take(rho).flatten())
            .map(|k| k.grid_ring(self.kind))
            .max()
            .unwrap_or(0)
    }

    pub fn core_radius(&self) -> usize {
        self.core.iter().map(|k| k.grid_ring(self.kind)).max().unwrap_or(0)
    }
}

pub fn center_indices(m: usize, kind: NetKind) -> Vec<NetIndex> {
    match kind {
        NetKind::Primal => vec![NetIndex::Center],
        NetKind::Dual => (0..m).map(|l| NetIndex::seg(l, 1, 1)).collect(),
    }
}

/// Outcome of one dependency step that ran past the map.
pub struct OutOfRange;

/// `Dep(X)`: inputs that the outputs `X` depend on.
pub fn dependencies(map: &NetMap, set: &BTreeSet<NetIndex>) -> std::result::Result<BTreeSet<NetIndex>, OutOfRange> {
    let mut out = BTreeSet::new();
    for k in set {
        out.extend(map.support(k).ok_or(OutOfRange)?);
    }
    Ok(out)
}

/// Union of `Dep^k(N_0)` over `k >= 1`, iterated until the sequence of sets
/// repeats. Returns the core and the number of rounds.
pub fn core_set(map: &NetMap) -> std::result::Result<(BTreeSet<NetIndex>, usize), OutOfRange> {
    let mut current: BTreeSet<NetIndex> = center_indices(map.m, map.kind).into_iter().collect();
    let mut seen: Vec<BTreeSet<NetIndex>> = Vec::new();
    let mut core = BTreeSet::new();
    loop {
        current = dependencies(map, &current)?;
        if seen.contains(&current) {
            return Ok((core, seen.len()));
        }
        core.extend(current.iter().copied());
        seen.push(current.clone());
    }
}

/// Ringnet topology with enough rings around the core.
pub fn ring_net(m: usize, kind: NetKind, depth: usize) -> Result<Ringnet> {
    topological_net(m, depth, kind)
}

/// Core labeling of `map` with `rho` rings around the core.
pub fn label_core(map: &NetMap, rho: usize) -> Result<CoreLabeling> {
    let (core, rounds) = core_set(map).map_err(|_| {
        Error::Resource(format!("the core of {} at valence {} reaches past ring {}", map.word, map.m, map.radius))
    })?;
    let m = map.m;
    let kind = map.kind;
    for k in &core {
        if !core.contains(&k.rotated(1, m)) {
            return Err(Error::Structural(format!("core is not rotation invariant at {k:?}")));
        }
    }
    let core_radius = core.iter().map(|k| k.grid_ring(kind)).max().unwrap_or(0);
    let net = ring_net(m, kind, core_radius + rho.max(1) + 2)?;
    let seed: Vec<usize> = core
        .iter()
        .map(|k| net.vertex(k).ok_or_else(|| Error::Structural(format!("core index {k:?} is not in the net"))))
        .collect::<Result<_>>()?;
    let rings = rings_around(&net.mesh, &seed);
    let rings: Vec<Vec<NetIndex>> = rings
        .iter()
        .skip(1)
        .take(rho.max(1))
        .map(|r| {
            let mut v: Vec<NetIndex> = r.iter().map(|&v| net.index[v]).collect();
            v.sort();
            v
        })
        .collect();
    let (corners, others) = classify_corners(&net, &core, &rings[0])?;
    let mut center = center_indices(m, kind);
    center.sort();
    Ok(CoreLabeling { m, kind, center, core: core.into_iter().collect(), rings, corners, others, rounds })
}

/// Splits ring `c.1` into convex corners (vertices in exactly one face of
/// the band spanned by the core and ring `c.1`) and the rest.
pub fn classify_corners(
    net: &Ringnet,
    core: &BTreeSet<NetIndex>,
    ring1: &[NetIndex],
) -> Result<(Vec<NetIndex>, Vec<NetIndex>)> {
    let band: HashSet<usize> = core
        .iter()
        .chain(ring1)
        .filter_map(|k| net.vertex(k))
        .collect();
    let t = &net.mesh.topology;
    let mut count = vec![0usize; t.n_vertices()];
    for f in 0..t.n_faces() {
        let vs = t.face_vertices(f);
        if vs.iter().all(|v| band.contains(v)) {
            for &v in vs {
                count[v] += 1;
            }
        }
    }
    let mut corners = Vec::new();
    let mut others = Vec::new();
    for k in ring1 {
        let v = net.vertex(k).ok_or_else(|| Error::Structural(format!("ring index {k:?} missing")))?;
        if count[v] == 1 {
            corners.push(*k);
        } else {
            others.push(*k);
        }
    }
    if corners.len() % net.m != 0 {
        return Err(Error::Structural(format!(
            "{} convex corners for valence {}: the core is not symmetric",
            corners.len(),
            net.m
        )));
    }
    Ok((corners, others))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::word::parse_word;

    fn labeling(w: &str, m: usize) -> CoreLabeling {
        let map = NetMap::build(&parse_word(w).unwrap(), m, 6).unwrap();
        label_core(&map, 2).unwrap()
    }

    #[test]
    fn midpoint_core_is_one_ringnet() {
        let c = labeling("AAR", 5);
        assert_eq!(c.core.len(), 1 + 2 * 5);
        assert!(c.core.iter().all(|k| k.grid_ring(NetKind::Primal) <= 1));
        assert_eq!(c.corners.len(), 5);
    }

    #[test]
    fn centre_is_in_the_core() {
        for w in ["VV", "VAV", "RVVR", "AAR"] {
            let c = labeling(w, 5);
            for k in &c.center {
                assert!(c.core.contains(k), "{w}");
            }
            assert_eq!(c.corners.len() % 5, 0, "{w}");
        }
    }

    #[test]
    fn regular_core_has_four_corners() {
        let c = labeling("AAR", 4);
        assert_eq!(c.corners.len(), 4);
    }
}
