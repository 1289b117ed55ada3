//! Ringnets: meshes around a single extraordinary vertex or face, indexed by
//! segment `l` and in-segment coordinates `(i, j)`.

use std::collections::{HashMap, HashSet};
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::param::{q, Param, Q};
use super::QuadMesh;
use crate::error::{Error, Result};

/// Kind of the extraordinary element at the centre of a ringnet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NetKind {
    /// Extraordinary vertex `p_00`.
    Primal,
    /// Extraordinary face spanned by the `p^l_11`.
    Dual,
}

impl NetKind {
    pub fn flipped(self) -> NetKind {
        match self {
            NetKind::Primal => NetKind::Dual,
            NetKind::Dual => NetKind::Primal,
        }
    }
}

impl std::fmt::Display for NetKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            NetKind::Primal => "primal",
            NetKind::Dual => "dual",
        })
    }
}

/// Vertex index `p^l_{ij}`. Primal segments hold `i >= 1, j >= 0`
/// (`p^l_{0j}` is `p^{l+1}_{j0}`); dual segments hold `i, j >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum NetIndex {
    Center,
    Seg { l: usize, i: usize, j: usize },
}

impl NetIndex {
    pub fn seg(l: usize, i: usize, j: usize) -> Self {
        NetIndex::Seg { l, i, j }
    }

    pub fn rotated(&self, k: usize, m: usize) -> NetIndex {
        match *self {
            NetIndex::Center => NetIndex::Center,
            NetIndex::Seg { l, i, j } => NetIndex::Seg { l: (l + k) % m, i, j },
        }
    }

    /// Segment-free part, used to group rotation orbits.
    pub fn local(&self) -> Option<(usize, usize)> {
        match *self {
            NetIndex::Center => None,
            NetIndex::Seg { i, j, .. } => Some((i, j)),
        }
    }

    pub fn segment(&self) -> Option<usize> {
        match *self {
            NetIndex::Center => None,
            NetIndex::Seg { l, .. } => Some(l),
        }
    }

    /// Parameter label of this index in a net of the given kind.
    pub fn param(&self, kind: NetKind) -> Param {
        match (*self, kind) {
            (NetIndex::Center, _) => Param::Center,
            (NetIndex::Seg { l, i, j }, NetKind::Primal) => {
                Param::Seg { seg: l, x: Q::from_integer(i as i64), y: Q::from_integer(j as i64) }
            }
            (NetIndex::Seg { l, i, j }, NetKind::Dual) => Param::Seg {
                seg: l,
                x: Q::from_integer(i as i64) - q(1, 2),
                y: Q::from_integer(j as i64) - q(1, 2),
            },
        }
    }

    /// Inverse of [`NetIndex::param`] on a lattice scaled by `scale`.
    pub fn from_param(p: &Param, kind: NetKind, scale: Q) -> Option<NetIndex> {
        match (*p, kind) {
            (Param::Center, NetKind::Primal) => Some(NetIndex::Center),
            (Param::Center, NetKind::Dual) => None,
            (Param::Seg { seg, x, y }, _) => {
                let (mut x, mut y) = (x / scale, y / scale);
                if kind == NetKind::Dual {
                    x += q(1, 2);
                    y += q(1, 2);
                }
                if !x.is_integer() || !y.is_integer() {
                    return None;
                }
                let (i, j) = (x.to_integer(), y.to_integer());
                let ok = match kind {
                    NetKind::Primal => i >= 1 && j >= 0,
                    NetKind::Dual => i >= 1 && j >= 1,
                };
                ok.then_some(NetIndex::Seg { l: seg, i: i as usize, j: j as usize })
            }
        }
    }

    /// Ring around the centre in a grid mesh (max-norm distance).
    pub fn grid_ring(&self, kind: NetKind) -> usize {
        match (*self, kind) {
            (NetIndex::Center, _) => 0,
            (NetIndex::Seg { i, j, .. }, NetKind::Primal) => i.max(j),
            (NetIndex::Seg { i, j, .. }, NetKind::Dual) => i.max(j) - 1,
        }
    }
}

/// Which element rings are counted from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RingBasis {
    Center,
    Core,
}

#[derive(Debug, Clone)]
pub struct Ringnet {
    pub mesh: QuadMesh,
    pub m: usize,
    pub kind: NetKind,
    pub depth: usize,
    pub frequency: Option<usize>,
    pub index: Vec<NetIndex>,
    lookup: HashMap<NetIndex, usize>,
    core: Option<Vec<usize>>,
}

impl Ringnet {
    /// Wraps a mesh whose vertices are already indexed.
    pub fn from_parts(
        mesh: QuadMesh,
        m: usize,
        kind: NetKind,
        depth: usize,
        frequency: Option<usize>,
        index: Vec<NetIndex>,
    ) -> Self {
        let lookup = index.iter().enumerate().map(|(v, &k)| (k, v)).collect();
        Self { mesh, m, kind, depth, frequency, index, lookup, core: None }
    }

    pub fn vertex(&self, k: &NetIndex) -> Option<usize> {
        self.lookup.get(k).copied()
    }

    /// Vertex at `p^l_{ij}` including the spoke aliases `p^l_{0j} = p^{l+1}_{j0}`
    /// (primal) and the mirrored row `p^l_{i0} = p^{l-1}_{1i}` (dual) used by
    /// vertical differences that reach across spoke `l`.
    pub fn vertex_extended(&self, l: usize, i: usize, j: usize) -> Option<usize> {
        let m = self.m;
        match self.kind {
            NetKind::Primal => {
                if i == 0 && j == 0 {
                    self.vertex(&NetIndex::Center)
                } else if i == 0 {
                    self.vertex(&NetIndex::seg((l + 1) % m, j, 0))
                } else {
                    self.vertex(&NetIndex::seg(l % m, i, j))
                }
            }
            NetKind::Dual => {
                if i == 0 || j == 0 {
                    if i == 0 && j == 0 {
                        return None;
                    }
                    if j == 0 {
                        self.vertex(&NetIndex::seg((l + m - 1) % m, 1, i))
                    } else {
                        self.vertex(&NetIndex::seg((l + 1) % m, j, 1))
                    }
                } else {
                    self.vertex(&NetIndex::seg(l % m, i, j))
                }
            }
        }
    }

    pub fn param(&self, v: usize) -> Param {
        self.index[v].param(self.kind)
    }

    /// Vertices of the extraordinary element.
    pub fn center_vertices(&self) -> Vec<usize> {
        match self.kind {
            NetKind::Primal => self.vertex(&NetIndex::Center).into_iter().collect(),
            NetKind::Dual => (0..self.m).filter_map(|l| self.vertex(&NetIndex::seg(l, 1, 1))).collect(),
        }
    }

    pub fn set_core(&mut self, core: Vec<usize>) {
        self.core = Some(core);
    }

    pub fn core(&self) -> Option<&[usize]> {
        self.core.as_deref()
    }

    /// Rings `N_0, N_1, ...` (centre basis) or `N_c, N_c.1, ...` (core basis)
    /// by face adjacency; the sets partition the vertices.
    pub fn rings(&self, basis: RingBasis) -> Result<Vec<Vec<usize>>> {
        let seed = match basis {
            RingBasis::Center => self.center_vertices(),
            RingBasis::Core => self
                .core
                .clone()
                .ok_or_else(|| Error::State("core rings requested before the core was computed".into()))?,
        };
        Ok(rings_around(&self.mesh, &seed))
    }

    pub fn positions_complex(&self) -> Vec<Complex64> {
        self.mesh.positions.iter().map(|p| Complex64::new(p[0], p[1])).collect()
    }

    pub fn set_positions_complex(&mut self, z: &[Complex64]) {
        for (p, c) in self.mesh.positions.iter_mut().zip(z) {
            *p = [c.re, c.im, 0.0];
        }
        self.mesh.dim = 2;
    }

    /// JSON-friendly dump of the indexing for debugging.
    pub fn index_dump(&self) -> Vec<IndexRecord> {
        let ring = self.rings(RingBasis::Center).unwrap_or_default();
        let mut ring_of = vec![usize::MAX; self.index.len()];
        for (k, r) in ring.iter().enumerate() {
            for &v in r {
                ring_of[v] = k;
            }
        }
        self.index
            .iter()
            .enumerate()
            .map(|(v, k)| {
                let (l, i, j) = match *k {
                    NetIndex::Center => (None, 0, 0),
                    NetIndex::Seg { l, i, j } => (Some(l), i, j),
                };
                IndexRecord { vertex: v, l, i, j, ring: ring_of[v] }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IndexRecord {
    pub vertex: usize,
    pub l: Option<usize>,
    pub i: usize,
    pub j: usize,
    pub ring: usize,
}

/// Breadth-first face-adjacency rings around `seed`. Ring 0 is the seed.
pub fn rings_around(mesh: &QuadMesh, seed: &[usize]) -> Vec<Vec<usize>> {
    let t = &mesh.topology;
    let incident = t.vertex_faces();
    let mut seen = vec![false; t.n_vertices()];
    let mut current: Vec<usize> = seed.to_vec();
    current.sort_unstable();
    current.dedup();
    for &v in &current {
        seen[v] = true;
    }
    let mut rings = Vec::new();
    while !current.is_empty() {
        let mut next = HashSet::new();
        for &v in &current {
            for w in t.face_neighbors(&incident, v) {
                if !seen[w] {
                    next.insert(w);
                }
            }
        }
        let mut next: Vec<usize> = next.into_iter().collect();
        next.sort_unstable();
        for &w in &next {
            seen[w] = true;
        }
        rings.push(std::mem::replace(&mut current, next));
    }
    rings
}

/// Face lists and vertex indices of a grid ringnet of the given depth.
pub fn grid_topology(m: usize, depth: usize, kind: NetKind) -> (Vec<NetIndex>, Vec<Vec<usize>>) {
    let mut index = Vec::new();
    let mut id: HashMap<NetIndex, usize> = HashMap::new();
    let mut add = |k: NetIndex, index: &mut Vec<NetIndex>| {
        id.insert(k, index.len());
        index.push(k);
    };
    let mut faces = Vec::new();
    match kind {
        NetKind::Primal => {
            add(NetIndex::Center, &mut index);
            for l in 0..m {
                for j in 0..=depth {
                    for i in 1..=depth {
                        add(NetIndex::seg(l, i, j), &mut index);
                    }
                }
            }
            let at = |l: usize, i: usize, j: usize| -> usize {
                let k = if i == 0 && j == 0 {
                    NetIndex::Center
                } else if i == 0 {
                    NetIndex::seg((l + 1) % m, j, 0)
                } else {
                    NetIndex::seg(l, i, j)
                };
                id[&k]
            };
            for l in 0..m {
                for j in 0..depth {
                    for i in 0..depth {
                        faces.push(vec![at(l, i, j), at(l, i + 1, j), at(l, i + 1, j + 1), at(l, i, j + 1)]);
                    }
                }
            }
        }
        NetKind::Dual => {
            let n = depth + 1;
            for l in 0..m {
                for j in 1..=n {
                    for i in 1..=n {
                        add(NetIndex::seg(l, i, j), &mut index);
                    }
                }
            }
            let at = |l: usize, i: usize, j: usize| id[&NetIndex::seg(l % m, i, j)];
            faces.push((0..m).map(|l| at(l, 1, 1)).collect());
            for l in 0..m {
                for t in 1..n {
                    faces.push(vec![at(l, 1, t), at(l, 1, t + 1), at(l + 1, t + 1, 1), at(l + 1, t, 1)]);
                }
                for j in 1..n {
                    for i in 1..n {
                        faces.push(vec![at(l, i, j), at(l, i + 1, j), at(l, i + 1, j + 1), at(l, i, j + 1)]);
                    }
                }
            }
        }
    }
    (index, faces)
}

/// Complex position of `g^l_{ij}` for segment angle `phi`.
pub fn grid_point(l: f64, i: f64, j: f64, phi: f64) -> Complex64 {
    Complex64::from_polar(1.0, l * phi) * i + Complex64::from_polar(1.0, (l + 1.0) * phi) * j
}

/// Planar position of a net index in a grid mesh with segment angle `phi`.
/// Segments are placed at signed offsets so that nets with a non-closing
/// angle still have consistent positions near segment 0.
pub fn grid_position(k: &NetIndex, kind: NetKind, m: usize, phi: f64) -> Complex64 {
    match (*k, kind) {
        (NetIndex::Center, _) => Complex64::new(0.0, 0.0),
        (NetIndex::Seg { l, i, j }, NetKind::Primal) => grid_point(signed(l, m), i as f64, j as f64, phi),
        (NetIndex::Seg { l, i, j }, NetKind::Dual) => {
            let (i, j, l) = (i as f64, j as f64, signed(l, m));
            (grid_point(l, i - 1.0, j - 1.0, phi)
                + grid_point(l, i, j - 1.0, phi)
                + grid_point(l, i - 1.0, j, phi)
                + grid_point(l, i, j, phi))
                / 4.0
        }
    }
}

fn signed(l: usize, m: usize) -> f64 {
    if 2 * l <= m {
        l as f64
    } else {
        l as f64 - m as f64
    }
}

/// Grid mesh of valence `m`, frequency `f` and the given number of rings.
pub fn build_grid_mesh(m: usize, f: usize, depth: usize, kind: NetKind) -> Result<Ringnet> {
    if m < 3 {
        return Err(Error::InvalidParameter(format!("valence must be at least 3, got {m}")));
    }
    if f == 0 || f >= m {
        return Err(Error::InvalidParameter(format!("frequency must lie in 1..{m}, got {f}")));
    }
    if depth == 0 {
        return Err(Error::InvalidParameter("depth must be at least 1".into()));
    }
    let phi = 2.0 * PI * f as f64 / m as f64;
    let mut net = topological_net(m, depth, kind)?;
    let z: Vec<Complex64> = net.index.iter().map(|k| grid_position(k, kind, m, phi)).collect();
    net.set_positions_complex(&z);
    net.frequency = Some(f);
    Ok(net)
}

/// Grid connectivity with all positions at the origin.
pub fn topological_net(m: usize, depth: usize, kind: NetKind) -> Result<Ringnet> {
    if m < 3 {
        return Err(Error::InvalidParameter(format!("valence must be at least 3, got {m}")));
    }
    let (index, faces) = grid_topology(m, depth, kind);
    let mesh = QuadMesh::new(vec![[0.0; 3]; index.len()], &faces, 2)?;
    Ok(Ringnet::from_parts(mesh, m, kind, depth, None, index))
}
