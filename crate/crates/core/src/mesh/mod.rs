//! Polygon meshes with half-edge connectivity.

pub mod obj;
pub mod param;
pub mod ringnet;
pub mod symmetry;
pub mod topology;

pub use topology::Topology;

use crate::error::{Error, Result};

/// Which kind of extraordinary element a mesh carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    /// No extraordinary interior element at all.
    Regular,
    /// Extraordinary vertices only.
    Primal,
    /// Extraordinary faces only.
    Dual,
    /// Both kinds present.
    Mixed,
}

#[derive(Debug, Clone)]
pub struct QuadMesh {
    pub topology: Topology,
    pub positions: Vec<[f64; 3]>,
    /// 2 for planar analysis meshes (z is ignored and kept at 0), 3 otherwise.
    pub dim: usize,
}

impl QuadMesh {
    pub fn new(positions: Vec<[f64; 3]>, faces: &[Vec<usize>], dim: usize) -> Result<Self> {
        if let Some((v, _)) = positions
            .iter()
            .enumerate()
            .find(|(_, p)| p.iter().any(|c| !c.is_finite()))
        {
            return Err(Error::InvalidMesh(format!("vertex {v} has a non-finite coordinate")));
        }
        let topology = Topology::from_faces(positions.len(), faces)?;
        Ok(Self { topology, positions, dim })
    }

    pub fn planar(points: &[[f64; 2]], faces: &[Vec<usize>]) -> Result<Self> {
        let positions = points.iter().map(|p| [p[0], p[1], 0.0]).collect();
        Self::new(positions, faces, 2)
    }

    pub fn n_vertices(&self) -> usize {
        self.topology.n_vertices()
    }

    pub fn n_faces(&self) -> usize {
        self.topology.n_faces()
    }

    pub fn n_edges(&self) -> usize {
        self.topology.n_edges()
    }

    pub fn orientation(&self) -> Orientation {
        let ev = !self.extraordinary_vertices().is_empty();
        let ef = !self.extraordinary_faces().is_empty();
        match (ev, ef) {
            (false, false) => Orientation::Regular,
            (true, false) => Orientation::Primal,
            (false, true) => Orientation::Dual,
            (true, true) => Orientation::Mixed,
        }
    }

    /// Interior vertices of valence other than four.
    pub fn extraordinary_vertices(&self) -> Vec<usize> {
        let t = &self.topology;
        (0..t.n_vertices())
            .filter(|&v| t.is_interior_vertex(v) && t.vertex_valence(v) != 4)
            .collect()
    }

    /// Faces of valence other than four that have no boundary edge.
    pub fn extraordinary_faces(&self) -> Vec<usize> {
        let t = &self.topology;
        (0..t.n_faces())
            .filter(|&f| {
                t.face_valence(f) != 4 && t.face_halfedges(f).all(|h| !t.is_boundary_halfedge(h))
            })
            .collect()
    }

    pub fn diameter(&self) -> f64 {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for p in &self.positions {
            for k in 0..3 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        if self.positions.is_empty() {
            return 0.0;
        }
        ((0..3).map(|k| (hi[k] - lo[k]).powi(2)).sum::<f64>()).sqrt()
    }
}
