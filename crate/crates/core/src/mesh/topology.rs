//! Half-edge connectivity built from oriented face lists.
//!
//! Half-edges of a face are stored contiguously, so `next`/`prev` are index
//! arithmetic and only twins need a table.

use std::collections::HashMap;

use crate::error::{Error, Result};

const NONE: usize = usize::MAX;

#[derive(Debug, Clone)]
pub struct Topology {
    n_vertices: usize,
    face_start: Vec<usize>,
    origin: Vec<usize>,
    face_of: Vec<usize>,
    twin: Vec<usize>,
    /// One outgoing half-edge per vertex; a boundary one when the vertex
    /// lies on the boundary. `NONE` for isolated vertices.
    out: Vec<usize>,
    out_count: Vec<usize>,
}

impl Topology {
    /// Builds connectivity for `n_vertices` vertices and counter-clockwise
    /// faces. Rejects faces with fewer than three distinct vertices and
    /// edges used twice in the same direction.
    pub fn from_faces(n_vertices: usize, faces: &[Vec<usize>]) -> Result<Self> {
        let mut face_start = Vec::with_capacity(faces.len() + 1);
        let mut origin = Vec::new();
        let mut face_of = Vec::new();
        face_start.push(0);
        for (f, face) in faces.iter().enumerate() {
            if face.len() < 3 {
                return Err(Error::InvalidMesh(format!(
                    "face {f} has {} vertices (dangling edge or degenerate face)",
                    face.len()
                )));
            }
            for (k, &v) in face.iter().enumerate() {
                if v >= n_vertices {
                    return Err(Error::InvalidMesh(format!("face {f} references vertex {v}")));
                }
                if face[..k].contains(&v) {
                    return Err(Error::InvalidMesh(format!("face {f} repeats vertex {v}")));
                }
                origin.push(v);
                face_of.push(f);
            }
            face_start.push(origin.len());
        }

        let nh = origin.len();
        let mut directed: HashMap<(usize, usize), usize> = HashMap::with_capacity(nh);
        let mut duplicates = Vec::new();
        for f in 0..faces.len() {
            for h in face_start[f]..face_start[f + 1] {
                let a = origin[h];
                let b = origin[next_in(&face_start, f, h)];
                if directed.insert((a, b), h).is_some() {
                    duplicates.push((a, b));
                }
            }
        }
        if !duplicates.is_empty() {
            duplicates.sort_unstable();
            duplicates.dedup();
            return Err(Error::NonManifold { edges: duplicates });
        }

        let mut twin = vec![NONE; nh];
        for (&(a, b), &h) in &directed {
            if let Some(&t) = directed.get(&(b, a)) {
                twin[h] = t;
            }
        }

        let mut out = vec![NONE; n_vertices];
        let mut out_count = vec![0; n_vertices];
        for h in 0..nh {
            out_count[origin[h]] += 1;
            let v = origin[h];
            if out[v] == NONE || twin[h] == NONE {
                out[v] = h;
            }
        }

        Ok(Self { n_vertices, face_start, origin, face_of, twin, out, out_count })
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn n_faces(&self) -> usize {
        self.face_start.len() - 1
    }

    pub fn n_halfedges(&self) -> usize {
        self.origin.len()
    }

    /// Number of undirected edges.
    pub fn n_edges(&self) -> usize {
        (0..self.n_halfedges()).filter(|&h| self.is_edge_representative(h)).count()
    }

    /// True for exactly one half-edge of every undirected edge.
    pub fn is_edge_representative(&self, h: usize) -> bool {
        let t = self.twin[h];
        t == NONE || h < t
    }

    pub fn face_halfedges(&self, f: usize) -> std::ops::Range<usize> {
        self.face_start[f]..self.face_start[f + 1]
    }

    pub fn face_vertices(&self, f: usize) -> &[usize] {
        &self.origin[self.face_start[f]..self.face_start[f + 1]]
    }

    pub fn face_valence(&self, f: usize) -> usize {
        self.face_start[f + 1] - self.face_start[f]
    }

    pub fn origin(&self, h: usize) -> usize {
        self.origin[h]
    }

    pub fn target(&self, h: usize) -> usize {
        self.origin[self.next(h)]
    }

    pub fn face(&self, h: usize) -> usize {
        self.face_of[h]
    }

    pub fn twin(&self, h: usize) -> Option<usize> {
        let t = self.twin[h];
        (t != NONE).then_some(t)
    }

    pub fn next(&self, h: usize) -> usize {
        next_in(&self.face_start, self.face_of[h], h)
    }

    pub fn prev(&self, h: usize) -> usize {
        prev_in(&self.face_start, self.face_of[h], h)
    }

    pub fn is_boundary_halfedge(&self, h: usize) -> bool {
        self.twin[h] == NONE
    }

    /// Outgoing half-edges of `v` in counter-clockwise order, starting at a
    /// boundary half-edge when there is one. Returns the fan and whether it
    /// closes into a full cycle.
    pub fn vertex_fan(&self, v: usize) -> (Vec<usize>, bool) {
        let start = self.out[v];
        if start == NONE {
            return (Vec::new(), false);
        }
        let mut fan = vec![start];
        let mut h = start;
        loop {
            match self.twin(self.prev(h)) {
                None => return (fan, false),
                Some(t) if t == start => return (fan, true),
                Some(t) => {
                    fan.push(t);
                    h = t;
                    if fan.len() > self.n_halfedges() {
                        return (fan, false);
                    }
                }
            }
        }
    }

    /// Interior vertices have a closed fan that covers every outgoing
    /// half-edge (pinched vertices are treated as boundary).
    pub fn is_interior_vertex(&self, v: usize) -> bool {
        let (fan, closed) = self.vertex_fan(v);
        closed && fan.len() == self.out_count[v]
    }

    pub fn interior_flags(&self) -> Vec<bool> {
        (0..self.n_vertices).map(|v| self.is_interior_vertex(v)).collect()
    }

    /// Vertices referenced by at least one face.
    pub fn is_used(&self, v: usize) -> bool {
        self.out_count[v] > 0
    }

    /// Number of incident edges.
    pub fn vertex_valence(&self, v: usize) -> usize {
        let (fan, closed) = self.vertex_fan(v);
        if closed {
            fan.len()
        } else {
            fan.len() + 1
        }
    }

    pub fn boundary_vertices(&self) -> Vec<bool> {
        let mut b = vec![false; self.n_vertices];
        for h in 0..self.n_halfedges() {
            if self.twin[h] == NONE {
                b[self.origin[h]] = true;
                b[self.target(h)] = true;
            }
        }
        b
    }

    pub fn faces(&self) -> Vec<Vec<usize>> {
        (0..self.n_faces()).map(|f| self.face_vertices(f).to_vec()).collect()
    }

    /// Vertices sharing a face with `v`, excluding `v`.
    pub fn face_neighbors(&self, incident: &[Vec<usize>], v: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for &f in &incident[v] {
            for &w in self.face_vertices(f) {
                if w != v && !out.contains(&w) {
                    out.push(w);
                }
            }
        }
        out
    }

    /// Faces incident to each vertex.
    pub fn vertex_faces(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.n_vertices];
        for f in 0..self.n_faces() {
            for &v in self.face_vertices(f) {
                inc[v].push(f);
            }
        }
        inc
    }
}

fn next_in(face_start: &[usize], f: usize, h: usize) -> usize {
    if h + 1 < face_start[f + 1] {
        h + 1
    } else {
        face_start[f]
    }
}

fn prev_in(face_start: &[usize], f: usize, h: usize) -> usize {
    if h > face_start[f] {
        h - 1
    } else {
        face_start[f + 1] - 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> Topology {
        let id = |i: usize, j: usize| j * (n + 1) + i;
        let mut faces = Vec::new();
        for j in 0..n {
            for i in 0..n {
                faces.push(vec![id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]);
            }
        }
        Topology::from_faces((n + 1) * (n + 1), &faces).unwrap()
    }

    #[test]
    fn grid_counts_and_valences() {
        let t = grid(2);
        assert_eq!(t.n_faces(), 4);
        assert_eq!(t.n_edges(), 12);
        assert_eq!(t.vertex_valence(4), 4);
        assert!(t.is_interior_vertex(4));
        assert_eq!(t.vertex_valence(0), 2);
        assert_eq!(t.vertex_valence(1), 3);
        assert!(!t.is_interior_vertex(1));
    }

    #[test]
    fn fan_is_counter_clockwise() {
        let t = grid(2);
        let (fan, closed) = t.vertex_fan(4);
        assert!(closed);
        let targets: Vec<usize> = fan.iter().map(|&h| t.target(h)).collect();
        // Neighbours of the centre in CCW order starting anywhere.
        let ccw = [5, 7, 3, 1];
        let s = ccw.iter().position(|&x| x == targets[0]).unwrap();
        for k in 0..4 {
            assert_eq!(targets[k], ccw[(s + k) % 4]);
        }
    }

    #[test]
    fn rejects_duplicate_directed_edge() {
        let faces = vec![vec![0, 1, 2], vec![0, 1, 3]];
        match Topology::from_faces(4, &faces) {
            Err(Error::NonManifold { edges }) => assert_eq!(edges, vec![(0, 1)]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_dangling_edge() {
        assert!(matches!(
            Topology::from_faces(3, &[vec![0, 1]]),
            Err(Error::InvalidMesh(_))
        ));
    }
}
