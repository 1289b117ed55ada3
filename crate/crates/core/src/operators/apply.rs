//! The four basic operators as connectivity changes plus exact weights.
//!
//! Every operator produces a [`Step`]: the new connectivity, one weight row
//! per new vertex over the old vertices, and the element each new vertex
//! came from. Positions are obtained by applying the weights, which keeps the
//! same code path for geometry, exact matrices and label tracking.

use num_traits::{One, Zero};

use super::word::{BParams, Factor, OperatorWord};
use crate::error::{Error, Result};
use crate::mesh::{Orientation, QuadMesh, Topology};
use crate::rational::{rat, Rational};
use crate::sparse::SparseRows;

/// Element of the input mesh a new vertex stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Vertex(usize),
    /// Half-edge representative of an undirected edge.
    Edge(usize),
    Face(usize),
}

#[derive(Debug, Clone)]
pub struct Step {
    pub topology: Topology,
    pub weights: SparseRows<Rational>,
    pub sources: Vec<Source>,
}

fn face_row(t: &Topology, f: usize) -> Vec<(usize, Rational)> {
    let vs = t.face_vertices(f);
    let w = rat(1, vs.len() as i128);
    let mut row: Vec<(usize, Rational)> = vs.iter().map(|&v| (v, w)).collect();
    row.sort_by_key(|e| e.0);
    row
}

fn edge_row(t: &Topology, h: usize) -> Vec<(usize, Rational)> {
    let (a, b) = (t.origin(h), t.target(h));
    let mut row = vec![(a, rat(1, 2)), (b, rat(1, 2))];
    row.sort_by_key(|e| e.0);
    row
}

/// Representative half-edge of the edge containing `h`.
fn edge_rep(t: &Topology, h: usize) -> usize {
    match t.twin(h) {
        Some(g) if g < h => g,
        _ => h,
    }
}

/// Drops vertices that no face uses and renumbers the rest.
fn compact(n: usize, faces: Vec<Vec<usize>>, rows: Vec<Vec<(usize, Rational)>>, sources: Vec<Source>, ncols: usize) -> Result<Step> {
    let mut used = vec![false; n];
    for f in &faces {
        for &v in f {
            used[v] = true;
        }
    }
    let mut map = vec![usize::MAX; n];
    let mut kept_rows = Vec::new();
    let mut kept_sources = Vec::new();
    for (v, (row, src)) in rows.into_iter().zip(sources).enumerate() {
        if used[v] {
            map[v] = kept_rows.len();
            kept_rows.push(row);
            kept_sources.push(src);
        }
    }
    let faces: Vec<Vec<usize>> = faces.into_iter().map(|f| f.into_iter().map(|v| map[v]).collect()).collect();
    let topology = Topology::from_faces(kept_rows.len(), &faces)?;
    Ok(Step { topology, weights: SparseRows { ncols, rows: kept_rows }, sources: kept_sources })
}

/// Refinement: splits every face at its centroid.
pub fn step_r(t: &Topology) -> Result<Step> {
    let nv = t.n_vertices();
    let mut rows: Vec<Vec<(usize, Rational)>> = (0..nv).map(|v| vec![(v, Rational::one())]).collect();
    let mut sources: Vec<Source> = (0..nv).map(Source::Vertex).collect();
    let mut edge_vertex = vec![usize::MAX; t.n_halfedges()];
    for h in 0..t.n_halfedges() {
        if t.is_edge_representative(h) {
            edge_vertex[h] = rows.len();
            rows.push(edge_row(t, h));
            sources.push(Source::Edge(h));
        }
    }
    let mut faces = Vec::with_capacity(4 * t.n_faces());
    for f in 0..t.n_faces() {
        let c = rows.len();
        rows.push(face_row(t, f));
        sources.push(Source::Face(f));
        for h in t.face_halfedges(f) {
            let p = t.prev(h);
            faces.push(vec![t.origin(h), edge_vertex[edge_rep(t, h)], c, edge_vertex[edge_rep(t, p)]]);
        }
    }
    let topology = Topology::from_faces(rows.len(), &faces)?;
    Ok(Step { topology, weights: SparseRows { ncols: nv, rows }, sources })
}

/// Averaging: face centroids joined around every interior vertex.
pub fn step_a(t: &Topology) -> Result<Step> {
    let rows: Vec<_> = (0..t.n_faces()).map(|f| face_row(t, f)).collect();
    let sources = (0..t.n_faces()).map(Source::Face).collect();
    let mut faces = Vec::new();
    for v in 0..t.n_vertices() {
        if t.is_interior_vertex(v) {
            let (fan, _) = t.vertex_fan(v);
            faces.push(fan.iter().map(|&h| t.face(h)).collect());
        }
    }
    compact(t.n_faces(), faces, rows, sources, t.n_vertices())
}

/// Mid-edge: edge midpoints joined inside every face and around every
/// interior vertex.
pub fn step_v(t: &Topology) -> Result<Step> {
    let mut edge_vertex = vec![usize::MAX; t.n_halfedges()];
    let mut rows = Vec::new();
    let mut sources = Vec::new();
    for h in 0..t.n_halfedges() {
        if t.is_edge_representative(h) {
            edge_vertex[h] = rows.len();
            rows.push(edge_row(t, h));
            sources.push(Source::Edge(h));
        }
    }
    let ev = |h: usize| edge_vertex[edge_rep(t, h)];
    let mut faces = Vec::new();
    for f in 0..t.n_faces() {
        faces.push(t.face_halfedges(f).map(ev).collect());
    }
    for v in 0..t.n_vertices() {
        if t.is_interior_vertex(v) {
            let (fan, _) = t.vertex_fan(v);
            faces.push(fan.iter().map(|&h| ev(h)).collect());
        }
    }
    compact(rows.len(), faces, rows, sources, t.n_vertices())
}

/// Vertex smoothing with per-valence weights. Boundary vertices and the
/// faces touching them are dropped; connectivity is otherwise unchanged.
pub fn step_b(t: &Topology, params: &BParams) -> Result<Step> {
    let nv = t.n_vertices();
    let interior = t.interior_flags();
    let mut rows = Vec::with_capacity(nv);
    let mut sources = Vec::with_capacity(nv);
    for v in 0..nv {
        if !interior[v] {
            rows.push(Vec::new());
            sources.push(Source::Vertex(v));
            continue;
        }
        let (fan, _) = t.vertex_fan(v);
        let m = fan.len();
        let (alpha, beta) = params
            .params(m)
            .ok_or_else(|| Error::InvalidParameter(format!("no B parameters given for valence {m}")))?;
        let gamma = Rational::one() - alpha - beta;
        let mm = Rational::from_integer(m as i128);
        let mut acc: std::collections::BTreeMap<usize, Rational> = std::collections::BTreeMap::new();
        let mut add = |w: usize, x: Rational| {
            let e = acc.entry(w).or_insert_with(Rational::zero);
            *e += x;
        };
        add(v, alpha);
        for &h in &fan {
            add(t.target(h), beta / mm);
            let f = t.face(h);
            let n = t.face_valence(f);
            if n < 4 {
                return Err(Error::InvalidMesh(format!(
                    "B needs faces with at least four vertices, face {f} has {n}"
                )));
            }
            // Far corner: face vertices other than v and its two neighbours.
            let far = n - 3;
            let mut g = t.next(t.next(h));
            for _ in 0..far {
                add(t.origin(g), gamma / mm / Rational::from_integer(far as i128));
                g = t.next(g);
            }
        }
        rows.push(acc.into_iter().filter(|(_, w)| !w.is_zero()).collect());
        sources.push(Source::Vertex(v));
    }
    let faces: Vec<Vec<usize>> = (0..t.n_faces())
        .filter(|&f| t.face_vertices(f).iter().all(|&v| interior[v]))
        .map(|f| t.face_vertices(f).to_vec())
        .collect();
    compact(nv, faces, rows, sources, nv)
}

pub fn step(t: &Topology, factor: &Factor) -> Result<Step> {
    match factor {
        Factor::A => step_a(t),
        Factor::V => step_v(t),
        Factor::R => step_r(t),
        Factor::B(p) => step_b(t, p),
    }
}

fn apply_step(mesh: &QuadMesh, s: Step) -> QuadMesh {
    let positions = s.weights.to_f64().apply(&mesh.positions);
    QuadMesh { topology: s.topology, positions, dim: mesh.dim }
}

pub fn apply_factor(mesh: &QuadMesh, factor: &Factor) -> Result<QuadMesh> {
    Ok(apply_step(mesh, step(&mesh.topology, factor)?))
}

pub fn apply_r(mesh: &QuadMesh) -> Result<QuadMesh> {
    apply_factor(mesh, &Factor::R)
}

pub fn apply_a(mesh: &QuadMesh) -> Result<QuadMesh> {
    apply_factor(mesh, &Factor::A)
}

pub fn apply_v(mesh: &QuadMesh) -> Result<QuadMesh> {
    apply_factor(mesh, &Factor::V)
}

pub fn apply_b(mesh: &QuadMesh, params: &BParams) -> Result<QuadMesh> {
    apply_factor(mesh, &Factor::B(params.clone()))
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct RoundInfo {
    pub round: usize,
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub orientation: Orientation,
}

/// Applies `word` `rounds` times, rightmost factor first.
pub fn apply_word(mesh: &QuadMesh, word: &OperatorWord, rounds: usize) -> Result<(QuadMesh, Vec<RoundInfo>)> {
    let mut current = mesh.clone();
    let mut info = Vec::with_capacity(rounds);
    for round in 1..=rounds {
        for f in word.application_order() {
            current = apply_factor(&current, f)?;
            if current.n_faces() == 0 {
                return Err(Error::InvalidMesh(format!(
                    "mesh vanished in round {round}: no interior elements left"
                )));
            }
        }
        info.push(RoundInfo {
            round,
            vertices: current.n_vertices(),
            edges: current.n_edges(),
            faces: current.n_faces(),
            orientation: current.orientation(),
        });
    }
    Ok((current, info))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::word::parse_word;

    fn grid(n: usize) -> QuadMesh {
        let id = |i: usize, j: usize| j * (n + 1) + i;
        let mut pts = Vec::new();
        for j in 0..=n {
            for i in 0..=n {
                pts.push([i as f64, j as f64]);
            }
        }
        let mut faces = Vec::new();
        for j in 0..n {
            for i in 0..n {
                faces.push(vec![id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]);
            }
        }
        QuadMesh::planar(&pts, &faces).unwrap()
    }

    fn square() -> QuadMesh {
        QuadMesh::planar(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]], &[vec![0, 1, 2, 3]]).unwrap()
    }

    fn has_point(mesh: &QuadMesh, x: f64, y: f64) -> bool {
        mesh.positions.iter().any(|p| (p[0] - x).abs() < 1e-12 && (p[1] - y).abs() < 1e-12)
    }

    #[test]
    fn r_splits_square() {
        let out = apply_r(&square()).unwrap();
        assert_eq!(out.n_faces(), 4);
        assert!(has_point(&out, 0.5, 0.5));
    }

    #[test]
    fn r_on_pentagon_gives_valence_five_vertex() {
        let pts: Vec<[f64; 2]> = (0..5)
            .map(|k| {
                let a = 2.0 * std::f64::consts::PI * k as f64 / 5.0;
                [a.cos(), a.sin()]
            })
            .collect();
        let mesh = QuadMesh::planar(&pts, &[vec![0, 1, 2, 3, 4]]).unwrap();
        let out = apply_r(&mesh).unwrap();
        assert_eq!(out.n_faces(), 5);
        assert_eq!(out.extraordinary_vertices().len(), 1);
    }

    #[test]
    fn a_on_small_grid_is_one_quad() {
        let out = apply_a(&grid(2)).unwrap();
        assert_eq!(out.n_faces(), 1);
        assert_eq!(out.n_vertices(), 4);
        for (x, y) in [(0.5, 0.5), (1.5, 0.5), (1.5, 1.5), (0.5, 1.5)] {
            assert!(has_point(&out, x, y));
        }
    }

    #[test]
    fn v_on_square_is_diamond() {
        let out = apply_v(&square()).unwrap();
        assert_eq!(out.n_vertices(), 4);
        for (x, y) in [(0.5, 0.0), (1.0, 0.5), (0.5, 1.0), (0.0, 0.5)] {
            assert!(has_point(&out, x, y));
        }
    }

    #[test]
    fn aa_vertex_mask() {
        let t = grid(4).topology;
        let a1 = step_a(&t).unwrap();
        let a2 = step_a(&a1.topology).unwrap();
        let w = a2.weights.compose(&a1.weights);
        // The centre output vertex of A^2 on a 4x4 grid sits over input vertex (2,2).
        let centre = w
            .rows
            .iter()
            .find(|r| r.len() == 9 && r.iter().all(|&(c, x)| c == 12 || x < rat(1, 4)))
            .unwrap();
        let get = |c: usize| centre.iter().find(|e| e.0 == c).unwrap().1;
        assert_eq!(get(12), rat(1, 4));
        assert_eq!(get(7), rat(1, 8));
        assert_eq!(get(6), rat(1, 16));
    }

    #[test]
    fn b_regular_equals_aa() {
        let mesh = grid(6);
        let b = parse_word("B(1/4,1/2)").unwrap();
        let Factor::B(p) = &b.factors[0] else { unreachable!() };
        let out_b = apply_b(&mesh, p).unwrap();
        let out_aa = apply_a(&apply_a(&mesh).unwrap()).unwrap();
        for p in &out_aa.positions {
            assert!(has_point(&out_b, p[0], p[1]));
        }
    }

    #[test]
    fn b_rejects_triangles() {
        let mesh = QuadMesh::planar(
            &[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]],
            &[vec![0, 1, 2], vec![0, 2, 3], vec![0, 3, 4], vec![0, 4, 1]],
        )
        .unwrap();
        let p = BParams::constant(rat(1, 4), rat(1, 2)).unwrap();
        assert!(apply_b(&mesh, &p).is_err());
    }

    #[test]
    fn cube_counts() {
        let text = "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nv 0 0 1\nv 1 0 1\nv 1 1 1\nv 0 1 1\n\
                    f 1 4 3 2\nf 5 6 7 8\nf 1 2 6 5\nf 2 3 7 6\nf 3 4 8 7\nf 4 1 5 8\n";
        let cube = crate::mesh::obj::parse_obj(text).unwrap();
        let (_, info) = apply_word(&cube, &parse_word("AAR").unwrap(), 3).unwrap();
        let counts: Vec<(usize, usize, usize)> = info.iter().map(|r| (r.vertices, r.edges, r.faces)).collect();
        assert_eq!(counts, vec![(26, 48, 24), (98, 192, 96), (386, 768, 384)]);
        assert_eq!(info[0].orientation, Orientation::Primal);
    }
}
