//! Words applied to ringnets with parameter labels.
//!
//! Each vertex carries its exact position in the piecewise chart of the
//! input net, so the output can be indexed as a ringnet again. Meshes may be
//! cropped to a label radius after every operator; rows of surviving
//! vertices are exact because every operator reads only a complete face,
//! edge or vertex fan.

use super::apply::{step, Source};
use super::word::OperatorWord;
use crate::error::{Error, Result};
use crate::mesh::param::{Param, Q};
use crate::mesh::ringnet::{NetIndex, NetKind, Ringnet};
use crate::mesh::{QuadMesh, Topology};
use crate::rational::Rational;
use crate::sparse::{expand_row, SparseRows};

/// A sequence of operator steps applied to a labelled net.
#[derive(Debug, Clone)]
pub struct Trace {
    pub m: usize,
    pub steps: Vec<SparseRows<Rational>>,
    /// Per step, the output vertices sitting on the extraordinary vertex.
    pub centers: Vec<Vec<usize>>,
    pub topology: Topology,
    pub labels: Vec<Param>,
}

impl Trace {
    pub fn n_inputs(&self) -> usize {
        self.steps.first().map(|s| s.ncols).unwrap_or(self.labels.len())
    }

    /// Weights of output vertex `v` over the input vertices.
    pub fn row(&self, v: usize) -> Vec<(usize, Rational)> {
        let mut row = vec![(v, Rational::from_integer(1))];
        for s in self.steps.iter().rev() {
            row = expand_row(&row, s);
        }
        row
    }

    /// Input vertices that output vertex `v` depends on.
    pub fn support(&self, v: usize) -> Vec<usize> {
        let mut set = vec![v];
        let mut mark = Vec::new();
        for s in self.steps.iter().rev() {
            mark.clear();
            mark.resize(s.ncols, false);
            for &u in &set {
                for &(c, _) in &s.rows[u] {
                    mark[c] = true;
                }
            }
            set = (0..s.ncols).filter(|&c| mark[c]).collect();
        }
        set
    }

    /// Applies the traced steps to input positions.
    pub fn apply_positions(&self, positions: &[[f64; 3]]) -> Vec<[f64; 3]> {
        let mut p = positions.to_vec();
        for s in &self.steps {
            p = s.to_f64().apply(&p);
        }
        p
    }

    /// Applies the steps to complex values of a symmetric net with non-zero
    /// frequency, pinning every vertex created at the centre to 0. This is
    /// exact for symmetric nets and lets grid meshes with a segment angle
    /// that does not close up be pushed through the word near segment 0.
    pub fn apply_pinned(&self, z: &[num_complex::Complex64]) -> Vec<num_complex::Complex64> {
        let mut z = z.to_vec();
        for (s, centers) in self.steps.iter().zip(&self.centers) {
            let w = s.to_f64();
            z = w.rows.iter().map(|row| row.iter().map(|(c, x)| z[*c] * *x).sum()).collect();
            for &v in centers {
                z[v] = num_complex::Complex64::new(0.0, 0.0);
            }
        }
        z
    }
}

fn crop_to(topology: &Topology, labels: &[Param], radius: Q) -> Result<(Topology, Vec<usize>)> {
    let inside: Vec<bool> = labels.iter().map(|p| p.abs_max() <= radius).collect();
    let faces: Vec<Vec<usize>> = (0..topology.n_faces())
        .filter(|&f| topology.face_vertices(f).iter().all(|&v| inside[v]))
        .map(|f| topology.face_vertices(f).to_vec())
        .collect();
    let mut used = vec![false; labels.len()];
    for f in &faces {
        for &v in f {
            used[v] = true;
        }
    }
    let keep: Vec<usize> = (0..labels.len()).filter(|&v| used[v]).collect();
    let mut map = vec![usize::MAX; labels.len()];
    for (k, &v) in keep.iter().enumerate() {
        map[v] = k;
    }
    let faces: Vec<Vec<usize>> = faces.into_iter().map(|f| f.into_iter().map(|v| map[v]).collect()).collect();
    Ok((Topology::from_faces(keep.len(), &faces)?, keep))
}

/// Crop radii for every operator of `rounds` applications of `word` such
/// that outputs within label radius `target` survive, together with the
/// input radius they need. Faces are assumed to span at most `margin` times
/// their nominal extent, which starts at 1 and halves with `R` and every
/// second `V`.
pub fn crop_schedule(word: &OperatorWord, rounds: usize, target: Q, margin: Q) -> (Vec<Q>, Q) {
    let mut extent = Vec::new();
    let mut e = Q::from_integer(1);
    let mut vs = 0;
    for _ in 0..rounds {
        for f in word.application_order() {
            extent.push(e);
            match f {
                super::word::Factor::R => e /= 2,
                super::word::Factor::V => {
                    vs += 1;
                    if vs % 2 == 0 {
                        e /= 2;
                    }
                }
                _ => {}
            }
        }
    }
    let mut radii = vec![target; extent.len()];
    let mut acc = target;
    for t in (0..extent.len()).rev() {
        radii[t] = acc;
        acc += margin * extent[t];
    }
    (radii, acc)
}

/// Runs `rounds` applications of `word` on a labelled topology. With
/// `crop`, the mesh after operator `t` is cut to label radius `crop[t]`
/// (input units).
pub fn trace_word(
    topology: &Topology,
    labels: &[Param],
    m: usize,
    word: &OperatorWord,
    rounds: usize,
    crop: Option<&[Q]>,
) -> Result<Trace> {
    let mut topology = topology.clone();
    let mut labels = labels.to_vec();
    let mut steps = Vec::new();
    let mut centers = Vec::new();
    for _ in 0..rounds {
        for factor in word.application_order() {
            let crop_radius = crop.and_then(|c| c.get(steps.len()).copied());
            let s = step(&topology, factor)?;
            let mut new_labels = Vec::with_capacity(s.sources.len());
            for src in &s.sources {
                let l = match *src {
                    Source::Vertex(v) => labels[v],
                    Source::Edge(h) => {
                        Param::centroid(&[labels[topology.origin(h)], labels[topology.target(h)]], m)?
                    }
                    Source::Face(f) => {
                        let ls: Vec<Param> = topology.face_vertices(f).iter().map(|&v| labels[v]).collect();
                        Param::centroid(&ls, m)?
                    }
                };
                new_labels.push(l);
            }
            let (t, weights, l) = match crop_radius {
                Some(r) => {
                    let (t, keep) = crop_to(&s.topology, &new_labels, r)?;
                    let l = keep.iter().map(|&v| new_labels[v]).collect();
                    (t, s.weights.select_rows(&keep), l)
                }
                None => (s.topology, s.weights, new_labels),
            };
            if t.n_faces() == 0 {
                return Err(Error::Resource("net vanished while applying the word; increase its depth".into()));
            }
            centers.push(l.iter().enumerate().filter(|(_, p)| **p == Param::Center).map(|(v, _)| v).collect());
            topology = t;
            labels = l;
            steps.push(weights);
        }
    }
    Ok(Trace { m, steps, centers, topology, labels })
}

/// Lattice scale of the output of one round: `sigma` for even `v`.
pub fn output_scale(word: &OperatorWord, rounds: usize) -> Result<Q> {
    if word.v() * rounds % 2 == 1 {
        return Err(Error::InvalidParameter(format!(
            "the output of {word} applied {rounds} times sits on a rotated lattice; square the word first"
        )));
    }
    let e = word.r() * rounds + word.v() * rounds / 2;
    if e > 60 {
        return Err(Error::Resource(format!("lattice scale 2^-{e} is too fine")));
    }
    Ok(Q::new(1, 1i64 << e))
}

/// Net indices of the trace's output vertices on the output lattice.
pub fn output_indices(trace: &Trace, kind: NetKind, scale: Q) -> Vec<Option<NetIndex>> {
    trace.labels.iter().map(|p| NetIndex::from_param(p, kind, scale)).collect()
}

/// Applies `word` `rounds` times to a ringnet with positions and indexes
/// the result. Vertices that do not land on the output lattice are an error.
pub fn apply_word_net(net: &Ringnet, word: &OperatorWord, rounds: usize, crop: Option<&[Q]>) -> Result<Ringnet> {
    let scale = output_scale(word, rounds)?;
    let labels: Vec<Param> = (0..net.index.len()).map(|v| net.param(v)).collect();
    let trace = trace_word(&net.mesh.topology, &labels, net.m, word, rounds, crop)?;
    let mut kind = net.kind;
    for _ in 0..rounds {
        kind = word.output_kind(kind);
    }
    let index: Vec<NetIndex> = output_indices(&trace, kind, scale)
        .into_iter()
        .enumerate()
        .map(|(v, k)| {
            k.ok_or_else(|| Error::Structural(format!("output vertex {v} is off the lattice: {:?}", trace.labels[v])))
        })
        .collect::<Result<_>>()?;
    let positions = trace.apply_positions(&net.mesh.positions);
    let depth = index.iter().map(|k| k.grid_ring(kind)).max().unwrap_or(0);
    let mesh = QuadMesh { topology: trace.topology, positions, dim: net.mesh.dim };
    Ok(Ringnet::from_parts(mesh, net.m, kind, depth, net.frequency, index))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::param::q;
    use crate::mesh::ringnet::build_grid_mesh;
    use crate::mesh::symmetry::{is_reflection_symmetric, is_rotation_symmetric};
    use crate::operators::word::parse_word;

    #[test]
    fn grid_maps_to_grid_under_even_words() {
        for w in ["VV", "AR", "VAV", "RVVR", "AAR"] {
            let word = parse_word(w).unwrap();
            for kind in [NetKind::Primal, NetKind::Dual] {
                let net = build_grid_mesh(5, 1, 6, kind).unwrap();
                let out = apply_word_net(&net, &word, 1, None).unwrap();
                assert!(is_rotation_symmetric(&out, 1).unwrap(), "{w} {kind}");
                assert!(is_reflection_symmetric(&out).unwrap(), "{w} {kind}");
            }
        }
    }

    #[test]
    fn dual_kind_after_vav() {
        let net = build_grid_mesh(5, 1, 5, NetKind::Primal).unwrap();
        let out = apply_word_net(&net, &parse_word("VAV").unwrap(), 1, None).unwrap();
        assert_eq!(out.kind, NetKind::Dual);
        assert!(out.vertex(&NetIndex::seg(0, 1, 1)).is_some());
    }

    #[test]
    fn cropping_keeps_exact_rows() {
        let net = build_grid_mesh(5, 1, 6, NetKind::Primal).unwrap();
        let labels: Vec<Param> = (0..net.index.len()).map(|v| net.param(v)).collect();
        let w = parse_word("AAR").unwrap();
        let full = trace_word(&net.mesh.topology, &labels, 5, &w, 2, None).unwrap();
        let (radii, _) = crop_schedule(&w, 2, q(1, 1), q(1, 1));
        let cut = trace_word(&net.mesh.topology, &labels, 5, &w, 2, Some(&radii)).unwrap();
        assert!(cut.labels.len() < full.labels.len());
        for (v, p) in cut.labels.iter().enumerate() {
            let u = full.labels.iter().position(|x| x == p).unwrap();
            assert_eq!(cut.row(v), full.row(u));
        }
    }

    #[test]
    fn odd_words_are_rejected_by_the_indexer() {
        let net = build_grid_mesh(5, 1, 3, NetKind::Primal).unwrap();
        assert!(apply_word_net(&net, &parse_word("V").unwrap(), 1, None).is_err());
        assert!(apply_word_net(&net, &parse_word("V").unwrap(), 2, None).is_ok());
    }
}
