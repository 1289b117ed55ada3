//! Randomised structural properties of the operators, shared by the test
//! suites and the reproduction run.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;

use crate::characteristic::cone::{cone_contains, Cone};
use crate::characteristic::nabla::nabla2;
use crate::error::{Error, Result};
use crate::mesh::ringnet::{build_grid_mesh, topological_net, NetIndex, NetKind, Ringnet};
use crate::mesh::symmetry::{reflection_residual, rotation_residual};
use crate::mesh::{Orientation, QuadMesh};
use crate::operators::apply::apply_word;
use crate::operators::net::apply_word_net;
use crate::operators::word::{parse_word, OperatorWord};

/// Random frequency-1 net with rotation and reflection symmetry whose
/// vertical differences lie in the pointed spoke cone.
///
/// Segment 0 is `p_ij = q_j P_i + q_i P_j w` with `w = e^{i 2 pi / m}`,
/// positive steps `P_j - P_{j-1}` and a slowly varying `q`, decreasing for
/// `m >= 5` and increasing for `m = 3`. Candidates are checked and redrawn.
pub fn random_symmetric_net(m: usize, kind: NetKind, depth: usize, rng: &mut impl Rng) -> Result<Ringnet> {
    if m == 4 || m < 3 {
        return Err(Error::InvalidParameter(format!("the spoke cone is degenerate for valence {m}")));
    }
    let w = Complex64::from_polar(1.0, 2.0 * PI / m as f64);
    let sign = if m == 3 { 1.0 } else { -1.0 };
    let cone = Cone::spokes(m, true);
    let n = depth + 2;
    let mut slack = 0.2;
    for _ in 0..200 {
        let steps: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..1.5)).collect();
        let mut big_p = vec![0.0; n + 1];
        for j in 1..=n {
            big_p[j] = big_p[j - 1] + steps[j - 1];
        }
        if kind == NetKind::Dual {
            let half = steps[0] / 2.0;
            big_p.iter_mut().skip(1).for_each(|x| *x -= half);
        }
        let mut q = vec![1.0; n + 1];
        for i in 1..=n {
            q[i] = q[i - 1] + sign * rng.gen_range(0.0..slack) / n as f64;
        }
        let segment0 = |i: usize, j: usize| q[j] * big_p[i] + q[i] * big_p[j] * w;
        let mut net = topological_net(m, depth, kind)?;
        let z: Vec<Complex64> = net
            .index
            .iter()
            .map(|k| match *k {
                NetIndex::Center => Complex64::new(0.0, 0.0),
                NetIndex::Seg { l, i, j } => w.powu(l as u32) * segment0(i, j),
            })
            .collect();
        net.set_positions_complex(&z);
        net.frequency = Some(1);
        let edges = nabla2(&net)?;
        let scale = edges.iter().map(|(_, e)| e.norm()).fold(0.0, f64::max);
        if cone_contains(&cone, &edges, 1e-12 * scale).contained {
            return Ok(net);
        }
        slack *= 0.7;
    }
    Err(Error::Numerical(format!("no admissible symmetric net found for m = {m}")))
}

/// Whether `word` keeps the vertical differences of `net` in the pointed
/// spoke cone.
pub fn cone_preserved(net: &Ringnet, word: &OperatorWord) -> Result<bool> {
    let out = apply_word_net(net, word, 1, None)?;
    let edges = nabla2(&out)?;
    let scale = edges.iter().map(|(_, e)| e.norm()).fold(0.0, f64::max);
    Ok(cone_contains(&Cone::spokes(net.m, true), &edges, 1e-12 * scale).contained)
}

/// The words of the cone-preservation property: `A`, `R` and `V A^l V`.
pub fn cone_words(max_l: usize) -> Vec<OperatorWord> {
    let mut out = vec![parse_word("A").expect("word"), parse_word("R").expect("word")];
    for l in 0..=max_l {
        out.push(parse_word(&format!("V{}V", "A".repeat(l))).expect("word"));
    }
    out
}

/// `max |U(T M) - T(U M)|` for the affine map `x -> L x + t`.
pub fn affine_residual(mesh: &QuadMesh, word: &OperatorWord, linear: [[f64; 3]; 3], shift: [f64; 3]) -> Result<f64> {
    let map = |p: &[f64; 3]| {
        let mut out = shift;
        for (r, row) in linear.iter().enumerate() {
            out[r] += row[0] * p[0] + row[1] * p[1] + row[2] * p[2];
        }
        out
    };
    let mut moved = mesh.clone();
    moved.positions = mesh.positions.iter().map(map).collect();
    moved.dim = 3;
    let (a, _) = apply_word(&moved, word, 1)?;
    let (b, _) = apply_word(mesh, word, 1)?;
    let mut worst: f64 = 0.0;
    for (x, y) in a.positions.iter().zip(&b.positions) {
        let y = map(y);
        for c in 0..3 {
            worst = worst.max((x[c] - y[c]).abs());
        }
    }
    Ok(worst)
}

/// Rotation and reflection residuals after one application of `word` to a
/// frequency-`f` grid mesh.
pub fn symmetry_residual(m: usize, f: usize, kind: NetKind, word: &OperatorWord) -> Result<f64> {
    let net = build_grid_mesh(m, f, 5, kind)?;
    let out = apply_word_net(&net, word, 1, None)?;
    Ok(rotation_residual(&out, f)?.max(reflection_residual(&out)?))
}

/// Whether the extraordinary element of a valence-`m` net ends up with the
/// kind predicted by the letters of `word` (`R` keeps vertices, `V` makes
/// faces, `A` swaps, `B` keeps).
pub fn orientation_parity_ok(m: usize, kind: NetKind, word: &OperatorWord) -> Result<bool> {
    let net = build_grid_mesh(m, 1, 5, kind)?;
    let (out, info) = apply_word(&net.mesh, word, 1)?;
    let expected = match word.output_kind(kind) {
        NetKind::Primal => Orientation::Primal,
        NetKind::Dual => Orientation::Dual,
    };
    Ok(out.orientation() == expected && info[0].orientation == expected)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_nets_are_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for m in [3, 5, 7] {
            for kind in [NetKind::Primal, NetKind::Dual] {
                let net = random_symmetric_net(m, kind, 5, &mut rng).unwrap();
                assert!(rotation_residual(&net, 1).unwrap() < 1e-12);
                assert!(reflection_residual(&net).unwrap() < 1e-12, "{m} {kind:?}");
            }
        }
    }

    #[test]
    fn grid_preserves_cone_under_vav() {
        let net = build_grid_mesh(5, 1, 6, NetKind::Primal).unwrap();
        assert!(cone_preserved(&net, &parse_word("VAV").unwrap()).unwrap());
    }

    #[test]
    fn valence_four_has_no_cone_nets() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(random_symmetric_net(4, NetKind::Primal, 4, &mut rng).is_err());
    }
}
