//! Independent checks of computed values: masks read off by pushing a unit
//! impulse through the mesh operators, and eigenvalues of the full
//! subdivision matrix solved without the frequency decomposition.

use midsub::characteristic::certify::{certify_extraordinary, certify_gcc};
use midsub::config::AnalysisConfig;
use midsub::mesh::QuadMesh;
use midsub::operators::apply::apply_word;
use midsub::operators::word::parse_word;
use midsub::spectral::eigen::eigenvalues_real;
use midsub::spectral::matrix::build_subdivision_matrix;

/// `n x n` quads with height 1 at vertex `(n/2, n/2)` and 0 elsewhere.
fn impulse_grid(n: usize) -> QuadMesh {
    let id = |i: usize, j: usize| i * (n + 1) + j;
    let mut pos = Vec::new();
    for i in 0..=n {
        for j in 0..=n {
            let z = if i == n / 2 && j == n / 2 { 1.0 } else { 0.0 };
            pos.push([j as f64, i as f64, z]);
        }
    }
    let mut faces = Vec::new();
    for i in 0..n {
        for j in 0..n {
            faces.push(vec![id(i, j), id(i, j + 1), id(i + 1, j + 1), id(i + 1, j)]);
        }
    }
    QuadMesh::new(pos, &faces, 3).unwrap()
}

/// Nonzero heights after one round, in units of `1/den`, sorted.
fn impulse_response(word: &str, den: f64) -> Vec<i64> {
    let (out, _) = apply_word(&impulse_grid(8), &parse_word(word).unwrap(), 1).unwrap();
    let mut v: Vec<i64> = out
        .positions
        .iter()
        .filter(|p| p[2].abs() > 1e-14)
        .map(|p| {
            let x = p[2] * den;
            assert!((x - x.round()).abs() < 1e-9, "{word}: weight {} is not a multiple of 1/{den}", p[2]);
            x.round() as i64
        })
        .collect();
    v.sort_unstable();
    v
}

#[test]
fn doo_sabin_is_the_tensor_chaikin_square() {
    // Chaikin weights (3, 1)/4 in each direction; a vertex feeds the four
    // output points of each of its four faces.
    let chaikin = [3i64, 1];
    let mut expected: Vec<i64> = Vec::new();
    for _ in 0..4 {
        for a in chaikin {
            for b in chaikin {
                expected.push(a * b);
            }
        }
    }
    expected.sort_unstable();
    assert_eq!(impulse_response("AR", 16.0), expected);
}

#[test]
fn two_averagings_give_the_nine_point_vertex_stencil() {
    // Composing two face-centroid averages: 1/4 centre, 1/8 edge, 1/16 corner.
    let mut expected = vec![4, 2, 2, 2, 2, 1, 1, 1, 1];
    expected.sort_unstable();
    assert_eq!(impulse_response("AA", 16.0), expected);
}

#[test]
fn mid_edge_twice_spreads_with_halves_and_quarters() {
    // Each V round hands a vertex to its four edges with weight 1/2, so the
    // impulse mass doubles per round.
    let r = impulse_response("VV", 4.0);
    assert!(r.iter().all(|&x| x == 1 || x == 2), "{r:?}");
    assert_eq!(r.iter().sum::<i64>(), 16);
}

fn dense_spectrum(word: &str, m: usize) -> Vec<f64> {
    let s = build_subdivision_matrix(&parse_word(word).unwrap(), m, None).unwrap();
    let mut mags: Vec<f64> = eigenvalues_real(&s.dense()).unwrap().iter().map(|z| z.norm()).collect();
    mags.sort_by(|a, b| b.partial_cmp(a).unwrap());
    mags
}

#[test]
fn subdominant_eigenvalue_matches_a_dense_solve() {
    for (word, m) in [("AAR", 5), ("VAV", 7), ("AAR", 3)] {
        let c = certify_extraordinary(&parse_word(word).unwrap(), m, &AnalysisConfig::default()).unwrap();
        let lambda = c.evidence("lambda").unwrap().as_f64().unwrap();
        let mags = dense_spectrum(word, m);
        assert!((mags[0] - 1.0).abs() < 1e-9, "{word} m={m}: dominant {}", mags[0]);
        assert!((mags[1] - lambda).abs() < 1e-8, "{word} m={m}: dense {} vs {lambda}", mags[1]);
        assert!((mags[2] - lambda).abs() < 1e-8, "{word} m={m}: lambda is double");
    }
}

#[test]
fn gcc_verdict_follows_the_dense_spectrum() {
    let c = certify_gcc(&parse_word("B(9/20,9/20)R").unwrap(), 5, &AnalysisConfig::default()).unwrap();
    let lambda = c.evidence("lambda").unwrap().as_f64().unwrap();
    let mu0 = c.evidence("mu0").unwrap()["abs"].as_f64().unwrap();
    let mags = dense_spectrum("B(9/20,9/20)R", 5);
    assert!(mags.iter().filter(|x| (**x - lambda).abs() < 1e-8).count() >= 2);
    assert!(mags.iter().any(|x| (x - mu0).abs() < 1e-8));
    assert_eq!(c.verdict.is_certified(), lambda > mu0 + 1e-9);
}
