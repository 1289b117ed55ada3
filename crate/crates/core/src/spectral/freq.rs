//! Discrete Fourier blocks of rotation-symmetric subdivision matrices.
//!
//! With `x[(r, l)] = y[r] w^(l f)`, `w = exp(2 pi i / m)`, the matrix acts on
//! `y` through `S_f[r, r'] = sum_l S[(r, 0), (r', l)] w^(l f)`. The centre
//! vertex is fixed by the rotation and only enters frequency 0.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::eigen::CMatrix;
use super::matrix::SubdivisionMatrix;
use crate::error::{Error, Result};
use crate::mesh::ringnet::NetIndex;
use crate::rational::to_f64;

#[derive(Debug, Clone)]
pub struct FrequencyBlocks {
    pub m: usize,
    /// Positions in `S` of the segment-0 representatives, in `S` order.
    pub reps: Vec<usize>,
    /// Position of the centre vertex in `S`, if the net is primal.
    pub center: Option<usize>,
    /// Representatives (plus the centre) that belong to the core.
    pub core_reps: usize,
    pub blocks: Vec<CMatrix>,
}

impl FrequencyBlocks {
    /// Block of frequency `f`; frequency 0 lists the centre first.
    pub fn block(&self, f: usize) -> &CMatrix {
        &self.blocks[f % self.m]
    }

    /// Size of the core part of block `f`.
    pub fn core_len(&self, f: usize) -> usize {
        self.core_reps + usize::from(f % self.m == 0 && self.center.is_some())
    }

    /// Block `f` restricted to the core.
    pub fn core_block(&self, f: usize) -> CMatrix {
        let n = self.core_len(f);
        self.block(f).view((0, 0), (n, n)).into_owned()
    }

    /// Frequency-`f` vector of `S` coordinates from block coordinates.
    pub fn expand(&self, s: &SubdivisionMatrix, f: usize, y: &[Complex64]) -> Vec<Complex64> {
        let mut x = vec![Complex64::new(0.0, 0.0); s.n()];
        let offset = usize::from(f % self.m == 0 && self.center.is_some());
        if offset == 1 {
            x[self.center.unwrap()] = y[0];
        }
        for (r, &p) in self.reps.iter().enumerate() {
            let k = s.order[p];
            for l in 0..self.m {
                let q = s.position(&k.rotated(l, self.m)).expect("rotation-closed net");
                x[q] = y[r + offset] * omega(self.m, l * f);
            }
        }
        x
    }
}

pub fn omega(m: usize, k: usize) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * (k % m) as f64 / m as f64)
}

pub fn frequency_decompose(s: &SubdivisionMatrix) -> Result<FrequencyBlocks> {
    if !s.commutes_with_rotation() {
        return Err(Error::Structural("subdivision matrix does not commute with the segment rotation".into()));
    }
    let m = s.m;
    let center = s.position(&NetIndex::Center);
    let reps: Vec<usize> = (0..s.n()).filter(|&p| s.order[p].segment() == Some(0)).collect();
    let core_reps = reps.iter().filter(|&&p| s.blocks.core.contains(&p)).count();
    // Orbit of every position: (representative number, segment).
    let mut orbit = vec![(usize::MAX, 0usize); s.n()];
    for (r, &p) in reps.iter().enumerate() {
        let k = s.order[p];
        for l in 0..m {
            let q = s.position(&k.rotated(l, m)).ok_or_else(|| Error::Structural(format!("{k:?} has no rotated copy")))?;
            orbit[q] = (r, l);
        }
    }
    let mut blocks = Vec::with_capacity(m);
    for f in 0..m {
        let offset = usize::from(f == 0 && center.is_some());
        let n = reps.len() + offset;
        let mut b = CMatrix::zeros(n, n);
        for (r, &p) in reps.iter().enumerate() {
            for (c, w) in &s.rows[p] {
                let w = to_f64(w);
                if Some(*c) == center {
                    if offset == 1 {
                        b[(r + 1, 0)] += Complex64::new(w, 0.0);
                    }
                } else {
                    let (rc, l) = orbit[*c];
                    b[(r + offset, rc + offset)] += omega(m, l * f) * w;
                }
            }
        }
        if let (1, Some(cp)) = (offset, center) {
            for (c, w) in &s.rows[cp] {
                let w = to_f64(w);
                if *c == cp {
                    b[(0, 0)] += Complex64::new(w, 0.0);
                } else {
                    b[(0, orbit[*c].0 + 1)] += Complex64::new(w, 0.0);
                }
            }
        }
        blocks.push(b);
    }
    Ok(FrequencyBlocks { m, reps, center, core_reps, blocks })
}

#[cfg(test)]
mod tests {
    use super::super::eigen::{eigenvalues, eigenvalues_real};
    use super::super::matrix::build_subdivision_matrix;
    use super::*;
    use crate::operators::word::parse_word;

    fn matched(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
        let mut used = vec![false; b.len()];
        a.len() == b.len()
            && a.iter().all(|x| {
                let best = (0..b.len()).filter(|&j| !used[j]).min_by(|&i, &j| (b[i] - x).norm().total_cmp(&(b[j] - x).norm()));
                match best {
                    Some(j) if (b[j] - x).norm() <= tol => {
                        used[j] = true;
                        true
                    }
                    _ => false,
                }
            })
    }

    #[test]
    fn block_spectra_reassemble_the_full_spectrum() {
        for (w, m) in [("AAR", 5), ("VAV", 3), ("VV", 6)] {
            let s = build_subdivision_matrix(&parse_word(w).unwrap(), m, None).unwrap();
            let fb = frequency_decompose(&s).unwrap();
            let mut union = Vec::new();
            for f in 0..m {
                union.extend(eigenvalues(fb.block(f)).unwrap());
            }
            let full = eigenvalues_real(&s.dense()).unwrap();
            assert!(matched(&union, &full, 1e-7), "{w} {m}");
            // Conjugate frequencies have conjugate spectra.
            let e1: Vec<Complex64> = eigenvalues(fb.block(1)).unwrap();
            let em: Vec<Complex64> = eigenvalues(fb.block(m - 1)).unwrap().iter().map(|z| z.conj()).collect();
            assert!(matched(&e1, &em, 1e-9), "{w} {m}");
        }
    }

    #[test]
    fn expand_gives_eigenvectors_of_s() {
        let s = build_subdivision_matrix(&parse_word("AAR").unwrap(), 5, None).unwrap();
        let fb = frequency_decompose(&s).unwrap();
        let d = super::super::eigen::dominant_dense(fb.block(1), 0).unwrap();
        let y: Vec<Complex64> = d.vector.iter().copied().collect();
        let x = fb.expand(&s, 1, &y);
        let sx = s.apply(&x);
        let err = sx.iter().zip(&x).map(|(a, b)| (a - b * d.value).norm()).fold(0.0, f64::max);
        assert!(err < 1e-10);
    }
}
