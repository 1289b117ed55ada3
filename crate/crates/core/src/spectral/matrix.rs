//! Subdivision matrices on c.rho-nets.

use std::collections::{BTreeSet, HashMap};
use std::ops::Range;

use nalgebra::DMatrix;
use num_traits::{One, Zero};

use super::core::{label_core, CoreLabeling};
use super::netmap::NetMap;
use crate::error::{Error, Result};
use crate::mesh::ringnet::{NetIndex, NetKind};
use crate::operators::word::{OperatorWord, WordClass};
use crate::rational::{format_rational, to_f64, Rational};

/// Row ranges of the blocks `[C, B, A, c.2, ..., c.rho]`.
#[derive(Debug, Clone, serde::Serialize)]
pub struct Blocks {
    pub core: Range<usize>,
    pub b: Range<usize>,
    pub a: Range<usize>,
    pub outer: Vec<Range<usize>>,
}

impl Blocks {
    pub fn all(&self) -> Vec<Range<usize>> {
        let mut v = vec![self.core.clone(), self.b.clone(), self.a.clone()];
        v.extend(self.outer.iter().cloned());
        v
    }

    fn block_of(&self, r: usize) -> usize {
        self.all().iter().position(|b| b.contains(&r)).expect("row inside the matrix")
    }
}

#[derive(Debug, Clone)]
pub struct SubdivisionMatrix {
    /// The analysed word (squared when the given word has odd `v`).
    pub word: OperatorWord,
    pub m: usize,
    pub kind: NetKind,
    pub rho: usize,
    pub order: Vec<NetIndex>,
    pub blocks: Blocks,
    pub rows: Vec<Vec<(usize, Rational)>>,
    pub labeling: CoreLabeling,
    position: HashMap<NetIndex, usize>,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct StructureCheck {
    pub stochastic: bool,
    pub nonnegative: bool,
    pub max_row_sum_error: f64,
    pub block_triangular: bool,
    pub forbidden_entries: usize,
    pub rotation_commutes: bool,
}

impl SubdivisionMatrix {
    pub fn n(&self) -> usize {
        self.order.len()
    }

    pub fn position(&self, k: &NetIndex) -> Option<usize> {
        self.position.get(k).copied()
    }

    pub fn dense(&self) -> DMatrix<f64> {
        let n = self.n();
        let mut s = DMatrix::zeros(n, n);
        for (r, row) in self.rows.iter().enumerate() {
            for (c, w) in row {
                s[(r, *c)] = to_f64(w);
            }
        }
        s
    }

    pub fn entry(&self, r: usize, c: usize) -> Rational {
        self.rows[r].iter().find(|e| e.0 == c).map(|e| e.1).unwrap_or_else(Rational::zero)
    }

    pub fn block(&self, rows: Range<usize>, cols: Range<usize>) -> DMatrix<f64> {
        let mut b = DMatrix::zeros(rows.len(), cols.len());
        for (i, r) in rows.clone().enumerate() {
            for (c, w) in &self.rows[r] {
                if cols.contains(c) {
                    b[(i, c - cols.start)] = to_f64(w);
                }
            }
        }
        b
    }

    /// Applies `S` to values on the c.rho-net.
    pub fn apply<T>(&self, x: &[T]) -> Vec<T>
    where
        T: Copy + Zero + std::ops::Mul<f64, Output = T>,
    {
        self.rows
            .iter()
            .map(|row| row.iter().fold(T::zero(), |acc, (c, w)| acc + x[*c] * to_f64(w)))
            .collect()
    }

    /// Exact checks of stochasticity, block structure and rotation symmetry.
    pub fn check_structure(&self) -> StructureCheck {
        let mut nonnegative = true;
        let mut exact_rows = true;
        let mut max_err: f64 = 0.0;
        for row in &self.rows {
            let s: Rational = row.iter().map(|e| e.1).sum();
            exact_rows &= s.is_one();
            max_err = max_err.max((row.iter().map(|e| to_f64(&e.1)).sum::<f64>() - 1.0).abs());
            nonnegative &= row.iter().all(|e| e.1 >= Rational::zero());
        }
        let mut forbidden = 0;
        for (r, row) in self.rows.iter().enumerate() {
            let br = self.blocks.block_of(r);
            for (c, _) in row {
                let bc = self.blocks.block_of(*c);
                if bc > br || (br >= 3 && bc == br) {
                    forbidden += 1;
                }
            }
        }
        StructureCheck {
            stochastic: exact_rows && nonnegative,
            nonnegative,
            max_row_sum_error: max_err,
            block_triangular: forbidden == 0,
            forbidden_entries: forbidden,
            rotation_commutes: self.commutes_with_rotation(),
        }
    }

    /// `S[P k][P c] = S[k][c]` for the segment rotation `P`, exactly.
    pub fn commutes_with_rotation(&self) -> bool {
        for (r, row) in self.rows.iter().enumerate() {
            let Some(pr) = self.position(&self.order[r].rotated(1, self.m)) else { return false };
            for (c, w) in row {
                let Some(pc) = self.position(&self.order[*c].rotated(1, self.m)) else { return false };
                if self.entry(pr, pc) != *w {
                    return false;
                }
            }
        }
        true
    }

    /// Sparse triplets `row col value` with exact values.
    pub fn triplets(&self) -> String {
        let mut out = String::new();
        for (r, row) in self.rows.iter().enumerate() {
            for (c, w) in row {
                out.push_str(&format!("{r} {c} {}\n", format_rational(w)));
            }
        }
        out
    }

    /// The same matrix with its exact rows replaced, for negative controls.
    pub fn with_rows(&self, rows: Vec<Vec<(usize, Rational)>>) -> Self {
        Self { rows, ..self.clone() }
    }
}

/// Support reach of the word in rings: how far beyond the scaled position
/// of an output its inputs can lie.
fn support_reach(map: &NetMap, sigma: f64) -> usize {
    let mut reach = 0.0f64;
    for k in super::netmap::indices_within(map.m, map.radius, map.kind) {
        let base = k.grid_ring(map.kind) as f64 * sigma;
        if let Some(s) = map.support(&k) {
            for c in s {
                reach = reach.max(c.grid_ring(map.kind) as f64 - base);
            }
        }
    }
    reach.ceil().max(0.0) as usize
}

/// The word actually analysed: odd-`v` words are squared.
pub fn analysed_word(word: &OperatorWord) -> Result<OperatorWord> {
    if let WordClass::Invalid { reason } = word.classify() {
        return Err(Error::InvalidWord { word: word.to_string(), reason });
    }
    Ok(word.even_power())
}

/// Smallest ring count the closure check starts from.
pub fn rho_min(word: &OperatorWord, m: usize) -> Result<usize> {
    let w = analysed_word(word)?;
    let map = NetMap::build(&w, m, 4)?;
    Ok(support_reach(&map, w.sigma()) + 2)
}

/// Assembles `S` for `word` at valence `m`. With `rho = None` the ring count
/// starts at the support reach plus two and grows until the c.rho-net is
/// closed under one round; an explicit `rho` that is not closed is an error.
pub fn build_subdivision_matrix(word: &OperatorWord, m: usize, rho: Option<usize>) -> Result<SubdivisionMatrix> {
    if m < 3 {
        return Err(Error::InvalidParameter(format!("valence must be at least 3, got {m}")));
    }
    let w = analysed_word(word)?;
    let mut radius = 4;
    let mut map = NetMap::build(&w, m, radius)?;
    let start = match rho {
        Some(r) => r.max(1),
        None => support_reach(&map, w.sigma()) + 2,
    };
    let extra = if rho.is_some() { 0 } else { 4 };
    let labeling = loop {
        match label_core(&map, start + extra) {
            Ok(l) => {
                let need = l.max_grid_ring(start + extra);
                if need <= radius {
                    break l;
                }
                radius = need;
            }
            Err(Error::Resource(_)) if radius < 64 => radius *= 2,
            Err(e) => return Err(e),
        }
        map = NetMap::build(&w, m, radius)?;
    };
    for r in start..=start + extra {
        if let Some(s) = assemble(&map, &w, &labeling, r)? {
            return Ok(s);
        }
    }
    Err(Error::RingnetTooSmall(format!(
        "the c.{}-net of {w} at valence {m} is not closed under one round",
        start + extra
    )))
}

fn assemble(map: &NetMap, w: &OperatorWord, labeling: &CoreLabeling, rho: usize) -> Result<Option<SubdivisionMatrix>> {
    let mut order: Vec<NetIndex> = Vec::new();
    let push = |set: &[NetIndex], order: &mut Vec<NetIndex>| -> Range<usize> {
        let mut s = set.to_vec();
        s.sort_by_key(|k| (k.local(), k.segment()));
        let start = order.len();
        order.extend(s);
        start..order.len()
    };
    let core = push(&labeling.core, &mut order);
    let b = push(&labeling.others, &mut order);
    let a = push(&labeling.corners, &mut order);
    let outer: Vec<Range<usize>> = labeling.rings[1..rho].iter().map(|r| push(r, &mut order)).collect();
    let position: HashMap<NetIndex, usize> = order.iter().enumerate().map(|(p, k)| (*k, p)).collect();
    let members: BTreeSet<NetIndex> = order.iter().copied().collect();
    let mut rows = Vec::with_capacity(order.len());
    for k in &order {
        let row = map.row(k).ok_or_else(|| Error::Resource(format!("row of {k:?} is outside the traced net")))?;
        let mut out = Vec::with_capacity(row.len());
        for (c, wt) in row {
            if !members.contains(&c) {
                return Ok(None);
            }
            out.push((position[&c], wt));
        }
        out.sort_by_key(|e| e.0);
        rows.push(out);
    }
    Ok(Some(SubdivisionMatrix {
        word: w.clone(),
        m: map.m,
        kind: map.kind,
        rho,
        order,
        blocks: Blocks { core, b, a, outer },
        rows,
        labeling: labeling.clone(),
        position,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::word::parse_word;

    #[test]
    fn structure_of_small_words() {
        for w in ["VV", "VAV", "AAR"] {
            for m in [3, 5] {
                let s = build_subdivision_matrix(&parse_word(w).unwrap(), m, None).unwrap();
                let c = s.check_structure();
                assert!(c.stochastic, "{w} {m}");
                assert!(c.rotation_commutes, "{w} {m}");
                assert!(c.block_triangular, "{w} {m}: {} forbidden", c.forbidden_entries);
            }
        }
    }

    #[test]
    fn explicit_rho_too_small_is_reported() {
        let w = parse_word("AAR").unwrap();
        match build_subdivision_matrix(&w, 5, Some(1)) {
            Ok(s) => assert!(s.check_structure().stochastic),
            Err(e) => assert!(e.to_string().contains("increase")),
        }
    }
}
