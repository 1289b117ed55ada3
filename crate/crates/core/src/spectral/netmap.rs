//! One round of a word as an exact map between ringnet indices.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::mesh::param::Q;
use crate::mesh::ringnet::{topological_net, NetIndex, NetKind};
use crate::operators::net::{crop_schedule, output_indices, output_scale, trace_word, Trace};
use crate::operators::word::OperatorWord;
use crate::rational::Rational;

/// Rows of one round of `word` around an extraordinary element of valence
/// `m`, for all output indices up to grid ring `radius`.
#[derive(Debug, Clone)]
pub struct NetMap {
    pub word: OperatorWord,
    pub m: usize,
    pub kind: NetKind,
    pub radius: usize,
    pub input: Vec<NetIndex>,
    trace: Trace,
    outputs: HashMap<NetIndex, usize>,
}

impl NetMap {
    /// `word` must have even `v`; the net kind is the one the word maps to
    /// itself.
    pub fn build(word: &OperatorWord, m: usize, radius: usize) -> Result<Self> {
        let kind = word.stable_kind().ok_or_else(|| {
            Error::InvalidWord { word: word.to_string(), reason: "the word contains neither R nor V".into() }
        })?;
        let scale = output_scale(word, 1)?;
        let target = Q::from_integer(radius as i64 + 1) * scale;
        let mut margin = Q::from_integer(2);
        for _ in 0..4 {
            let (radii, input_radius) = crop_schedule(word, 1, target, margin);
            let depth = input_radius.ceil().to_integer() as usize + 2;
            let net = topological_net(m, depth, kind)?;
            let labels: Vec<_> = (0..net.index.len()).map(|v| net.param(v)).collect();
            let trace = trace_word(&net.mesh.topology, &labels, m, word, 1, Some(&radii))?;
            let mut outputs = HashMap::new();
            for (v, k) in output_indices(&trace, kind, scale).into_iter().enumerate() {
                if let Some(k) = k {
                    if k.grid_ring(kind) <= radius {
                        outputs.insert(k, v);
                    }
                }
            }
            if outputs.len() == count_indices(m, radius, kind) {
                return Ok(Self { word: word.clone(), m, kind, radius, input: net.index, trace, outputs });
            }
            margin *= 2;
        }
        Err(Error::Resource(format!(
            "could not resolve {radius} rings of {word} around valence {m}"
        )))
    }

    pub fn contains(&self, k: &NetIndex) -> bool {
        self.outputs.contains_key(k)
    }

    /// Exact weights of output `k` over input indices.
    pub fn row(&self, k: &NetIndex) -> Option<Vec<(NetIndex, Rational)>> {
        let v = *self.outputs.get(k)?;
        Some(self.trace.row(v).into_iter().map(|(c, w)| (self.input[c], w)).collect())
    }

    /// Input indices output `k` depends on.
    pub fn support(&self, k: &NetIndex) -> Option<Vec<NetIndex>> {
        let v = *self.outputs.get(k)?;
        Some(self.trace.support(v).into_iter().map(|c| self.input[c]).collect())
    }
}

pub fn count_indices(m: usize, radius: usize, kind: NetKind) -> usize {
    match kind {
        NetKind::Primal => 1 + m * radius * (radius + 1),
        NetKind::Dual => m * (radius + 1) * (radius + 1),
    }
}

/// All indices up to grid ring `radius`.
pub fn indices_within(m: usize, radius: usize, kind: NetKind) -> Vec<NetIndex> {
    let mut out = Vec::new();
    match kind {
        NetKind::Primal => {
            out.push(NetIndex::Center);
            for l in 0..m {
                for i in 1..=radius {
                    for j in 0..=radius {
                        out.push(NetIndex::seg(l, i, j));
                    }
                }
            }
        }
        NetKind::Dual => {
            for l in 0..m {
                for i in 1..=radius + 1 {
                    for j in 1..=radius + 1 {
                        out.push(NetIndex::seg(l, i, j));
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::word::parse_word;
    use crate::rational::rat;
    use num_traits::{One, Zero};

    #[test]
    fn rows_are_stochastic() {
        for w in ["VV", "AAR", "RVVR"] {
            let map = NetMap::build(&parse_word(w).unwrap(), 5, 3).unwrap();
            for k in indices_within(5, 3, map.kind) {
                let row = map.row(&k).unwrap();
                let s: Rational = row.iter().map(|e| e.1).sum();
                assert!(s.is_one(), "{w} {k:?}");
                assert!(row.iter().all(|e| e.1 > Rational::zero()));
            }
        }
    }

    #[test]
    fn midpoint_centre_row() {
        let map = NetMap::build(&parse_word("AAR").unwrap(), 5, 1).unwrap();
        let row = map.row(&NetIndex::Center).unwrap();
        let w = |k: NetIndex| row.iter().find(|e| e.0 == k).map(|e| e.1).unwrap_or_else(Rational::zero);
        for l in 1..5 {
            assert_eq!(w(NetIndex::seg(l, 1, 0)), w(NetIndex::seg(0, 1, 0)));
            assert_eq!(w(NetIndex::seg(l, 1, 1)), w(NetIndex::seg(0, 1, 1)));
        }
        let m4 = NetMap::build(&parse_word("AAR").unwrap(), 4, 1).unwrap();
        let row = m4.row(&NetIndex::Center).unwrap();
        let c = row.iter().find(|e| e.0 == NetIndex::Center).unwrap().1;
        assert_eq!(c, rat(9, 16));
    }
}
