//! Words acting on the regular grid `Z^2`: output lattices and exact masks.
//!
//! Positions are kept in input-grid coordinates. Every operator maps the
//! current lattice `offset + Z b1 + Z b2` to a new one; an output vertex's
//! mask is found by walking back through the operators.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::operators::word::{Factor, OperatorWord};
use crate::rational::{exact, rat, Rational};

pub type Point = [Rational; 2];

fn add(a: Point, b: Point) -> Point {
    [a[0] + b[0], a[1] + b[1]]
}

fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

fn scale(a: Point, s: Rational) -> Point {
    [a[0] * s, a[1] * s]
}

fn half(a: Point) -> Point {
    scale(a, rat(1, 2))
}

/// `offset + Z b1 + Z b2`, edges along `b1` and `b2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lattice {
    #[serde(serialize_with = "exact::ser")]
    pub offset: Point,
    #[serde(serialize_with = "exact::ser")]
    pub b1: Point,
    #[serde(serialize_with = "exact::ser")]
    pub b2: Point,
}

impl Lattice {
    pub fn unit() -> Self {
        Self { offset: [rat(0, 1), rat(0, 1)], b1: [rat(1, 1), rat(0, 1)], b2: [rat(0, 1), rat(1, 1)] }
    }

    pub fn point(&self, i: [i64; 2]) -> Point {
        add(self.offset, add(scale(self.b1, rat(i[0] as i128, 1)), scale(self.b2, rat(i[1] as i128, 1))))
    }

    /// Coordinates of `p` in the basis `b1, b2` relative to the offset.
    pub fn coords(&self, p: Point) -> Point {
        let d = sub(p, self.offset);
        let det = self.b1[0] * self.b2[1] - self.b1[1] * self.b2[0];
        [(d[0] * self.b2[1] - d[1] * self.b2[0]) / det, (self.b1[0] * d[1] - self.b1[1] * d[0]) / det]
    }

    /// `|b1|^2`.
    pub fn scale_sq(&self) -> Rational {
        self.b1[0] * self.b1[0] + self.b1[1] * self.b1[1]
    }

    /// Whether the basis vectors are axis-parallel of equal length, i.e.
    /// the unit grid scaled and moved by a grid symmetry.
    pub fn axis_aligned(&self) -> bool {
        let parallel = (self.b1[1].is_zero() && self.b2[0].is_zero()) || (self.b1[0].is_zero() && self.b2[1].is_zero());
        parallel && self.scale_sq() == self.b2[0] * self.b2[0] + self.b2[1] * self.b2[1]
    }

    fn after(&self, f: &Factor) -> Lattice {
        match f {
            Factor::R => Lattice { offset: self.offset, b1: half(self.b1), b2: half(self.b2) },
            Factor::A => Lattice { offset: add(self.offset, half(add(self.b1, self.b2))), ..*self },
            Factor::V => Lattice {
                offset: add(self.offset, half(self.b1)),
                b1: half(add(self.b1, self.b2)),
                b2: half(sub(self.b2, self.b1)),
            },
            Factor::B(_) => *self,
        }
    }
}

fn is_int(x: &Rational) -> bool {
    x.is_integer()
}

fn is_half(x: &Rational) -> bool {
    (*x * rat(2, 1)).is_integer() && !x.is_integer()
}

/// Parents of `p` under factor `f`, which maps `prev` to the next lattice.
fn parents(f: &Factor, prev: &Lattice, p: Point) -> Result<Vec<(Point, Rational)>> {
    let quarter = rat(1, 4);
    let halfw = rat(1, 2);
    let hb1 = half(prev.b1);
    let hb2 = half(prev.b2);
    let c = prev.coords(p);
    let off = || Error::Structural(format!("point {p:?} is not on the lattice produced by {}", f.letter()));
    Ok(match f {
        Factor::A => vec![
            (add(add(p, hb1), hb2), quarter),
            (add(sub(p, hb1), hb2), quarter),
            (sub(add(p, hb1), hb2), quarter),
            (sub(sub(p, hb1), hb2), quarter),
        ],
        Factor::R => match (is_int(&c[0]), is_int(&c[1])) {
            (true, true) => vec![(p, Rational::one())],
            (false, true) if is_half(&c[0]) => vec![(add(p, hb1), halfw), (sub(p, hb1), halfw)],
            (true, false) if is_half(&c[1]) => vec![(add(p, hb2), halfw), (sub(p, hb2), halfw)],
            (false, false) if is_half(&c[0]) && is_half(&c[1]) => vec![
                (add(add(p, hb1), hb2), quarter),
                (add(sub(p, hb1), hb2), quarter),
                (sub(add(p, hb1), hb2), quarter),
                (sub(sub(p, hb1), hb2), quarter),
            ],
            _ => return Err(off()),
        },
        Factor::V => match (is_int(&c[0]), is_int(&c[1])) {
            (false, true) if is_half(&c[0]) => vec![(add(p, hb1), halfw), (sub(p, hb1), halfw)],
            (true, false) if is_half(&c[1]) => vec![(add(p, hb2), halfw), (sub(p, hb2), halfw)],
            _ => return Err(off()),
        },
        Factor::B(params) => {
            let (alpha, beta) = params
                .params(4)
                .ok_or_else(|| Error::InvalidParameter("no B parameters for valence 4".into()))?;
            let gamma = Rational::one() - alpha - beta;
            let mut v = vec![(p, alpha)];
            for d in [prev.b1, prev.b2, scale(prev.b1, rat(-1, 1)), scale(prev.b2, rat(-1, 1))] {
                v.push((add(p, d), beta * quarter));
            }
            for (s1, s2) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                let d = add(scale(prev.b1, rat(s1, 1)), scale(prev.b2, rat(s2, 1)));
                v.push((add(p, d), gamma * quarter));
            }
            v
        }
    })
}

/// A word acting on `Z^2`, with memoised masks.
pub struct GridMap {
    factors: Vec<Factor>,
    /// `lattices[t]` is the lattice after `t` factors.
    lattices: Vec<Lattice>,
    memo: HashMap<(usize, Point), BTreeMap<[i64; 2], Rational>>,
}

impl GridMap {
    pub fn new(word: &OperatorWord) -> Self {
        let factors: Vec<Factor> = word.application_order().cloned().collect();
        let mut lattices = vec![Lattice::unit()];
        for f in &factors {
            let next = lattices.last().unwrap().after(f);
            lattices.push(next);
        }
        Self { factors, lattices, memo: HashMap::new() }
    }

    pub fn output(&self) -> Lattice {
        *self.lattices.last().unwrap()
    }

    /// Weights of the input vertices for the output vertex with index `i`.
    pub fn mask(&mut self, i: [i64; 2]) -> Result<BTreeMap<[i64; 2], Rational>> {
        let p = self.output().point(i);
        self.mask_at(self.factors.len(), p)
    }

    fn mask_at(&mut self, level: usize, p: Point) -> Result<BTreeMap<[i64; 2], Rational>> {
        if level == 0 {
            if !(is_int(&p[0]) && is_int(&p[1])) {
                return Err(Error::Structural(format!("{p:?} is not a grid vertex")));
            }
            let q = [p[0].to_integer() as i64, p[1].to_integer() as i64];
            return Ok(BTreeMap::from([(q, Rational::one())]));
        }
        if let Some(m) = self.memo.get(&(level, p)) {
            return Ok(m.clone());
        }
        let f = self.factors[level - 1].clone();
        let prev = self.lattices[level - 1];
        let mut out: BTreeMap<[i64; 2], Rational> = BTreeMap::new();
        for (q, w) in parents(&f, &prev, p)? {
            if w.is_zero() {
                continue;
            }
            for (k, x) in self.mask_at(level - 1, q)? {
                *out.entry(k).or_insert_with(Rational::zero) += w * x;
            }
        }
        out.retain(|_, w| !w.is_zero());
        self.memo.insert((level, p), out.clone());
        Ok(out)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Mask {
    /// Output index of the representative vertex.
    pub index: [i64; 2],
    #[serde(serialize_with = "exact::ser")]
    pub position: Point,
    #[serde(serialize_with = "exact::ser")]
    pub weights: Vec<([i64; 2], Rational)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RegularStencil {
    pub word: String,
    pub lattice: Lattice,
    /// `sigma^2 = |b1|^2`.
    #[serde(serialize_with = "exact::ser")]
    pub scale_sq: Rational,
    /// Output lattice rotated against the input grid (odd `v`).
    pub rotated: bool,
    /// One mask per class of output vertices modulo integer translations.
    pub masks: Vec<Mask>,
}

impl RegularStencil {
    pub fn is_stochastic(&self) -> bool {
        self.masks.iter().all(|m| {
            m.weights.iter().all(|(_, w)| !w.is_negative())
                && m.weights.iter().fold(Rational::zero(), |a, (_, w)| a + w) == Rational::one()
        })
    }

    /// Matches `sigma^2 = 2^(-2r - v)`; for odd `v` the basis is rotated.
    pub fn lattice_map_ok(&self, word: &OperatorWord) -> bool {
        let e = 2 * word.r() as i32 + word.v() as i32;
        let expect = crate::rational::pow2(-e);
        self.scale_sq == expect && (self.rotated || self.lattice.axis_aligned())
    }
}

fn frac(x: Rational) -> Rational {
    x - x.floor()
}

pub fn regular_stencil(word: &OperatorWord) -> Result<RegularStencil> {
    let mut map = GridMap::new(word);
    let lattice = map.output();
    // Output vertices are periodic modulo Z^2 with period dividing the
    // lattice denominator; scan a box large enough to meet every class.
    let den = lattice
        .b1
        .iter()
        .chain(lattice.b2.iter())
        .chain(lattice.offset.iter())
        .map(|x| *x.denom())
        .fold(1i128, num_integer::lcm) as i64;
    let mut classes: BTreeMap<(Rational, Rational), Mask> = BTreeMap::new();
    for a in 0..2 * den {
        for b in 0..2 * den {
            let i = [a, b];
            let p = lattice.point(i);
            let key = (frac(p[0]), frac(p[1]));
            if classes.contains_key(&key) {
                continue;
            }
            let weights = map.mask(i)?.into_iter().collect();
            classes.insert(key, Mask { index: i, position: p, weights });
        }
    }
    Ok(RegularStencil {
        word: word.to_string(),
        lattice,
        scale_sq: lattice.scale_sq(),
        rotated: !lattice.axis_aligned(),
        masks: classes.into_values().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::word::parse_word;

    fn weights(s: &RegularStencil) -> Vec<Vec<Rational>> {
        s.masks.iter().map(|m| m.weights.iter().map(|(_, w)| *w).collect()).collect()
    }

    #[test]
    fn averaging_is_a_face_centroid() {
        let s = regular_stencil(&parse_word("A").unwrap()).unwrap();
        assert_eq!(s.masks.len(), 1);
        assert_eq!(weights(&s)[0], vec![rat(1, 4); 4]);
        assert_eq!(s.lattice.offset, [rat(1, 2), rat(1, 2)]);
    }

    #[test]
    fn doo_sabin_masks() {
        let s = regular_stencil(&parse_word("AR").unwrap()).unwrap();
        assert_eq!(s.masks.len(), 4);
        for w in weights(&s) {
            let mut w = w;
            w.sort();
            assert_eq!(w, vec![rat(1, 16), rat(3, 16), rat(3, 16), rat(9, 16)]);
        }
        assert!(s.is_stochastic());
    }

    #[test]
    fn two_mid_edge_rounds_halve_the_grid() {
        let w = parse_word("VV").unwrap();
        let s = regular_stencil(&w).unwrap();
        assert_eq!(s.scale_sq, rat(1, 4));
        assert!(!s.rotated);
        assert!(s.lattice_map_ok(&w));
        let one = regular_stencil(&parse_word("V").unwrap()).unwrap();
        assert!(one.rotated);
        assert_eq!(one.scale_sq, rat(1, 2));
    }

    #[test]
    fn restricted_b_is_two_averagings() {
        let b = regular_stencil(&parse_word("B(1/3,1/3)R").unwrap()).unwrap();
        let a = regular_stencil(&parse_word("AAR").unwrap()).unwrap();
        assert_eq!(weights(&b), weights(&a));
    }

    #[test]
    fn catmull_clark_vertex_mask() {
        let s = regular_stencil(&parse_word("AAR").unwrap()).unwrap();
        let vertex = s.masks.iter().find(|m| m.position[0].is_integer() && m.position[1].is_integer()).unwrap();
        let centre = vertex.weights.iter().find(|(k, _)| [k[0] as i128, k[1] as i128] == [vertex.position[0].to_integer(), vertex.position[1].to_integer()]).unwrap();
        assert_eq!(centre.1, rat(9, 16));
    }
}
