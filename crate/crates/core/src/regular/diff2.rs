//! Second-order difference schemes on the regular grid.
//!
//! The second differences of a mesh are the six components
//! `d11, d31, d41, d22, d32, d42` (`dJK = nabla_J nabla_K`) with directions
//! `e1 = (1,0)`, `e2 = (0,1)`, `e3 = (1,1)`, `e4 = (-1,1)`. For an operator
//! that reproduces linear meshes every second difference of the output is a
//! finite combination of input second differences; such a combination is
//! found by minimising its coefficient sum with a linear program, then
//! rounded to exact rationals and checked exactly.

use std::collections::{BTreeMap, BTreeSet};

use microlp::{ComparisonOp, OptimizationDirection, Problem};
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::stencil::{regular_stencil, GridMap, RegularStencil};
use crate::error::{Error, Result};
use crate::operators::word::{parse_word, OperatorWord};
use crate::rational::{exact, rat, Rational};

pub const DIRECTIONS: [[i64; 2]; 4] = [[1, 0], [0, 1], [1, 1], [-1, 1]];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Component {
    D11,
    D31,
    D41,
    D22,
    D32,
    D42,
}

impl Component {
    pub const ALL: [Component; 6] =
        [Component::D11, Component::D31, Component::D41, Component::D22, Component::D32, Component::D42];

    /// `(J, K)` of `nabla_J nabla_K`, 1-based.
    pub fn pair(self) -> (usize, usize) {
        match self {
            Component::D11 => (1, 1),
            Component::D31 => (3, 1),
            Component::D41 => (4, 1),
            Component::D22 => (2, 2),
            Component::D32 => (3, 2),
            Component::D42 => (4, 2),
        }
    }

    /// Components sharing the inner difference.
    pub fn family(self) -> [Component; 3] {
        if self.pair().1 == 1 {
            [Component::D11, Component::D31, Component::D41]
        } else {
            [Component::D22, Component::D32, Component::D42]
        }
    }

    /// `nabla_J nabla_K c_p` as weights on grid vertices.
    pub fn functional(self, p: [i64; 2]) -> [([i64; 2], i64); 4] {
        let (j, k) = self.pair();
        let (ej, ek) = (DIRECTIONS[j - 1], DIRECTIONS[k - 1]);
        [
            (p, 1),
            ([p[0] - ek[0], p[1] - ek[1]], -1),
            ([p[0] - ej[0], p[1] - ej[1]], -1),
            ([p[0] - ej[0] - ek[0], p[1] - ej[1] - ek[1]], 1),
        ]
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Term {
    pub component: Component,
    /// Input grid index.
    pub at: [i64; 2],
    #[serde(serialize_with = "exact::ser")]
    pub coeff: Rational,
}

#[derive(Debug, Clone, Serialize)]
pub struct Row {
    /// Output index of the representative vertex of the class.
    pub output: [i64; 2],
    pub component: Component,
    pub terms: Vec<Term>,
    /// Sum of absolute coefficients.
    #[serde(serialize_with = "exact::ser")]
    pub sum: Rational,
}

#[derive(Debug, Clone, Serialize)]
pub struct Diff2Scheme {
    pub op: String,
    pub rows: Vec<Row>,
    /// Largest row sum, an upper bound for the norm of the difference
    /// scheme in the sup norm.
    #[serde(serialize_with = "exact::ser")]
    pub norm: Rational,
    /// Row sums that occur, in increasing order.
    #[serde(serialize_with = "exact::ser")]
    pub row_sums: Vec<Rational>,
}

/// The operators whose difference schemes are derived directly.
pub const BASE_CASES: [&str; 4] = ["A", "R", "V", "AR"];

/// Difference scheme of one of `A`, `R`, `V`, `AR`.
pub fn diff2_scheme(op: &str) -> Result<Diff2Scheme> {
    let letters: String = op.chars().filter(|c| !c.is_whitespace()).collect();
    if !BASE_CASES.contains(&letters.as_str()) {
        return Err(Error::NotABaseCase(op.to_string()));
    }
    derive_scheme(&parse_word(&letters)?)
}

/// Output second difference at output index `i` as weights on input vertices.
fn output_functional(map: &mut GridMap, component: Component, i: [i64; 2]) -> Result<BTreeMap<[i64; 2], Rational>> {
    let mut out: BTreeMap<[i64; 2], Rational> = BTreeMap::new();
    for (q, s) in component.functional(i) {
        for (k, w) in map.mask(q)? {
            *out.entry(k).or_insert_with(Rational::zero) += w * Rational::from_integer(s as i128);
        }
    }
    out.retain(|_, w| !w.is_zero());
    Ok(out)
}

/// Derives a difference scheme for any word mapping `Z^2` to a lattice.
pub fn derive_scheme(word: &OperatorWord) -> Result<Diff2Scheme> {
    let stencil = regular_stencil(word)?;
    let mut map = GridMap::new(word);
    let mut rows = Vec::new();
    for mask in &stencil.masks {
        for c in Component::ALL {
            let target = output_functional(&mut map, c, mask.index)?;
            let terms = match represent(&target, &c.family())? {
                Some(t) => t,
                None => represent(&target, &Component::ALL)?.ok_or_else(|| {
                    Error::Numerical(format!("no second-difference representation for {c:?} of {word}"))
                })?,
            };
            let sum = terms.iter().fold(Rational::zero(), |a, t| a + t.coeff.abs());
            rows.push(Row { output: mask.index, component: c, terms, sum });
        }
    }
    let norm = rows.iter().map(|r| r.sum).max().unwrap_or_else(Rational::zero);
    let row_sums: BTreeSet<Rational> = rows.iter().map(|r| r.sum).collect();
    Ok(Diff2Scheme { op: word.to_string(), rows, norm, row_sums: row_sums.into_iter().collect() })
}

/// Minimal-sum representation of `target` by the given components, or
/// `None` if there is none near its support.
fn represent(target: &BTreeMap<[i64; 2], Rational>, allowed: &[Component]) -> Result<Option<Vec<Term>>> {
    if target.is_empty() {
        return Ok(Some(Vec::new()));
    }
    let lo = [0, 1].map(|a| target.keys().map(|k| k[a]).min().unwrap() - 1);
    let hi = [0, 1].map(|a| target.keys().map(|k| k[a]).max().unwrap() + 2);
    let mut unknowns = Vec::new();
    for x in lo[0]..=hi[0] {
        for y in lo[1]..=hi[1] {
            for &c in allowed {
                unknowns.push((c, [x, y]));
            }
        }
    }
    // Integer right-hand side keeps the flow-like programs integral.
    let scale = target.values().fold(1i128, |a, w| num_integer::lcm(a, *w.denom()));
    let mut rows: BTreeMap<[i64; 2], BTreeMap<usize, i64>> = BTreeMap::new();
    for (u, (c, p)) in unknowns.iter().enumerate() {
        for (q, s) in c.functional(*p) {
            *rows.entry(q).or_default().entry(u).or_insert(0) += s;
        }
    }
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<_> = unknowns
        .iter()
        .map(|_| (lp.add_var(1.0, (0.0, f64::INFINITY)), lp.add_var(1.0, (0.0, f64::INFINITY))))
        .collect();
    for q in target.keys() {
        if !rows.contains_key(q) {
            return Ok(None);
        }
    }
    for (q, entries) in &rows {
        let rhs = target.get(q).map(|w| (*w * Rational::from_integer(scale)).to_integer() as f64).unwrap_or(0.0);
        let mut expr = Vec::with_capacity(2 * entries.len());
        for (&u, &s) in entries.iter().filter(|(_, s)| **s != 0) {
            expr.push((vars[u].0, s as f64));
            expr.push((vars[u].1, -s as f64));
        }
        lp.add_constraint(expr.as_slice(), ComparisonOp::Eq, rhs);
    }
    let solution = match lp.solve() {
        Ok(outcome) => outcome
            .into_solution()
            .map_err(|e| Error::Numerical(format!("linear program interrupted: {e:?}")))?,
        Err(microlp::Error::Infeasible) => return Ok(None),
        Err(e) => return Err(Error::Numerical(format!("linear program failed: {e:?}"))),
    };
    let mut terms = Vec::new();
    for (u, (c, p)) in unknowns.iter().enumerate() {
        let x = solution.var_value(vars[u].0) - solution.var_value(vars[u].1);
        if x.abs() < 1e-9 {
            continue;
        }
        let coeff = nearest_rational(x, 1 << 12)? / Rational::from_integer(scale);
        terms.push(Term { component: *c, at: *p, coeff });
    }
    // Exact check of the rounded representation.
    let mut acc: BTreeMap<[i64; 2], Rational> = BTreeMap::new();
    for t in &terms {
        for (q, s) in t.component.functional(t.at) {
            *acc.entry(q).or_insert_with(Rational::zero) += t.coeff * Rational::from_integer(s as i128);
        }
    }
    acc.retain(|_, w| !w.is_zero());
    if &acc != target {
        return Err(Error::Numerical("rounded difference representation is not exact".into()));
    }
    Ok(Some(terms))
}

/// Closest fraction with denominator at most `max_den` (continued fractions).
fn nearest_rational(x: f64, max_den: i128) -> Result<Rational> {
    let approx = Rational::approximate_float(x).ok_or_else(|| Error::Numerical(format!("cannot rationalise {x}")))?;
    if *approx.denom() <= max_den {
        return Ok(approx);
    }
    let (mut h0, mut h1, mut k0, mut k1) = (0i128, 1i128, 1i128, 0i128);
    let mut y = x;
    let mut best = rat(x.round() as i128, 1);
    for _ in 0..64 {
        let a = y.floor();
        let ai = a as i128;
        let (h2, k2) = (ai * h1 + h0, ai * k1 + k0);
        if k2 > max_den {
            break;
        }
        best = rat(h2, k2);
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if (y - a).abs() < 1e-12 {
            break;
        }
        y = 1.0 / (y - a);
    }
    Ok(best)
}

/// Second differences of the grid function `c` at `p`.
fn second(c: &impl Fn([i64; 2]) -> f64, comp: Component, p: [i64; 2]) -> f64 {
    comp.functional(p).iter().map(|(q, s)| *s as f64 * c(*q)).sum()
}

/// Largest deviation between both sides of `(U C)'' = U'' C''` over random
/// bounded meshes, evaluated at output vertices of every class and a few
/// translates.
pub fn verify_eq1(op: &str, trials: usize, seed: u64) -> Result<f64> {
    let scheme = diff2_scheme(op)?;
    let word = parse_word(op)?;
    let stencil: RegularStencil = regular_stencil(&word)?;
    let mut map = GridMap::new(&word);
    let lattice = stencil.lattice;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let size = 24i64;
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let values: Vec<f64> = (0..(2 * size + 1) * (2 * size + 1)).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let c = |q: [i64; 2]| {
            let (x, y) = (q[0] + size, q[1] + size);
            if (0..=2 * size).contains(&x) && (0..=2 * size).contains(&y) {
                values[(x * (2 * size + 1) + y) as usize]
            } else {
                0.0
            }
        };
        for row in &scheme.rows {
            for shift in [[0i64, 0i64], [1, 0], [0, 1], [-2, 3]] {
                // Output index whose position is the representative's shifted
                // by the integer vector `shift`.
                let base = lattice.point(row.output);
                let target = [base[0] + rat(shift[0] as i128, 1), base[1] + rat(shift[1] as i128, 1)];
                let co = lattice.coords(target);
                if !(co[0].is_integer() && co[1].is_integer()) {
                    return Err(Error::Structural("integer translate left the output lattice".into()));
                }
                let i = [co[0].to_integer() as i64, co[1].to_integer() as i64];
                let lhs: f64 = output_functional(&mut map, row.component, i)?
                    .iter()
                    .map(|(q, w)| w.to_f64().unwrap_or(f64::NAN) * c(*q))
                    .sum();
                let rhs: f64 = row
                    .terms
                    .iter()
                    .map(|t| {
                        t.coeff.to_f64().unwrap_or(f64::NAN)
                            * second(&c, t.component, [t.at[0] + shift[0], t.at[1] + shift[1]])
                    })
                    .sum();
                worst = worst.max((lhs - rhs).abs());
            }
        }
    }
    Ok(worst)
}

/// Norms of the four base difference schemes, computed once.
pub fn base_norms() -> Result<&'static BTreeMap<&'static str, Rational>> {
    static NORMS: std::sync::OnceLock<std::result::Result<BTreeMap<&'static str, Rational>, Error>> =
        std::sync::OnceLock::new();
    NORMS
        .get_or_init(|| BASE_CASES.iter().map(|op| diff2_scheme(op).map(|s| (*op, s.norm))).collect())
        .as_ref()
        .map_err(Clone::clone)
}

#[derive(Debug, Clone, Serialize)]
pub struct Diff2Bound {
    /// Bound on the difference scheme of `U^2` as a product of base norms.
    #[serde(serialize_with = "exact::ser")]
    pub bound: Rational,
    /// The factors used, e.g. `["AR", "R", "A", ...]`.
    pub factors: Vec<String>,
    /// `2^(-2v-2r)` for `v >= 1`, `(3/4) 2^(-2r)` for `v = 0`.
    #[serde(serialize_with = "exact::ser")]
    pub closed_form: Rational,
}

/// Letters of `word` with every `B` replaced by `AA`; `None` if some `B`
/// does not act like `A^2` on the regular grid.
pub fn regular_letters(word: &OperatorWord) -> Option<String> {
    let mut out = String::new();
    for f in &word.factors {
        match f {
            crate::operators::word::Factor::B(p) => {
                if !p.is_restricted() {
                    return None;
                }
                out.push_str("AA");
            }
            other => out.push(other.letter()),
        }
    }
    Some(out)
}

/// Submultiplicative bound on the difference scheme of `U^2`.
pub fn compose_diff2_bound(word: &OperatorWord) -> Result<Diff2Bound> {
    if let crate::operators::word::WordClass::Invalid { reason } = word.classify() {
        return Err(Error::InvalidWord { word: word.to_string(), reason });
    }
    let letters = regular_letters(word).ok_or_else(|| {
        Error::InvalidParameter(format!("{word}: B with non-regular parameters at valence 4 is not covered"))
    })?;
    let norms = base_norms()?;
    let (a, v, r) = (
        letters.matches('A').count() as i32,
        letters.matches('V').count() as i32,
        letters.matches('R').count() as i32,
    );
    let square: Vec<char> = letters.chars().chain(letters.chars()).collect();
    let mut factors = Vec::new();
    let mut k = 0;
    let mut paired = false;
    while k < square.len() {
        if v == 0 && !paired && k + 1 < square.len() && square[k] == 'A' && square[k + 1] == 'R' {
            factors.push("AR".to_string());
            paired = true;
            k += 2;
        } else {
            factors.push(square[k].to_string());
            k += 1;
        }
    }
    let bound = factors.iter().fold(Rational::one(), |acc, f| acc * norms[f.as_str()]);
    let closed_form = if v >= 1 {
        crate::rational::pow2(-2 * v - 2 * r)
    } else {
        debug_assert!(a >= 1 && r >= 1);
        rat(3, 4) * crate::rational::pow2(-2 * r)
    };
    Ok(Diff2Bound { bound, factors, closed_form })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_norms_match() {
        assert_eq!(diff2_scheme("A").unwrap().norm, rat(1, 1));
        assert_eq!(diff2_scheme("R").unwrap().norm, rat(1, 2));
        assert!(diff2_scheme("V").unwrap().norm <= rat(1, 2));
        let ar = diff2_scheme("AR").unwrap();
        assert!(ar.norm <= rat(3, 8));
        assert!(ar.row_sums.contains(&rat(4, 16)) && ar.row_sums.contains(&rat(6, 16)));
    }

    #[test]
    fn averaging_scheme_is_averaging() {
        let s = diff2_scheme("A").unwrap();
        for row in &s.rows {
            assert_eq!(row.sum, rat(1, 1));
        }
    }

    #[test]
    fn not_a_base_case() {
        assert!(matches!(diff2_scheme("AAR"), Err(Error::NotABaseCase(_))));
    }

    #[test]
    fn eq1_holds() {
        for op in BASE_CASES {
            assert!(verify_eq1(op, 5, 7).unwrap() < 1e-10, "{op}");
        }
    }

    #[test]
    fn linear_meshes_have_no_second_differences() {
        let word = parse_word("R").unwrap();
        let mut map = GridMap::new(&word);
        for c in Component::ALL {
            let f = output_functional(&mut map, c, [3, 2]).unwrap();
            let on_linear: Rational = f.iter().map(|(q, w)| *w * rat(2 * q[0] as i128 + 3 * q[1] as i128, 1)).sum();
            assert!(on_linear.is_zero());
        }
    }

    #[test]
    fn bounds_from_the_counts() {
        let b = |w: &str| compose_diff2_bound(&parse_word(w).unwrap()).unwrap();
        assert_eq!(b("VAV").closed_form, rat(1, 16));
        assert_eq!(b("AAR").closed_form, rat(3, 16));
        assert_eq!(b("V").closed_form, rat(1, 4));
        assert!(b("AAR").bound <= rat(3, 16));
        assert!(compose_diff2_bound(&parse_word("R").unwrap()).is_err());
    }
}
