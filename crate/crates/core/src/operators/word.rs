//! Operator words: parsing, counts and classification.
//!
//! Grammar (whitespace is ignored):
//!
//! ```text
//! word   := item+
//! item   := atom exp?
//! exp    := '^' digits | superscript digits
//! atom   := 'A' | 'V' | 'R' | bspec | '(' word ')'
//! bspec  := 'B' '*'? '(' num ',' num ')' | 'B' '*'? '(' entry (';' entry)* ')'
//! entry  := (digits | '*') ':' num ',' num
//! ```
//!
//! Words are written like operator products: the rightmost factor is applied
//! first. `B(a,b)` uses `(a,b)` at every valence except 4, where the
//! regular values `(1/4, 1/2)` are kept; `B*(...)` applies the given values
//! at valence 4 as well, as does an explicit `4:` table entry.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::mesh::ringnet::NetKind;
use crate::rational::{format_rational, parse_rational, rat, Rational};

#[derive(Debug, Clone, PartialEq)]
pub struct BParams {
    pub table: BTreeMap<usize, (Rational, Rational)>,
    pub default: Option<(Rational, Rational)>,
    /// When false, valence 4 uses `(1/4, 1/2)` unless the table overrides it.
    pub star: bool,
}

impl BParams {
    pub fn constant(alpha: Rational, beta: Rational) -> Result<Self> {
        check_pair(alpha, beta, None)?;
        Ok(Self { table: BTreeMap::new(), default: Some((alpha, beta)), star: false })
    }

    pub fn params(&self, m: usize) -> Option<(Rational, Rational)> {
        if let Some(p) = self.table.get(&m) {
            return Some(*p);
        }
        if m == 4 && !self.star {
            return Some(regular_pair());
        }
        self.default
    }

    /// `alpha(4) = 1/4` and `beta(4) = 1/2`.
    pub fn is_restricted(&self) -> bool {
        self.params(4) == Some(regular_pair())
    }

    /// Same parameters at every valence, including 4.
    pub fn is_constant(&self) -> bool {
        let mut values: Vec<(Rational, Rational)> = self.table.values().copied().collect();
        values.extend(self.default);
        values.extend(self.params(4));
        values.windows(2).all(|w| w[0] == w[1]) && self.default.is_some()
    }
}

fn regular_pair() -> (Rational, Rational) {
    (rat(1, 4), rat(1, 2))
}

fn check_pair(alpha: Rational, beta: Rational, valence: Option<usize>) -> Result<()> {
    let at = match valence {
        Some(m) => format!("valence {m}"),
        None => "all valences".to_string(),
    };
    let zero = Rational::zero();
    let one = Rational::one();
    if alpha < zero || beta < zero || alpha >= one || beta >= one {
        return Err(Error::InvalidParameter(format!(
            "B parameters at {at} must lie in [0, 1): alpha = {}, beta = {}",
            format_rational(&alpha),
            format_rational(&beta)
        )));
    }
    let s = alpha + beta;
    if s <= zero || s >= one {
        return Err(Error::InvalidParameter(format!(
            "B parameters at {at} need 0 < alpha + beta < 1, got {}",
            format_rational(&s)
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub enum Factor {
    A,
    V,
    R,
    B(BParams),
}

impl Factor {
    pub fn letter(&self) -> char {
        match self {
            Factor::A => 'A',
            Factor::V => 'V',
            Factor::R => 'R',
            Factor::B(_) => 'B',
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorWord {
    /// Written order; the last factor is applied first.
    pub factors: Vec<Factor>,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
#[serde(tag = "class", rename_all = "kebab-case")]
pub enum WordClass {
    /// `A^(n-1) R`.
    MidpointClassic { degree: usize },
    /// Factors completely into `A`, `R`, `V^2` and `V A^l V`.
    VavScheme { factors: Vec<String> },
    GeneralMidpoint,
    GeneralizedCc { degree: usize, restricted: bool },
    Invalid { reason: String },
}

impl WordClass {
    pub fn is_vav(&self) -> bool {
        matches!(self, WordClass::MidpointClassic { .. } | WordClass::VavScheme { .. })
    }

    pub fn is_valid(&self) -> bool {
        !matches!(self, WordClass::Invalid { .. })
    }

    pub fn name(&self) -> &'static str {
        match self {
            WordClass::MidpointClassic { .. } => "midpoint",
            WordClass::VavScheme { .. } => "vav-scheme",
            WordClass::GeneralMidpoint => "general-midpoint",
            WordClass::GeneralizedCc { .. } => "generalized-catmull-clark",
            WordClass::Invalid { .. } => "invalid",
        }
    }
}

impl OperatorWord {
    pub fn parse(text: &str) -> Result<Self> {
        parse_word(text)
    }

    pub fn from_letters(letters: &str) -> Result<Self> {
        parse_word(letters)
    }

    pub fn count(&self, letter: char) -> usize {
        self.factors.iter().filter(|f| f.letter() == letter).count()
    }

    pub fn a(&self) -> usize {
        self.count('A')
    }

    pub fn v(&self) -> usize {
        self.count('V')
    }

    pub fn r(&self) -> usize {
        self.count('R')
    }

    pub fn has_b(&self) -> bool {
        self.count('B') > 0
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// Factors in the order they act on a mesh.
    pub fn application_order(&self) -> impl Iterator<Item = &Factor> {
        self.factors.iter().rev()
    }

    pub fn squared(&self) -> OperatorWord {
        let mut factors = self.factors.clone();
        factors.extend(self.factors.iter().cloned());
        OperatorWord { factors }
    }

    /// The word itself when `v` is even, otherwise its square.
    pub fn even_power(&self) -> OperatorWord {
        if self.v() % 2 == 0 {
            self.clone()
        } else {
            self.squared()
        }
    }

    /// `2^(-r - v/2)`.
    pub fn sigma(&self) -> f64 {
        2f64.powf(-(self.r() as f64) - self.v() as f64 / 2.0)
    }

    /// Exact `sigma` for even `v`.
    pub fn sigma_exact(&self) -> Option<Rational> {
        (self.v() % 2 == 0).then(|| crate::rational::pow2(-((self.r() + self.v() / 2) as i32)))
    }

    /// Kind of the centre element after one application to a net of kind
    /// `input`: `R` leaves a vertex, `V` a face, `A` swaps, `B` keeps.
    pub fn output_kind(&self, input: NetKind) -> NetKind {
        let mut kind = input;
        for f in self.application_order() {
            kind = match f {
                Factor::R => NetKind::Primal,
                Factor::V => NetKind::Dual,
                Factor::A => kind.flipped(),
                Factor::B(_) => kind,
            };
        }
        kind
    }

    /// Net kind that the word maps to itself, if it does not depend on the
    /// input (true whenever the word contains `R` or `V`).
    pub fn stable_kind(&self) -> Option<NetKind> {
        let p = self.output_kind(NetKind::Primal);
        (p == self.output_kind(NetKind::Dual)).then_some(p)
    }

    /// Lattice-rotation parity: odd `v` rotates the regular lattice by 45°.
    pub fn flips_orientation(&self) -> bool {
        self.v() % 2 == 1
    }

    pub fn letters(&self) -> String {
        self.factors.iter().map(|f| f.letter()).collect()
    }

    pub fn classify(&self) -> WordClass {
        classify_word(self)
    }
}

impl fmt::Display for OperatorWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for factor in &self.factors {
            match factor {
                Factor::B(p) => {
                    f.write_str(if p.star { "B*(" } else { "B(" })?;
                    if p.table.is_empty() {
                        if let Some((a, b)) = p.default {
                            write!(f, "{},{}", format_rational(&a), format_rational(&b))?;
                        }
                    } else {
                        let mut entries: Vec<String> = p
                            .table
                            .iter()
                            .map(|(m, (a, b))| format!("{m}:{},{}", format_rational(a), format_rational(b)))
                            .collect();
                        if let Some((a, b)) = p.default {
                            entries.push(format!("*:{},{}", format_rational(&a), format_rational(&b)));
                        }
                        f.write_str(&entries.join(";"))?;
                    }
                    f.write_str(")")?;
                }
                other => write!(f, "{}", other.letter())?,
            }
        }
        Ok(())
    }
}

pub fn classify_word(word: &OperatorWord) -> WordClass {
    if word.is_empty() {
        return WordClass::Invalid { reason: "empty word".into() };
    }
    if word.has_b() {
        return classify_gcc(word);
    }
    let (a, v, r) = (word.a(), word.v(), word.r());
    if a + v < 1 {
        return WordClass::Invalid { reason: format!("a + v = {} < 1", a + v) };
    }
    if v + r < 1 {
        return WordClass::Invalid { reason: format!("v + r = {} < 1", v + r) };
    }
    let letters = word.letters();
    if v == 0 && r == 1 && letters.ends_with('R') {
        return WordClass::MidpointClassic { degree: a + 1 };
    }
    match vav_factorization(&letters) {
        Some(factors) => WordClass::VavScheme { factors },
        None => WordClass::GeneralMidpoint,
    }
}

fn classify_gcc(word: &OperatorWord) -> WordClass {
    let letters = word.letters();
    let body = letters.strip_prefix('A').unwrap_or(&letters);
    let shape_ok = body.len() >= 2
        && body.ends_with('R')
        && body[..body.len() - 1].chars().all(|c| c == 'B');
    if !shape_ok {
        return WordClass::Invalid {
            reason: format!("B factors are only allowed in words B...B R or A B...B R, got {letters}"),
        };
    }
    let nb = body.len() - 1;
    let degree = if letters.starts_with('A') { 2 * nb + 2 } else { 2 * nb + 1 };
    let restricted = word.factors.iter().all(|f| match f {
        Factor::B(p) => p.is_restricted(),
        _ => true,
    });
    WordClass::GeneralizedCc { degree, restricted }
}

/// Factorization of a letter string into `A`, `R`, `VV` and `V A^l V`,
/// found by exhaustive search; `None` if there is none.
pub fn vav_factorization(letters: &str) -> Option<Vec<String>> {
    let s: Vec<char> = letters.chars().collect();
    let n = s.len();
    // best[k] = factorization of s[..k]
    let mut best: Vec<Option<Vec<String>>> = vec![None; n + 1];
    best[0] = Some(Vec::new());
    for end in 1..=n {
        let mut found = None;
        let c = s[end - 1];
        if (c == 'A' || c == 'R') && best[end - 1].is_some() {
            let mut f = best[end - 1].clone().unwrap();
            f.push(c.to_string());
            found = Some(f);
        } else if c == 'V' {
            let mut k = end - 1;
            while k > 0 && s[k - 1] == 'A' {
                k -= 1;
            }
            if k > 0 && s[k - 1] == 'V' && best[k - 1].is_some() {
                let mut f = best[k - 1].clone().unwrap();
                let l = end - 1 - k;
                f.push(match l {
                    0 => "V^2".to_string(),
                    1 => "VAV".to_string(),
                    _ => format!("VA^{l}V"),
                });
                found = Some(f);
            }
        }
        best[end] = found;
    }
    best[n].take()
}

struct Parser<'a> {
    chars: Vec<(usize, char)>,
    pos: usize,
    _text: &'a str,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        let chars = text.chars().enumerate().filter(|(_, c)| !c.is_whitespace()).collect();
        Self { chars, pos: 0, _text: text }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn position(&self) -> usize {
        self.chars.get(self.pos).map(|&(p, _)| p).unwrap_or_else(|| {
            self.chars.last().map(|&(p, _)| p + 1).unwrap_or(0)
        })
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::Syntax { position: self.position(), message: message.into() }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected `{c}`")))
        }
    }

    fn word(&mut self, nested: bool) -> Result<Vec<Factor>> {
        let mut factors = Vec::new();
        loop {
            match self.peek() {
                None => break,
                Some(')') if nested => break,
                Some(_) => {
                    let atom = self.atom()?;
                    let n = self.exponent()?;
                    for _ in 0..n {
                        factors.extend(atom.iter().cloned());
                    }
                }
            }
        }
        if factors.is_empty() {
            return Err(self.err("expected at least one factor"));
        }
        Ok(factors)
    }

    fn atom(&mut self) -> Result<Vec<Factor>> {
        match self.peek() {
            Some('A') => {
                self.pos += 1;
                Ok(vec![Factor::A])
            }
            Some('V') => {
                self.pos += 1;
                Ok(vec![Factor::V])
            }
            Some('R') => {
                self.pos += 1;
                Ok(vec![Factor::R])
            }
            Some('B') => {
                self.pos += 1;
                Ok(vec![Factor::B(self.bspec()?)])
            }
            Some('(') => {
                self.pos += 1;
                let inner = self.word(true)?;
                self.expect(')')?;
                Ok(inner)
            }
            Some(c) => Err(self.err(format!("unexpected `{c}`"))),
            None => Err(self.err("unexpected end of word")),
        }
    }

    fn exponent(&mut self) -> Result<usize> {
        if self.peek() == Some('^') {
            self.pos += 1;
            let start = self.pos;
            let mut n = 0usize;
            while let Some(d) = self.peek().and_then(|c| c.to_digit(10)) {
                n = n * 10 + d as usize;
                self.pos += 1;
            }
            if self.pos == start {
                return Err(self.err("expected digits after `^`"));
            }
            return self.check_exponent(n);
        }
        let mut digits = String::new();
        while let Some(d) = self.peek().and_then(superscript_digit) {
            digits.push(d);
            self.pos += 1;
        }
        if digits.is_empty() {
            Ok(1)
        } else {
            self.check_exponent(digits.parse().unwrap_or(0))
        }
    }

    fn check_exponent(&self, n: usize) -> Result<usize> {
        if n == 0 || n > 64 {
            Err(self.err(format!("exponent {n} out of range 1..=64")))
        } else {
            Ok(n)
        }
    }

    fn number(&mut self) -> Result<Rational> {
        let start = self.position();
        let mut s = String::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() || matches!(c, '.' | '/' | '-' | '+' | 'e' | 'E') {
                s.push(c);
                self.pos += 1;
            } else {
                break;
            }
        }
        if s.is_empty() {
            return Err(self.err("expected a number"));
        }
        parse_rational(&s).map_err(|_| Error::Syntax { position: start, message: format!("bad number `{s}`") })
    }

    fn bspec(&mut self) -> Result<BParams> {
        let star = if self.peek() == Some('*') {
            self.pos += 1;
            true
        } else {
            false
        };
        self.expect('(')?;
        let mut table = BTreeMap::new();
        let mut default = None;
        // Table form if a key is followed by ':'.
        let is_table = {
            let mut k = self.pos;
            while k < self.chars.len() && (self.chars[k].1.is_ascii_digit() || self.chars[k].1 == '*') {
                k += 1;
            }
            k < self.chars.len() && self.chars[k].1 == ':'
        };
        if is_table {
            loop {
                let key = if self.peek() == Some('*') {
                    self.pos += 1;
                    None
                } else {
                    let mut n = 0usize;
                    let start = self.pos;
                    while let Some(d) = self.peek().and_then(|c| c.to_digit(10)) {
                        n = n * 10 + d as usize;
                        self.pos += 1;
                    }
                    if self.pos == start {
                        return Err(self.err("expected a valence or `*`"));
                    }
                    if n < 3 {
                        return Err(Error::InvalidParameter(format!("valence {n} in B table is below 3")));
                    }
                    Some(n)
                };
                self.expect(':')?;
                let a = self.number()?;
                self.expect(',')?;
                let b = self.number()?;
                check_pair(a, b, key)?;
                let duplicate = match key {
                    Some(m) => table.insert(m, (a, b)).is_some(),
                    None => default.replace((a, b)).is_some(),
                };
                if duplicate {
                    return Err(self.err("duplicate B table entry"));
                }
                if self.peek() == Some(';') {
                    self.pos += 1;
                } else {
                    break;
                }
            }
        } else {
            let a = self.number()?;
            self.expect(',')?;
            let b = self.number()?;
            check_pair(a, b, None)?;
            default = Some((a, b));
        }
        self.expect(')')?;
        Ok(BParams { table, default, star })
    }
}

fn superscript_digit(c: char) -> Option<char> {
    let d = match c {
        '⁰' => '0',
        '¹' => '1',
        '²' => '2',
        '³' => '3',
        '⁴' => '4',
        '⁵' => '5',
        '⁶' => '6',
        '⁷' => '7',
        '⁸' => '8',
        '⁹' => '9',
        _ => return None,
    };
    Some(d)
}

pub fn parse_word(text: &str) -> Result<OperatorWord> {
    let mut p = Parser::new(text);
    if p.chars.is_empty() {
        return Err(Error::Syntax { position: 0, message: "empty word".into() });
    }
    let factors = p.word(false)?;
    if let Some(c) = p.peek() {
        return Err(p.err(format!("unexpected `{c}`")));
    }
    Ok(OperatorWord { factors })
}

/// Parses and rejects words that are not valid subdivision operators.
pub fn parse_valid_word(text: &str) -> Result<OperatorWord> {
    let w = parse_word(text)?;
    match w.classify() {
        WordClass::Invalid { reason } => Err(Error::InvalidWord { word: text.trim().to_string(), reason }),
        _ => Ok(w),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn class(s: &str) -> WordClass {
        parse_word(s).unwrap().classify()
    }

    #[test]
    fn counts() {
        let w = parse_word("A A R").unwrap();
        assert_eq!((w.a(), w.v(), w.r()), (2, 0, 1));
        assert_eq!(class("AAR"), WordClass::MidpointClassic { degree: 3 });
        let w = parse_word("V").unwrap();
        assert_eq!((w.a(), w.v(), w.r()), (0, 1, 0));
        assert_eq!(class("V"), WordClass::GeneralMidpoint);
        assert!(matches!(class("R"), WordClass::Invalid { .. }));
        assert!(matches!(class("A"), WordClass::Invalid { .. }));
    }

    #[test]
    fn vav_classes() {
        assert_eq!(class("VAV"), WordClass::VavScheme { factors: vec!["VAV".into()] });
        assert_eq!(class("VV"), WordClass::VavScheme { factors: vec!["V^2".into()] });
        assert_eq!(class("VRVR"), WordClass::GeneralMidpoint);
        assert_eq!(class("VRV"), WordClass::GeneralMidpoint);
        assert_eq!(
            class("RVVR"),
            WordClass::VavScheme { factors: vec!["R".into(), "V^2".into(), "R".into()] }
        );
        assert_eq!(
            class("AVAAV"),
            WordClass::VavScheme { factors: vec!["A".into(), "VA^2V".into()] }
        );
        assert_eq!(vav_factorization("VAVAV"), None);
    }

    #[test]
    fn exponents_and_groups() {
        assert_eq!(parse_word("A^3R").unwrap().letters(), "AAAR");
        assert_eq!(parse_word("RV²R").unwrap().letters(), "RVVR");
        assert_eq!(parse_word("VRVR²").unwrap().letters(), "VRVRR");
        assert_eq!(parse_word("(VRVR)^2").unwrap().letters(), "VRVRVRVR");
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match parse_word("AAX") {
            Err(Error::Syntax { position, .. }) => assert_eq!(position, 2),
            other => panic!("{other:?}"),
        }
        assert!(parse_word("").is_err());
        assert!(parse_word("A^0R").is_err());
        assert!(parse_word("(AR").is_err());
    }

    #[test]
    fn b_parameters() {
        let w = parse_word("B(0.45, 0.45) R").unwrap();
        let WordClass::GeneralizedCc { degree, restricted } = w.classify() else { panic!() };
        assert_eq!((degree, restricted), (3, true));
        let Factor::B(p) = &w.factors[0] else { panic!() };
        assert_eq!(p.params(5), Some((rat(9, 20), rat(9, 20))));
        assert_eq!(p.params(4), Some((rat(1, 4), rat(1, 2))));
        assert!(matches!(parse_word("B(0.5,0.5)R"), Err(Error::InvalidParameter(_))));
        assert!(matches!(parse_word("B(0,0)R"), Err(Error::InvalidParameter(_))));
        let t = parse_word("A B(3:0.2,0.3; *:1/4,1/2) R").unwrap();
        assert_eq!(t.classify(), WordClass::GeneralizedCc { degree: 4, restricted: true });
        let Factor::B(p) = &t.factors[1] else { panic!() };
        assert_eq!(p.params(3), Some((rat(1, 5), rat(3, 10))));
        assert_eq!(p.params(7), Some((rat(1, 4), rat(1, 2))));
        let s = parse_word("B*(0.3,0.3)R").unwrap();
        assert_eq!(s.classify(), WordClass::GeneralizedCc { degree: 3, restricted: false });
        match parse_word("B(5:0.6,0.6)R") {
            Err(Error::InvalidParameter(msg)) => assert!(msg.contains("valence 5")),
            other => panic!("{other:?}"),
        }
        assert!(matches!(class("B(0.2,0.3)AR"), WordClass::Invalid { .. }));
    }

    #[test]
    fn kinds_and_sigma() {
        let w = parse_word("VAV").unwrap();
        assert_eq!(w.stable_kind(), Some(NetKind::Dual));
        assert_eq!(parse_word("AAR").unwrap().stable_kind(), Some(NetKind::Primal));
        assert_eq!(parse_word("VV").unwrap().sigma_exact(), Some(rat(1, 2)));
        assert_eq!(parse_word("V").unwrap().even_power().letters(), "VV");
        assert!(parse_word("V").unwrap().flips_orientation());
    }

    #[test]
    fn display_round_trips() {
        for s in ["AAR", "B(9/20,9/20)R", "AB*(1/5,3/10)R", "B(3:1/5,3/10;*:1/4,1/2)R"] {
            let w = parse_word(s).unwrap();
            assert_eq!(parse_word(&w.to_string()).unwrap(), w);
        }
    }
}
