//! C1 certification on the regular grid.

use serde_json::{json, Value};

use super::diff2::{base_norms, compose_diff2_bound};
use super::stencil::regular_stencil;
use crate::certificate::{num, to_value, Certificate, Subject, Verdict};
use crate::error::{Error, Result};
use crate::operators::word::{OperatorWord, WordClass};
use crate::rational::{format_rational, to_f64, Rational};

const REGULAR_THEOREM: &str =
    "a linear-reproducing scheme whose second-difference scheme for U^2 has norm below sigma(U^2) is C1 on the regular grid";

fn rational(r: &Rational) -> Value {
    json!({ "exact": format_rational(r), "value": num(to_f64(r)) })
}

/// Certifies `word` on the regular grid by bounding the second differences
/// of `U^2` against `sigma(U^2) = 2^(-v-2r)`.
pub fn certify_regular(word: &OperatorWord) -> Result<Certificate> {
    let square = word.squared();
    let subject = Subject { word: word.to_string(), analysed: square.to_string(), valence: None, orientation: None };
    if let WordClass::Invalid { reason } = word.classify() {
        let mut c = Certificate::new(subject, Verdict::InvalidInput);
        c.push("reason", Value::String(reason));
        return Ok(c);
    }
    let bound = match compose_diff2_bound(word) {
        Ok(b) => b,
        Err(Error::InvalidParameter(reason)) => {
            let mut c = Certificate::new(subject, Verdict::TechniqueInapplicable);
            c.push("reason", Value::String(reason));
            return Ok(c);
        }
        Err(e) => return Err(e),
    };
    let sigma_sq = crate::rational::pow2(-(word.v() as i32) - 2 * word.r() as i32);
    let regular = super::diff2::regular_letters(word).expect("bound exists only for regular letters");
    let regular_word = crate::operators::word::parse_word(&regular)?;
    let stencil = regular_stencil(&regular_word.squared())?;
    let stochastic = stencil.is_stochastic();
    let lattice_ok = stencil.lattice_map_ok(&regular_word.squared());

    let mut c = Certificate::new(subject, Verdict::NotCertifiable);
    c.push("class", to_value(&word.classify()));
    let norms: serde_json::Map<String, Value> =
        base_norms()?.iter().map(|(k, v)| (k.to_string(), rational(v))).collect();
    c.push("base_norms", Value::Object(norms));
    c.push("factors", to_value(&bound.factors));
    c.push("diff2_bound", rational(&bound.bound));
    c.push("closed_form_bound", rational(&bound.closed_form));
    c.push("sigma_u2", rational(&sigma_sq));
    c.push("ratio", rational(&(bound.bound / sigma_sq)));
    c.push("stochastic", Value::Bool(stochastic));
    c.push("lattice_map", json!({ "ok": lattice_ok, "scale_sq": format_rational(&stencil.scale_sq) }));
    c.cite(REGULAR_THEOREM);
    if bound.bound < sigma_sq && stochastic && lattice_ok {
        c.verdict = Verdict::C1CertifiedRegular;
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::word::parse_word;

    fn verdict(w: &str) -> Verdict {
        certify_regular(&parse_word(w).unwrap()).unwrap().verdict
    }

    #[test]
    fn midpoint_family() {
        for w in ["AR", "AAR", "AAAR", "VV", "VAV", "AV", "VRV", "VRVR"] {
            assert_eq!(verdict(w), Verdict::C1CertifiedRegular, "{w}");
        }
    }

    #[test]
    fn invalid_and_unsmooth() {
        assert_eq!(verdict("R"), Verdict::InvalidInput);
        assert_eq!(verdict("A"), Verdict::InvalidInput);
    }

    #[test]
    fn restricted_b_acts_as_aa() {
        assert_eq!(verdict("B(1/4,1/2)R"), Verdict::C1CertifiedRegular);
    }
}
