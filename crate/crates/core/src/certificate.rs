//! Verdicts with their supporting numbers.

use serde::Serialize;
use serde_json::{Number, Value};

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "C0-certified")]
    C0Certified,
    #[serde(rename = "C1-certified-regular")]
    C1CertifiedRegular,
    #[serde(rename = "C1-certified-extraordinary")]
    C1CertifiedExtraordinary,
    #[serde(rename = "not-certifiable")]
    NotCertifiable,
    #[serde(rename = "technique-inapplicable")]
    TechniqueInapplicable,
    #[serde(rename = "invalid-input")]
    InvalidInput,
}

impl Verdict {
    pub fn is_certified(self) -> bool {
        matches!(self, Verdict::C0Certified | Verdict::C1CertifiedRegular | Verdict::C1CertifiedExtraordinary)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::C0Certified => "C0-certified",
            Verdict::C1CertifiedRegular => "C1-certified-regular",
            Verdict::C1CertifiedExtraordinary => "C1-certified-extraordinary",
            Verdict::NotCertifiable => "not-certifiable",
            Verdict::TechniqueInapplicable => "technique-inapplicable",
            Verdict::InvalidInput => "invalid-input",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Subject {
    pub word: String,
    /// The word actually analysed (odd-`v` words are squared).
    pub analysed: String,
    pub valence: Option<usize>,
    pub orientation: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Evidence {
    pub name: String,
    pub value: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    pub schema: u32,
    pub subject: Subject,
    pub verdict: Verdict,
    pub evidence: Vec<Evidence>,
    /// Mathematical results the verdict relies on.
    pub provenance: Vec<String>,
    pub tool_version: String,
    pub config: Value,
}

impl Certificate {
    pub fn new(subject: Subject, verdict: Verdict) -> Self {
        Self {
            schema: SCHEMA,
            subject,
            verdict,
            evidence: Vec::new(),
            provenance: Vec::new(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config: Value::Null,
        }
    }

    pub fn push(&mut self, name: &str, value: Value) -> &mut Self {
        self.evidence.push(Evidence { name: name.into(), value, note: None });
        self
    }

    pub fn push_note(&mut self, name: &str, value: Value, note: &str) -> &mut Self {
        self.evidence.push(Evidence { name: name.into(), value, note: Some(note.into()) });
        self
    }

    pub fn cite(&mut self, result: &str) -> &mut Self {
        if !self.provenance.iter().any(|p| p == result) {
            self.provenance.push(result.into());
        }
        self
    }

    /// Absorbs the evidence and provenance of a sub-certificate under a
    /// prefix.
    pub fn merge(&mut self, prefix: &str, other: &Certificate) {
        for e in &other.evidence {
            self.evidence.push(Evidence { name: format!("{prefix}.{}", e.name), ..e.clone() });
        }
        for p in &other.provenance {
            self.cite(p);
        }
    }

    pub fn evidence(&self, name: &str) -> Option<&Value> {
        self.evidence.iter().find(|e| e.name == name).map(|e| &e.value)
    }
}

/// JSON number with 17 significant digits; non-finite values become strings.
pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::String(x.to_string());
    }
    let text = if x == 0.0 { "0.0".to_string() } else { format!("{x:.16e}") };
    match serde_json::from_str::<Number>(&text) {
        Ok(n) => Value::Number(n),
        Err(_) => Value::String(text),
    }
}

pub fn complex(z: num_complex::Complex64) -> Value {
    serde_json::json!({ "re": num(z.re), "im": num(z.im), "abs": num(z.norm()) })
}

/// Serialises `value` and rewrites every float with 17 significant digits.
pub fn to_value<T: Serialize>(value: &T) -> Value {
    fn fix(v: Value) -> Value {
        match v {
            Value::Number(n) if !(n.is_i64() || n.is_u64()) => n.as_f64().map(num).unwrap_or(Value::Number(n)),
            Value::Array(a) => Value::Array(a.into_iter().map(fix).collect()),
            Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, fix(v))).collect()),
            other => other,
        }
    }
    fix(serde_json::to_value(value).unwrap_or(Value::Null))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_keep_seventeen_digits() {
        let v = num(0.1);
        assert_eq!(v.to_string(), "1.0000000000000001e-1");
        let back: f64 = v.to_string().parse().unwrap();
        assert_eq!(back, 0.1);
        assert_eq!(num(f64::NAN), Value::String("NaN".into()));
    }

    #[test]
    fn verdict_names() {
        assert_eq!(serde_json::to_string(&Verdict::C1CertifiedRegular).unwrap(), "\"C1-certified-regular\"");
        assert!(Verdict::C0Certified.is_certified());
        assert!(!Verdict::TechniqueInapplicable.is_certified());
    }
}
