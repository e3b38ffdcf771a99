use mzero_core::rational::format_rational;
use mzero_core::wdvv_reconstruct::SymbolicValue;
use mzero_core::Rational;
use serde_json::{json, Map, Value};

pub fn rational_json(x: &Rational) -> Value {
    json!({ "num": x.numer().to_string(), "den": x.denom().to_string() })
}

/// Coefficients of `a^0, a^1, …` as `[num, den]` pairs.
pub fn poly_a_json(v: &SymbolicValue) -> Value {
    let deg = v.degree().unwrap_or(0);
    let coeffs: Vec<Value> = (0..=deg)
        .map(|e| {
            let c = v.coefficient(e);
            json!([c.numer().to_string(), c.denom().to_string()])
        })
        .collect();
    json!({ "poly_a": coeffs })
}

pub enum Payload {
    Rational(Rational),
    PolyA(SymbolicValue),
}

impl Payload {
    fn to_json(&self) -> Value {
        match self {
            Payload::Rational(x) => rational_json(x),
            Payload::PolyA(v) => poly_a_json(v),
        }
    }

    pub fn to_text(&self) -> String {
        match self {
            Payload::Rational(x) => format_rational(x),
            Payload::PolyA(v) => v.to_string(),
        }
    }
}

pub struct Envelope {
    pub value: Payload,
    pub warnings: Vec<String>,
    /// Extra top-level fields, emitted after the standard ones.
    pub extra: Vec<(String, Value)>,
    /// Lines printed after the value in text mode.
    pub text_lines: Vec<String>,
}

impl Envelope {
    pub fn new(value: Payload) -> Self {
        Envelope { value, warnings: Vec::new(), extra: Vec::new(), text_lines: Vec::new() }
    }

    pub fn emit(&self, json_mode: bool, ms: u128) {
        if json_mode {
            let mut m = Map::new();
            m.insert("value".into(), self.value.to_json());
            m.insert("warnings".into(), json!(self.warnings));
            m.insert("ms".into(), json!(ms as u64));
            for (k, v) in &self.extra {
                m.insert(k.clone(), v.clone());
            }
            println!("{}", Value::Object(m));
        } else {
            println!("{}", self.value.to_text());
            for l in &self.text_lines {
                println!("{l}");
            }
            for w in &self.warnings {
                eprintln!("warning: {w}");
            }
        }
    }
}
