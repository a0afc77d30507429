//! Deterministic command reports in text and JSON.
//!
//! JSON keeps everything exact: rationals are `"p/q"` strings, form and
//! tangent-valued-form components are keyed by increasing multi-index
//! strings like `"d[0,2]"`, and scalar polynomials map monomial strings to
//! rational strings. `serde_json::Map` is ordered, so serialization is
//! deterministic.

use num::{BigInt, One};
use serde_json::{json, Map, Value as Json};

use crate::dsl::{self, Value};
use crate::exterior::{ComplexForm, Form, MultiIndex, Tvf};
use crate::qbundle::QChart;
use crate::scalar::{Chart, ComplexScalar, Rat, ScalarField};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    /// An evaluated value with its human rendering.
    Value { rendered: String, json: Json },
    Pass,
    Fail { reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub command: String,
    pub inputs: Vec<(String, String)>,
    pub outcome: Outcome,
    pub seed: Option<u64>,
    /// A loadable model file reproducing a failure, when one exists.
    pub counterexample: Option<String>,
}

impl Report {
    pub fn value(command: &str, v: &Value, qchart: &QChart) -> Report {
        Report {
            command: command.to_string(),
            inputs: Vec::new(),
            outcome: Outcome::Value {
                rendered: dsl::report_value(v, qchart),
                json: value_json(v),
            },
            seed: None,
            counterexample: None,
        }
    }

    pub fn pass(command: &str) -> Report {
        Report {
            command: command.to_string(),
            inputs: Vec::new(),
            outcome: Outcome::Pass,
            seed: None,
            counterexample: None,
        }
    }

    pub fn fail(command: &str, reason: &str) -> Report {
        Report {
            command: command.to_string(),
            inputs: Vec::new(),
            outcome: Outcome::Fail { reason: reason.to_string() },
            seed: None,
            counterexample: None,
        }
    }

    pub fn with_input(mut self, key: &str, value: impl ToString) -> Report {
        self.inputs.push((key.to_string(), value.to_string()));
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Report {
        self.seed = Some(seed);
        self
    }

    pub fn passed(&self) -> bool {
        !matches!(self.outcome, Outcome::Fail { .. })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("command: {}\n", self.command));
        for (k, v) in &self.inputs {
            out.push_str(&format!("{k}: {v}\n"));
        }
        if let Some(seed) = self.seed {
            out.push_str(&format!("seed: {seed}\n"));
        }
        match &self.outcome {
            Outcome::Value { rendered, .. } => {
                out.push_str(&format!("result: {rendered}\n"));
            }
            Outcome::Pass => out.push_str("outcome: pass\n"),
            Outcome::Fail { reason } => {
                out.push_str("outcome: fail\n");
                out.push_str(&format!("reason: {reason}\n"));
            }
        }
        if let Some(ce) = &self.counterexample {
            out.push_str("counterexample:\n");
            for line in ce.lines() {
                out.push_str(&format!("  {line}\n"));
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut map = Map::new();
        map.insert("command".into(), json!(self.command));
        let mut inputs = Map::new();
        for (k, v) in &self.inputs {
            inputs.insert(k.clone(), json!(v));
        }
        map.insert("inputs".into(), Json::Object(inputs));
        if let Some(seed) = self.seed {
            map.insert("seed".into(), json!(seed));
        }
        match &self.outcome {
            Outcome::Value { rendered, json: j } => {
                map.insert("outcome".into(), json!("value"));
                map.insert("rendered".into(), json!(rendered));
                map.insert("value".into(), j.clone());
            }
            Outcome::Pass => {
                map.insert("outcome".into(), json!("pass"));
            }
            Outcome::Fail { reason } => {
                map.insert("outcome".into(), json!("fail"));
                map.insert("reason".into(), json!(reason));
            }
        }
        if let Some(ce) = &self.counterexample {
            map.insert("counterexample".into(), json!(ce));
        }
        let mut s = serde_json::to_string_pretty(&Json::Object(map)).expect("serializable");
        s.push('\n');
        s
    }
}

// ---------------------------------------------------------------------------
// exact JSON encodings

pub fn rat_json(r: &Rat) -> Json {
    if r.denom() == &BigInt::one() {
        json!(r.numer().to_string())
    } else {
        json!(format!("{}/{}", r.numer(), r.denom()))
    }
}

fn monomial_key(exps: &[u32], chart: &Chart) -> String {
    let mut parts = Vec::new();
    for (i, &e) in exps.iter().enumerate() {
        if e == 1 {
            parts.push(chart.coord(i).name.clone());
        } else if e > 1 {
            parts.push(format!("{}^{}", chart.coord(i).name, e));
        }
    }
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join("*")
    }
}

pub fn scalar_json(f: &ScalarField) -> Json {
    let mut map = Map::new();
    for (exps, c) in f.terms() {
        map.insert(monomial_key(exps, f.chart()), rat_json(c));
    }
    Json::Object(map)
}

pub fn complex_scalar_json(s: &ComplexScalar) -> Json {
    if s.im.is_zero() {
        scalar_json(&s.re)
    } else {
        json!({ "re": scalar_json(&s.re), "im": scalar_json(&s.im) })
    }
}

fn mi_key(mi: &MultiIndex) -> String {
    let inner: Vec<String> = mi.indices().iter().map(|i| i.to_string()).collect();
    format!("d[{}]", inner.join(","))
}

pub fn form_json(f: &Form) -> Json {
    let mut map = Map::new();
    for (mi, c) in f.comps() {
        if !c.is_zero() {
            map.insert(mi_key(mi), scalar_json(c));
        }
    }
    Json::Object(map)
}

pub fn complex_form_json(f: &ComplexForm) -> Json {
    if f.im.is_zero() {
        form_json(&f.re)
    } else {
        json!({ "re": form_json(&f.re), "im": form_json(&f.im) })
    }
}

pub fn tvf_json(t: &Tvf) -> Json {
    let chart = t.chart();
    let mut keys: Vec<MultiIndex> = t.comps().map(|((m, _), _)| m.clone()).collect();
    keys.sort();
    keys.dedup();
    let mut map = Map::new();
    for mi in keys {
        let mut dirs = Map::new();
        for mu in 0..chart.dim() {
            let f = t.comp(&mi, mu);
            if !f.is_zero() {
                dirs.insert(format!("@{}", chart.coord(mu).name), scalar_json(&f));
            }
        }
        if !dirs.is_empty() {
            map.insert(mi_key(&mi), Json::Object(dirs));
        }
    }
    Json::Object(map)
}

pub fn value_json(v: &Value) -> Json {
    match v {
        Value::Scalar(s) => complex_scalar_json(s),
        Value::Form(f) => complex_form_json(f),
        Value::Tangent(t) => tvf_json(t),
        Value::Conn(c) => tvf_json(&c.as_tvf().embed()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, ratio};

    #[test]
    fn json_schema_is_exact() {
        let qc = QChart::new(&["x", "y"]);
        let base = qc.base();
        let x = ScalarField::coordinate(base, 0);
        let f = Form::covector(base, 0)
            .wedge(&Form::covector(base, 1))
            .unwrap()
            .scale_field(&x.scale(&ratio(1, 2)));
        let j = form_json(&f);
        assert_eq!(j, json!({ "d[0,1]": { "x": "1/2" } }));
        let t = Tvf::tensor(&Form::covector(base, 1), &Tvf::basis_vector(base, 0)).unwrap();
        assert_eq!(tvf_json(&t), json!({ "d[1]": { "@x": { "1": "1" } } }));
        assert_eq!(rat_json(&rat(-3)), json!("-3"));
    }

    #[test]
    fn text_and_json_reports() {
        let r = Report::pass("verify").with_input("suite", "fn-jacobi").with_seed(42);
        assert_eq!(r.to_text(), "command: verify\nsuite: fn-jacobi\nseed: 42\noutcome: pass\n");
        let j = r.to_json();
        assert!(j.contains("\"outcome\": \"pass\""));
        assert!(j.contains("\"seed\": 42"));
        // determinism: identical reports serialize identically
        let r2 = Report::pass("verify").with_input("suite", "fn-jacobi").with_seed(42);
        assert_eq!(r2.to_json(), j);
    }
}
