use std::collections::BTreeMap;
use std::fmt::Write as _;

use ffla_core::{DenseMatrix, OpCounts, Polynomial, PrimeField, ProbabilityReport};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::OutputFormat;

#[derive(Serialize, Debug, Default)]
pub struct Timings {
    pub total_ms: f64,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub phases_ms: BTreeMap<String, f64>,
}

/// One command's answer, in the fixed JSON key order.
#[derive(Serialize, Debug)]
pub struct Report {
    pub command: String,
    pub field: String,
    pub algorithm: String,
    pub result: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probability_report: Option<ProbabilityReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub op_counts: Option<OpCounts>,
    pub timings: Option<Timings>,
    /// Text-mode rendering of `result`.
    #[serde(skip)]
    pub text: String,
    /// Per-phase wall-clock times, emitted only with `--timings`.
    #[serde(skip)]
    pub phases_ms: BTreeMap<String, f64>,
    /// Set when the computation ran but could not produce a verified answer.
    #[serde(skip)]
    pub failure: Option<String>,
}

impl Report {
    pub fn new(command: &str, field: String, algorithm: &str, result: Value, text: String) -> Self {
        Report {
            command: command.to_string(),
            field,
            algorithm: algorithm.to_string(),
            result,
            probability_report: None,
            op_counts: None,
            timings: None,
            text,
            phases_ms: BTreeMap::new(),
            failure: None,
        }
    }

    pub fn exit_code(&self) -> i32 {
        if self.failure.is_some() {
            1
        } else {
            0
        }
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("report serializes");
                s.push('\n');
                s
            }
            OutputFormat::Text => {
                let mut s = self.text.clone();
                if !s.is_empty() && !s.ends_with('\n') {
                    s.push('\n');
                }
                if let Some(msg) = &self.failure {
                    let _ = writeln!(s, "failed: {msg}");
                }
                if let Some(r) = &self.probability_report {
                    let _ = writeln!(
                        s,
                        "probability: {} succeeds with probability >= {:.6} ({}, |S| = {}, trials {})",
                        r.algorithm,
                        r.bound_f64(),
                        r.formula,
                        r.sample_set_size,
                        r.trials
                    );
                    if let Some(w) = r.warning() {
                        let _ = writeln!(s, "warning: {w}");
                    }
                }
                if let Some(c) = &self.op_counts {
                    let _ = writeln!(
                        s,
                        "ops: muls {}, adds {}, base products {}, reductions {}",
                        c.muls, c.adds, c.base_products, c.reductions
                    );
                }
                if let Some(t) = &self.timings {
                    let _ = writeln!(s, "time: {:.3} ms", t.total_ms);
                    for (k, v) in &t.phases_ms {
                        let _ = writeln!(s, "time {k}: {v:.3} ms");
                    }
                }
                s
            }
        }
    }
}

/// Usage, parse or input error; exit code 2.
#[derive(Debug)]
pub struct CliError {
    pub kind: String,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            kind: "usage".into(),
            message: message.into(),
        }
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => {
                let v = json!({"error": {"kind": self.kind, "message": self.message}, "exit_code": 2});
                format!("{}\n", serde_json::to_string_pretty(&v).expect("error serializes"))
            }
            OutputFormat::Text => format!("ffla: error: {}\n", self.message),
        }
    }
}

impl From<ffla_core::Error> for CliError {
    fn from(e: ffla_core::Error) -> Self {
        CliError {
            kind: e.kind().to_string(),
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError {
            kind: "io".into(),
            message: e.to_string(),
        }
    }
}

pub fn classic(f: &PrimeField, v: &[i64]) -> Vec<u64> {
    v.iter().map(|&x| f.to_classic(x)).collect()
}

pub fn vector_text(f: &PrimeField, v: &[i64]) -> String {
    classic(f, v).iter().map(u64::to_string).collect::<Vec<_>>().join(" ")
}

pub fn matrix_json(a: &DenseMatrix) -> Value {
    let f = a.field();
    let rows: Vec<Vec<u64>> = (0..a.rows()).map(|i| classic(f, a.row(i))).collect();
    json!({"rows": a.rows(), "cols": a.cols(), "entries": rows})
}

pub fn matrix_text(a: &DenseMatrix) -> String {
    let mut s = format!("{} {}\n", a.rows(), a.cols());
    for i in 0..a.rows() {
        s.push_str(&vector_text(a.field(), a.row(i)));
        s.push('\n');
    }
    s
}

/// Coefficients listed from the constant term up.
pub fn poly_json(g: &Polynomial) -> Value {
    json!({"degree": g.degree(), "coefficients": classic(g.field(), g.coeffs())})
}

/// `x^3 + 5*x + 2` style, highest degree first.
pub fn poly_text(g: &Polynomial) -> String {
    let f = g.field();
    let mut terms = Vec::new();
    for (i, &c) in g.coeffs().iter().enumerate().rev() {
        let c = f.to_classic(c);
        if c == 0 {
            continue;
        }
        let mono = match i {
            0 => String::new(),
            1 => "x".to_string(),
            _ => format!("x^{i}"),
        };
        terms.push(match (c, i) {
            (_, 0) => c.to_string(),
            (1, _) => mono,
            _ => format!("{c}*{mono}"),
        });
    }
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}
