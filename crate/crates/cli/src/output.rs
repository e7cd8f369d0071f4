//! Line-oriented output and DOT rendering.

use std::io::Write;

use serde_json::{json, Value};

use vjac::degposet::DynkinSystem;
use vjac::domain::mask_to_marks;
use vjac::json::format_rat;
use vjac::polarization::RationalPolarization;

use crate::Format;

pub struct Emitter {
    format: Format,
    out: std::io::StdoutLock<'static>,
}

impl Emitter {
    pub fn stdout(format: Format) -> Self {
        Emitter { format, out: std::io::stdout().lock() }
    }

    pub fn format(&self) -> Format {
        self.format
    }

    pub fn line(&mut self, s: String) {
        // A closed pipe is not worth a panic.
        let _ = writeln!(self.out, "{s}");
    }

    /// One compact JSON document per line.
    pub fn json(&mut self, v: &Value) {
        self.line(v.to_string());
    }

    /// JSON in every format; used where the JSON form is also the readable one.
    pub fn json_or_line(&mut self, v: &Value) {
        self.json(v);
    }

    pub fn raw(&mut self, s: String) {
        let _ = write!(self.out, "{s}");
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Hasse diagram of a finite poset given by its strict relation `a > b`,
/// with edges from each element to the elements it covers.
pub fn hasse_dot<F>(name: &str, labels: &[String], greater: F) -> vjac::Result<String>
where
    F: Fn(usize, usize) -> vjac::Result<bool>,
{
    let n = labels.len();
    let mut gt = vec![vec![false; n]; n];
    for (a, row) in gt.iter_mut().enumerate() {
        for (b, cell) in row.iter_mut().enumerate() {
            *cell = a != b && greater(a, b)?;
        }
    }
    let mut s = format!("digraph {name} {{\n  rankdir=TB;\n");
    for (k, l) in labels.iter().enumerate() {
        s.push_str(&format!("  n{k} [label=\"{}\"];\n", escape(l)));
    }
    for a in 0..n {
        for b in 0..n {
            if gt[a][b] && !(0..n).any(|c| gt[a][c] && gt[c][b]) {
                s.push_str(&format!("  n{a} -> n{b};\n"));
            }
        }
    }
    s.push_str("}\n");
    Ok(s)
}

pub fn polarization_text(l: &RationalPolarization) -> String {
    let alpha: Vec<String> = l.alpha.iter().map(format_rat).collect();
    let gamma: Vec<String> = l.gamma.iter().map(format_rat).collect();
    format!("beta={} alpha=[{}] gamma=[{}]", format_rat(&l.beta), alpha.join(","), gamma.join(","))
}

pub fn dynkin_json(sys: &DynkinSystem) -> Value {
    json!(sys.sets.iter().map(|&a| mask_to_marks(a)).collect::<Vec<_>>())
}
