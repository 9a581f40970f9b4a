use serde::Serialize;
use serde_json::{json, Value};

use super::io::to_pretty;
use super::scenario::InputDigest;

pub const ARTIFACT: &str = "freedil";

/// One check in a report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Entry {
    pub name: String,
    /// `None` when the check could not be evaluated.
    pub residual: Option<f64>,
    pub budget: String,
    pub witness: Option<String>,
    pub pass: bool,
    pub message: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub mode: String,
    pub scenario: Value,
    pub inputs: Vec<InputDigest>,
    pub entries: Vec<Entry>,
    /// Wall-clock milliseconds per entry, parallel to `entries`.
    pub entry_ms: Vec<f64>,
    pub total_ms: f64,
}

impl Report {
    /// True iff every entry passes.
    pub fn pass(&self) -> bool {
        !self.entries.is_empty() && self.entries.iter().all(|e| e.pass)
    }

    pub fn to_value(&self, timing: bool) -> Value {
        let mut v = json!({
            "artifact": ARTIFACT,
            "version": env!("CARGO_PKG_VERSION"),
            "mode": self.mode,
            "scenario": self.scenario,
            "inputs": self.inputs,
            "entries": self.entries,
            "pass": self.pass(),
        });
        if timing {
            v["timing"] = json!({
                "total_ms": self.total_ms,
                "entries_ms": self.entries.iter().zip(&self.entry_ms)
                    .map(|(e, t)| json!({"name": e.name, "ms": t}))
                    .collect::<Vec<_>>(),
            });
        }
        v
    }

    /// JSON text; without timing the output depends only on the scenario.
    pub fn to_json(&self, timing: bool) -> String {
        to_pretty(&self.to_value(timing))
    }

    /// Aligned table.
    pub fn to_text(&self, timing: bool) -> String {
        let mut rows: Vec<[String; 5]> = vec![[
            "check".into(),
            "residual".into(),
            "budget".into(),
            "pass".into(),
            "witness / note".into(),
        ]];
        for e in &self.entries {
            let witness = e.witness.as_ref().map(|w| if e.pass { shorten(w) } else { w.clone() });
            let note = match (&witness, &e.message) {
                (Some(w), Some(m)) => format!("{w}  ({m})"),
                (Some(w), None) => w.clone(),
                (None, Some(m)) => m.clone(),
                (None, None) => String::new(),
            };
            rows.push([
                e.name.clone(),
                e.residual.map_or("-".into(), |r| format!("{r:.3e}")),
                e.budget.clone(),
                if e.pass { "ok".into() } else { "FAIL".into() },
                note,
            ]);
        }
        let widths: Vec<usize> = (0..4).map(|c| rows.iter().map(|r| r[c].chars().count()).max().unwrap_or(0)).collect();
        let mut out = format!("{ARTIFACT} {} mode={}\n", env!("CARGO_PKG_VERSION"), self.mode);
        for r in &rows {
            let mut line = String::new();
            for c in 0..4 {
                line.push_str(&format!("{:<w$}  ", r[c], w = widths[c]));
            }
            line.push_str(&r[4]);
            out.push_str(line.trim_end());
            out.push('\n');
        }
        out.push_str(if self.pass() { "overall: pass\n" } else { "overall: FAIL\n" });
        if timing {
            out.push_str(&format!("time: {:.1} ms\n", self.total_ms));
        }
        out
    }
}

/// Passing witnesses are cut short in the table; the JSON keeps them whole.
fn shorten(w: &str) -> String {
    const MAX: usize = 48;
    if w.chars().count() <= MAX {
        w.to_string()
    } else {
        format!("{}...", w.chars().take(MAX).collect::<String>())
    }
}
