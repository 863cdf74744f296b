//! Versioned JSON reports.
//!
//! Keys are sorted and floats printed by `serde_json`, so equal inputs give
//! byte-identical documents. Wall-clock timings are only recorded on request.

use serde::Serialize;
use serde_json::{json, Map, Value};
use std::time::Instant;

pub const REPORT_SCHEMA: &str = "vreport-1";

pub const SECTIONS: [&str; 7] = ["scene", "linking", "helicity", "comomentum", "massey", "oracle", "timings"];

#[derive(Debug, Clone)]
pub struct Report {
    command: String,
    sections: Map<String, Value>,
    timings: Option<Map<String, Value>>,
    status: Option<Value>,
}

impl Report {
    pub fn new(command: &str, record_timings: bool) -> Self {
        Self {
            command: command.into(),
            sections: Map::new(),
            timings: record_timings.then(Map::new),
            status: None,
        }
    }

    pub fn set(&mut self, section: &str, value: Value) {
        debug_assert!(SECTIONS.contains(&section) && section != "timings");
        self.sections.insert(section.into(), value);
    }

    pub fn get(&self, section: &str) -> Option<&Value> {
        self.sections.get(section)
    }

    /// Runs `f`, recording its wall time under `stage` when timings are enabled.
    pub fn time<T>(&mut self, stage: &str, f: impl FnOnce() -> T) -> T {
        let t0 = Instant::now();
        let out = f();
        if let Some(t) = &mut self.timings {
            t.insert(stage.into(), json!(t0.elapsed().as_secs_f64()));
        }
        out
    }

    /// Records how the command ended: `"ok"` or an error with its exit code.
    pub fn set_status(&mut self, code: i32, message: Option<String>) {
        self.status = Some(match message {
            None => json!({ "exit_code": code, "result": "ok" }),
            Some(m) => json!({ "exit_code": code, "result": "error", "message": m }),
        });
    }

    pub fn to_value(&self) -> Value {
        let mut root = Map::new();
        root.insert("schema".into(), json!(REPORT_SCHEMA));
        root.insert("command".into(), json!(self.command));
        for s in SECTIONS {
            let v = if s == "timings" {
                self.timings.clone().map(Value::Object).unwrap_or(Value::Null)
            } else {
                self.sections.get(s).cloned().unwrap_or(Value::Null)
            };
            root.insert(s.into(), v);
        }
        root.insert("status".into(), self.status.clone().unwrap_or(Value::Null));
        Value::Object(root)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_value()).expect("report serialises");
        s.push('\n');
        s
    }
}

/// A value tested as `value < tolerance`.
pub fn below(value: f64, tolerance: f64) -> Value {
    json!({ "value": value, "tolerance": tolerance, "pass": value < tolerance })
}

/// A value tested as `value > tolerance`.
pub fn above(value: f64, tolerance: f64) -> Value {
    json!({ "value": value, "tolerance": tolerance, "pass": value > tolerance, "test": "greater" })
}

/// A value tested as `|value - target| <= tolerance`.
pub fn near(value: f64, target: f64, tolerance: f64) -> Value {
    json!({ "value": value, "target": target, "tolerance": tolerance, "pass": (value - target).abs() <= tolerance })
}

/// An exact integer comparison.
pub fn exact<T: Serialize + PartialEq>(value: T, expected: T) -> Value {
    let pass = value == expected;
    json!({ "value": value, "expected": expected, "tolerance": 0, "pass": pass })
}

/// `true` when every `"pass"` flag inside `v` is true.
pub fn all_pass(v: &Value) -> bool {
    match v {
        Value::Object(m) => m.iter().all(|(k, x)| if k == "pass" { x != &Value::Bool(false) } else { all_pass(x) }),
        Value::Array(a) => a.iter().all(all_pass),
        _ => true,
    }
}
