//! Versioned JSON report envelope.

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::Result;
use crate::tol::Tolerances;
use crate::VERSION;

pub const SCHEMA: u32 = 1;
pub const TOOL: &str = "opcommute";

/// A named pass/fail check with the measured value and its bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
}

impl Check {
    pub fn flag(name: impl Into<String>, pass: bool) -> Check {
        Check { name: name.into(), pass, value: None, bound: None }
    }

    /// Passes when `value <= bound`.
    pub fn at_most(name: impl Into<String>, value: f64, bound: f64) -> Check {
        Check { name: name.into(), pass: value <= bound, value: Some(value), bound: Some(bound) }
    }

    /// Passes when `value >= bound`.
    pub fn at_least(name: impl Into<String>, value: f64, bound: f64) -> Check {
        Check { name: name.into(), pass: value >= bound, value: Some(value), bound: Some(bound) }
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub command: String,
    pub seed: Option<u64>,
    pub tolerances: Tolerances,
    pub checks: Vec<Check>,
    pub data: Map<String, Value>,
}

impl Report {
    pub fn new(command: impl Into<String>, seed: Option<u64>, tolerances: Tolerances) -> Report {
        Report { command: command.into(), seed, tolerances, checks: Vec::new(), data: Map::new() }
    }

    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn insert(&mut self, key: &str, value: impl Serialize) -> Result<()> {
        self.data.insert(key.to_string(), serde_json::to_value(value)?);
        Ok(())
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_value(&self) -> Value {
        let mut v = json!({
            "schema": SCHEMA,
            "tool": TOOL,
            "version": VERSION,
            "command": self.command,
            "seed": self.seed,
            "tolerances": self.tolerances,
            "pass": self.passed(),
            "checks": self.checks,
        });
        let obj = v.as_object_mut().unwrap();
        for (k, val) in &self.data {
            obj.insert(k.clone(), val.clone());
        }
        v
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(&self.to_value())?;
        s.push('\n');
        Ok(s)
    }
}
