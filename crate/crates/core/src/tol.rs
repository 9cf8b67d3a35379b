//! Tolerance context shared by every verifier.
//!
//! `OPCOMMUTE_TOL` overrides the defaults. It accepts either a bare number,
//! which replaces both `rel` and `residual`, or a comma separated list of
//! `key=value` pairs using the field names below.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const ENV_VAR: &str = "OPCOMMUTE_TOL";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative slack for inequality chains and equality checks.
    pub rel: f64,
    /// Absolute bound for block-equation residuals.
    pub residual: f64,
    /// Linear dependence gate for Gram–Schmidt, multiplied by the input scale.
    pub dependence: f64,
    /// Minimum gap for the pairwise distinctness test.
    pub distinct: f64,
    /// Allowed relative growth of a running maximum before a curve counts as unbounded.
    pub stabilize: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rel: 1e-10,
            residual: 1e-12,
            dependence: 1e-8,
            distinct: 1e-12,
            stabilize: 0.01,
        }
    }
}

impl Tolerances {
    pub fn parse_override(&self, text: &str) -> Result<Tolerances> {
        let text = text.trim();
        let mut out = *self;
        if let Ok(v) = text.parse::<f64>() {
            check_positive("tolerance", v)?;
            out.rel = v;
            out.residual = v;
            return Ok(out);
        }
        for part in text.split(',').filter(|p| !p.trim().is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value in {part:?}")))?;
            let v: f64 = value
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad number in {part:?}")))?;
            check_positive(key.trim(), v)?;
            match key.trim() {
                "rel" => out.rel = v,
                "residual" => out.residual = v,
                "dependence" => out.dependence = v,
                "distinct" => out.distinct = v,
                "stabilize" => out.stabilize = v,
                other => return Err(Error::Parse(format!("unknown tolerance key {other:?}"))),
            }
        }
        Ok(out)
    }

    /// Defaults with the environment override applied.
    pub fn from_env() -> Result<Tolerances> {
        match std::env::var(ENV_VAR) {
            Ok(s) => Tolerances::default().parse_override(&s),
            Err(_) => Ok(Tolerances::default()),
        }
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::Parse(format!("{name} must be a positive finite number")))
    }
}

/// `a <= b` up to a relative slack on the larger magnitude.
pub fn le_rel(a: f64, b: f64, rel: f64) -> bool {
    a <= b + rel * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}
