//! The JSON report every command prints, see `schema/report.schema.json`.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde_json::{json, Value};

#[derive(Debug, Clone)]
pub struct Report {
    pub command: &'static str,
    pub pass: bool,
    pub tol: f64,
    pub seed: u64,
    pub details: Value,
}

impl Report {
    pub fn exit_code(&self) -> u8 {
        if self.pass {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "command": self.command,
            "pass": self.pass,
            "exit_code": self.exit_code(),
            "tol": self.tol,
            "seed": self.seed,
            "details": self.details,
        })
    }
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Finite numbers as themselves, infinities as the strings `"inf"`/`"-inf"`.
pub fn num(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else if v > 0.0 {
        json!("inf")
    } else if v < 0.0 {
        json!("-inf")
    } else {
        Value::Null
    }
}
