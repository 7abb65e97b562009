//! Run configuration: an optional strict JSON file merged under the flags.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use bipokit_core::laws::LawSpec;
use bipokit_core::Grid;
use serde::Deserialize;
use serde_json::{json, Map, Value};

/// Keys accepted in a `--config` file. Unknown keys are fatal.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Must match the subcommand when present.
    pub command: Option<String>,
    /// A law name or a full law object such as `{"law": "coulomb", "mu": 0.5}`.
    pub law: Option<Value>,
    /// A cover object such as `{"family": "single", "phi": "quad"}`.
    pub cover: Option<Value>,
    #[serde(rename = "fn")]
    pub expr: Option<String>,
    pub grid: Option<String>,
    pub dual_grid: Option<String>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub history: Option<PathBuf>,
    pub graph: Option<PathBuf>,
    pub initial: Option<Vec<f64>>,
    pub per_branch: Option<usize>,
    pub probes: Option<usize>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("config {}", path.display()))
    }

    pub fn check_command(&self, name: &str) -> Result<()> {
        match &self.command {
            Some(c) if c != name => bail!("config is for command {c:?}, not {name:?}"),
            _ => Ok(()),
        }
    }
}

/// Law parameters given as flags.
#[derive(Debug, Default, Clone)]
pub struct LawFlags {
    pub law: Option<String>,
    pub mu: Option<f64>,
    pub phi_deg: Option<f64>,
    pub theta_deg: Option<f64>,
    pub c: Option<f64>,
    pub dim: Option<usize>,
    pub k: Option<usize>,
}

fn law_defaults(name: &str) -> Result<Map<String, Value>> {
    let v = match name {
        "coulomb" => json!({"mu": 0.5}),
        "drucker-prager" => json!({"phi_deg": 30.0, "c": 1.0, "theta_deg": 10.0}),
        "cauchy" => json!({"dim": 2}),
        "hill" => json!({"k": 3}),
        "vonmises" => json!({"c": 1.0}),
        other => bail!("unknown law {other:?} (expected coulomb, drucker-prager, cauchy, hill or vonmises)"),
    };
    Ok(v.as_object().cloned().unwrap_or_default())
}

/// Resolve the law from flags over the config. `--law` may name a law or a
/// JSON file; parameter flags that the law does not take are rejected.
pub fn resolve_law(flags: &LawFlags, config: &RunConfig) -> Result<LawSpec> {
    let mut obj: Map<String, Value> = match (&flags.law, &config.law) {
        (Some(s), _) if s.ends_with(".json") || Path::new(s).is_file() => {
            let text = fs::read_to_string(s).with_context(|| format!("reading law file {s}"))?;
            serde_json::from_str(&text).with_context(|| format!("law file {s}"))?
        }
        (Some(s), _) => {
            let mut m = Map::new();
            m.insert("law".into(), Value::String(s.clone()));
            m
        }
        (None, Some(Value::String(s))) => {
            let mut m = Map::new();
            m.insert("law".into(), Value::String(s.clone()));
            m
        }
        (None, Some(Value::Object(m))) => m.clone(),
        (None, Some(other)) => bail!("config key \"law\" must be a name or an object, got {other}"),
        (None, None) => bail!("no law given (use --law)"),
    };
    let name = obj
        .get("law")
        .and_then(Value::as_str)
        .context("law object needs a \"law\" name")?
        .to_owned();
    let pairs = [
        ("mu", flags.mu.map(Value::from)),
        ("phi_deg", flags.phi_deg.map(Value::from)),
        ("theta_deg", flags.theta_deg.map(Value::from)),
        ("c", flags.c.map(Value::from)),
        ("dim", flags.dim.map(Value::from)),
        ("k", flags.k.map(Value::from)),
    ];
    for (key, v) in pairs {
        if let Some(v) = v {
            obj.insert(key.into(), v);
        }
    }
    for (key, v) in law_defaults(&name)? {
        obj.entry(key).or_insert(v);
    }
    LawSpec::from_json(&Value::Object(obj).to_string()).map_err(|e| anyhow::anyhow!("law {name}: {e}"))
}

/// Parse `lo:hi:n` (every axis) or `lo:hi:n,lo:hi:n,...` (one per axis).
pub fn parse_grid(spec: &str, dim: usize) -> Result<Grid> {
    let axes: Vec<(f64, f64, usize)> = spec
        .split(',')
        .map(|a| {
            let parts: Vec<&str> = a.trim().split(':').collect();
            if parts.len() != 3 {
                bail!("grid axis {a:?} must read lo:hi:n");
            }
            let lo: f64 = parts[0].trim().parse().with_context(|| format!("grid bound {:?}", parts[0]))?;
            let hi: f64 = parts[1].trim().parse().with_context(|| format!("grid bound {:?}", parts[1]))?;
            let n: usize = parts[2].trim().parse().with_context(|| format!("grid nodes {:?}", parts[2]))?;
            Ok((lo, hi, n))
        })
        .collect::<Result<_>>()?;
    let axes = match axes.len() {
        1 => vec![axes[0]; dim],
        k if k == dim => axes,
        k => bail!("grid gives {k} axes but the space has dimension {dim}"),
    };
    let grid = Grid::new(
        axes.iter().map(|a| a.0).collect(),
        axes.iter().map(|a| a.1).collect(),
        axes.iter().map(|a| a.2).collect(),
    )?;
    Ok(grid)
}

/// Comma-separated reals.
pub fn parse_vector(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().with_context(|| format!("not a number: {t:?}")))
        .collect()
}
