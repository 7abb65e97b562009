//! `solve`: resolve a load history step by step. Contact laws are driven
//! by velocities, material laws by strain rates.

use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use bipokit_core::laws::LawSpec;
use bipokit_core::solver::{contact_point_solve, material_point_history, DrivingKind, LoadHistory, SolveOptions};
use bipokit_core::Point;
use serde_json::json;

use super::Common;
use crate::config::{parse_vector, resolve_law, LawFlags};
use crate::report::{write_text, Report};

pub fn run(common: &Common, law: &LawFlags, history: Option<PathBuf>, initial: Option<&str>) -> Result<Report> {
    common.config.check_command("solve")?;
    let defaults = SolveOptions::default();
    let opts = SolveOptions {
        tol: common.tol(defaults.tol),
        ..defaults
    };
    let spec = resolve_law(law, &common.config)?;
    let b = spec.bipotential()?;
    let Some(path) = history.or_else(|| common.config.history.clone()) else {
        bail!("no load history given (use --history)");
    };
    let text = fs::read_to_string(&path).with_context(|| format!("reading history {}", path.display()))?;
    let kind = match spec {
        LawSpec::Coulomb { .. } => DrivingKind::Velocity,
        _ => DrivingKind::StrainRate,
    };
    let h = LoadHistory::from_csv(&text, kind, b.primal_space()).with_context(|| format!("history {}", path.display()))?;
    let initial = match initial.map(parse_vector).transpose()?.or_else(|| common.config.initial.clone()) {
        Some(v) => Some(Point::new(b.dual_space(), v)?),
        None => None,
    };
    let trace = match kind {
        DrivingKind::Velocity => contact_point_solve(b.as_ref(), &h, initial.as_ref(), &opts)?,
        _ => material_point_history(b.as_ref(), &h, initial.as_ref(), &opts)?,
    };
    if let Some(out) = common.out() {
        write_text(&out, &trace.to_csv())?;
    }
    let max_gap = trace.max_gap();
    let branches: Vec<Option<&str>> = trace.steps.iter().map(|s| s.branch.as_deref()).collect();
    Ok(Report {
        command: "solve",
        pass: trace.is_complete() && max_gap <= opts.tol,
        tol: opts.tol,
        seed: common.seed(),
        details: json!({
            "law": spec,
            "history": path,
            "driving": kind,
            "rule": trace.rule,
            "steps": trace.steps.len(),
            "history_steps": h.len(),
            "max_gap": max_gap,
            "branches": branches,
            "dual_norms": trace.steps.iter().map(|s| s.y.iter().map(|v| v * v).sum::<f64>().sqrt()).collect::<Vec<_>>(),
            "error": trace.error.as_ref().map(|e| e.to_string()),
        }),
    })
}
