//! `fitz`: Fitzpatrick analysis of a sampled scalar graph read from CSV
//! (`x_1,y_1`).

use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use bipokit_core::fitzpatrick::{fitzpatrick_fn, maximal_monotone_test, MonotoneVerdict};
use bipokit_core::{GraphSample, Grid};
use serde_json::json;

use super::Common;
use crate::config::parse_grid;
use crate::report::{num, write_text, Report};

const PROBE_NODES: usize = 41;
/// Default tolerance as a multiple of the squared sampling step.
const STEP_FACTOR: f64 = 10.0;
const MIN_TOL: f64 = 1e-9;

fn verdict_name(v: MonotoneVerdict) -> &'static str {
    match v {
        MonotoneVerdict::ConsistentWithMaximalMonotone => "consistent-with-maximal-monotone",
        MonotoneVerdict::NotMonotone => "not-monotone",
        MonotoneVerdict::NotMaximal => "not-maximal",
    }
}

/// Largest gap between consecutive distinct sorted values.
fn largest_step(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v.dedup();
    v.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
}

fn hull(v: impl Iterator<Item = f64>) -> (f64, f64) {
    v.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), t| (lo.min(t), hi.max(t)))
}

pub fn run(common: &Common, graph: Option<PathBuf>) -> Result<Report> {
    common.config.check_command("fitz")?;
    let Some(path) = graph.or_else(|| common.config.graph.clone()) else {
        bail!("no graph given (use --graph with a CSV of x_1,y_1 pairs)");
    };
    let text = fs::read_to_string(&path).with_context(|| format!("reading graph {}", path.display()))?;
    let m = GraphSample::from_csv(&text, None, &path.display().to_string())
        .with_context(|| format!("graph {}", path.display()))?;
    if m.is_empty() {
        bail!("graph {} has no pairs", path.display());
    }
    if m.primal_space().dim() != 1 || m.dual_space().dim() != 1 {
        bail!("fitz works on scalar graphs (columns x_1,y_1)");
    }
    let xs: Vec<f64> = m.pairs().iter().map(|(x, _)| x.coords()[0]).collect();
    let ys: Vec<f64> = m.pairs().iter().map(|(_, y)| y.coords()[0]).collect();

    // probes on the hull of the sample, widened when it is degenerate
    let widen = |(lo, hi): (f64, f64)| if hi - lo < 1e-12 { (lo - 1.0, hi + 1.0) } else { (lo, hi) };
    let probes = match common.grid() {
        Some(spec) => parse_grid(&spec, 2)?,
        None => {
            let (x0, x1) = widen(hull(xs.iter().copied()));
            let (y0, y1) = widen(hull(ys.iter().copied()));
            Grid::new(vec![x0, y0], vec![x1, y1], vec![PROBE_NODES, PROBE_NODES])?
        }
    };
    let step = largest_step(xs.clone()).max(largest_step(ys.clone()));
    let tol = common.tol((STEP_FACTOR * step * step).max(MIN_TOL));

    let rep = maximal_monotone_test(&m, &probes, tol)?;
    let f = fitzpatrick_fn(&m)?;
    let values: Vec<(f64, f64, f64)> = probes
        .points()
        .iter()
        .map(|z| (z[0], z[1], f.eval(z[0], z[1]).get()))
        .collect();
    let (fmin, fmax) = hull(values.iter().map(|v| v.2));
    if let Some(out) = common.out() {
        let mut csv = String::from("x,p,f\n");
        for (x, p, v) in &values {
            let v = if v.is_finite() { format!("{v:?}") } else { "inf".to_owned() };
            csv.push_str(&format!("{x:?},{p:?},{v}\n"));
        }
        write_text(&out, &csv)?;
    }
    Ok(Report {
        command: "fitz",
        pass: rep.verdict == MonotoneVerdict::ConsistentWithMaximalMonotone,
        tol,
        seed: common.seed(),
        details: json!({
            "graph": path,
            "pairs": m.len(),
            "probes": rep.probes,
            "verdict": verdict_name(rep.verdict),
            "monotone_witness": rep.monotone_witness.map(|w| json!({
                "i": w.i, "j": w.j, "value": w.value,
                "pair_i": [xs[w.i], ys[w.i]], "pair_j": [xs[w.j], ys[w.j]],
            })),
            "fitzpatrick_ge_pairing": rep.b1,
            "equality_on_sample": rep.b2_on_sample,
            "worst_excess": num(rep.worst),
            "witness": rep.witness.map(|w| json!({"x": w[0], "p": w[1], "excess": w[2]})),
            "f_range": [num(fmin), num(fmax)],
        }),
    })
}
