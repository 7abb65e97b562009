//! `conjugate`: discrete Fenchel conjugate of a scalar expression `f(x)`,
//! with the biconjugate as a convexity check.

use anyhow::{bail, Result};
use bipokit_core::GridFn;
use serde_json::json;

use super::Common;
use crate::config::parse_grid;
use crate::expr::Expr;
use crate::report::{num, write_text, Report};

pub const TOL_CONJUGATE: f64 = 1e-6;
const PRIMAL_GRID: &str = "-5:5:1001";
const DUAL_GRID: &str = "-5:5:1001";
/// Fraction of the primal box where `f** = f` is required; the biconjugate
/// is distorted near the box edge.
const CENTRAL: f64 = 2.0 / 3.0;

pub fn run(common: &Common, expr: Option<&str>, dual: Option<&str>) -> Result<Report> {
    common.config.check_command("conjugate")?;
    let tol = common.tol(TOL_CONJUGATE);
    let Some(src) = expr.map(str::to_owned).or_else(|| common.config.expr.clone()) else {
        bail!("no function given (use --fn with an expression in x)");
    };
    let e = Expr::parse(&src, &["x"])?;
    let primal_spec = common.grid().unwrap_or_else(|| PRIMAL_GRID.to_owned());
    let dual_spec = dual
        .map(str::to_owned)
        .or_else(|| common.config.dual_grid.clone())
        .unwrap_or_else(|| DUAL_GRID.to_owned());
    let primal = parse_grid(&primal_spec, 1)?;
    let dual = parse_grid(&dual_spec, 1)?;

    let f = GridFn::from_fn(primal.clone(), |x| e.eval_ext(&[("x", x[0])]));
    if f.values().iter().all(|v| v.is_infinite()) {
        bail!("{src:?} is +inf on every grid node");
    }
    let conj = f.conjugate(&dual)?;
    let flagged = conj.edge_flags.iter().filter(|&&b| b).count();
    let star = conj.clone().flagged_as_infinite();
    if star.values().iter().all(|v| v.is_infinite()) {
        // no affine minorant resolved on the grid: f** = −∞
        return Ok(Report {
            command: "conjugate",
            pass: false,
            tol,
            seed: common.seed(),
            details: json!({
                "function": e.source(),
                "grid": primal_spec,
                "dual_grid": dual_spec,
                "edge_flagged": flagged,
                "biconjugate_defect": num(f64::INFINITY),
                "witness": {"note": "the conjugate is +inf on the whole dual grid, so f has no affine minorant there"},
            }),
        });
    }
    let bi = star.conjugate(&primal)?.flagged_as_infinite();

    // f** ≤ f always; a node where it is strictly lower witnesses non-convexity.
    // Nodes whose biconjugate supremum sits on an end of the dual grid are
    // truncated by the grid and skipped.
    let ys: Vec<f64> = (0..dual.len()).map(|j| dual.node(j)[0]).collect();
    let truncated = |x: f64| {
        let mut best = (f64::NEG_INFINITY, 0);
        for (j, &y) in ys.iter().enumerate() {
            if let Some(v) = star.value_at(j).finite_value() {
                if x * y - v > best.0 {
                    best = (x * y - v, j);
                }
            }
        }
        best.1 == 0 || best.1 + 1 == ys.len()
    };
    let mut worst = 0.0_f64;
    let mut witness = None;
    let mut skipped = 0;
    for k in (0..primal.len()).filter(|&k| primal.in_central(k, CENTRAL)) {
        if truncated(primal.node(k)[0]) {
            skipped += 1;
            continue;
        }
        let (fk, bk) = (f.value_at(k), bi.value_at(k));
        let drop = match (fk.finite_value(), bk.finite_value()) {
            (Some(a), Some(b)) => a - b,
            (None, Some(_)) => f64::INFINITY,
            _ => 0.0,
        };
        if drop > worst {
            worst = drop;
            witness = Some(json!({"x": primal.node(k)[0], "f": num(fk.get()), "f_biconjugate": num(bk.get())}));
        }
    }
    let pass = worst <= tol;

    if let Some(path) = common.out() {
        let mut csv = String::from("y,value,edge\n");
        for k in 0..dual.len() {
            let v = conj.function.value_at(k).get();
            let v = if v.is_finite() { format!("{v:?}") } else { "inf".to_owned() };
            csv.push_str(&format!("{:?},{v},{}\n", dual.node(k)[0], conj.edge_flags[k]));
        }
        write_text(&path, &csv)?;
    }
    Ok(Report {
        command: "conjugate",
        pass,
        tol,
        seed: common.seed(),
        details: json!({
            "function": e.source(),
            "grid": primal_spec,
            "dual_grid": dual_spec,
            "edge_flagged": flagged,
            "biconjugate_defect": num(worst),
            "truncated_nodes": skipped,
            "witness": if pass { None } else { witness },
        }),
    })
}
