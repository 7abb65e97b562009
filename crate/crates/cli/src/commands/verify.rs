//! `verify`: the bipotential axioms for a law or a scalar expression `b(x, y)`.

use std::sync::Arc;

use anyhow::{bail, Result};
use bipokit_core::bipotential::{check_axioms, FnBipotential, ProbeGrid};
use bipokit_core::{Bipotential, Point, Space};
use serde_json::json;

use super::{default_grid, Common};
use crate::config::{parse_grid, resolve_law, LawFlags};
use crate::expr::Expr;
use crate::report::{write_text, Report};

pub const TOL_VERIFY: f64 = 1e-8;

/// Fixed slices for scalar expressions.
const SCALAR_SLICES: [f64; 4] = [-1.0, 0.0, 0.5, 1.0];
/// Graph pairs used as slices, besides the origin.
const GRAPH_SLICES: usize = 3;

pub fn run(common: &Common, law: &LawFlags, expr: Option<&str>) -> Result<Report> {
    common.config.check_command("verify")?;
    let tol = common.tol(TOL_VERIFY);
    let seed = common.seed();
    let expr = expr.map(str::to_owned).or_else(|| common.config.expr.clone());
    let has_law = law.law.is_some() || common.config.law.is_some();

    let (name, b, xs, ys, grid_spec): (String, Arc<dyn Bipotential>, Vec<Point>, Vec<Point>, String) = match expr {
        Some(_) if has_law => bail!("give either --law or --fn, not both"),
        Some(src) => {
            let e = Expr::parse(&src, &["x", "y"])?;
            let b = FnBipotential::new(Space::Euclidean(1), Space::Euclidean(1), move |x, y| {
                e.eval_ext(&[("x", x[0]), ("y", y[0])])
            });
            let slices: Vec<Point> = SCALAR_SLICES.iter().map(|&v| Point::scalar(v)).collect();
            let grid = common.grid().unwrap_or_else(|| default_grid(1).to_owned());
            (src, Arc::new(b), slices.clone(), slices, grid)
        }
        None => {
            let spec = resolve_law(law, &common.config)?;
            let b = spec.bipotential()?;
            let dim = b.primal_space().dim();
            let grid = common.grid().unwrap_or_else(|| default_grid(dim).to_owned());
            let box_ = parse_grid(&grid, dim)?;
            let bound = box_.lo().iter().chain(box_.hi()).fold(f64::INFINITY, |m, v| m.min(v.abs()));
            let graph = spec.graph(&common.sampling(None))?;
            let inside: Vec<&(Point, Point)> = graph
                .pairs()
                .iter()
                .filter(|(x, y)| x.coords().iter().chain(y.coords()).all(|v| v.abs() <= bound))
                .collect();
            let stride = (inside.len() / GRAPH_SLICES).max(1);
            let mut xs = vec![Point::new(b.primal_space(), vec![0.0; dim])?];
            let mut ys = vec![Point::new(b.dual_space(), vec![0.0; b.dual_space().dim()])?];
            for (x, y) in inside.iter().step_by(stride).take(GRAPH_SLICES) {
                xs.push(x.clone());
                ys.push(y.clone());
            }
            (spec.name().to_owned(), b, xs, ys, grid)
        }
    };

    let grid = parse_grid(&grid_spec, b.primal_space().dim())?;
    let mut probes = ProbeGrid::symmetric(grid);
    probes.seed = seed;
    let rep = check_axioms(b.as_ref(), &xs, &ys, &probes, tol)?;
    if let Some(path) = common.out() {
        write_text(&path, &rep.to_json())?;
    }
    Ok(Report {
        command: "verify",
        pass: rep.pass,
        tol,
        seed,
        details: json!({
            "bipotential": name,
            "grid": grid_spec,
            "x_slices": xs.iter().map(|p| p.coords().to_vec()).collect::<Vec<_>>(),
            "y_slices": ys.iter().map(|p| p.coords().to_vec()).collect::<Vec<_>>(),
            "witness": rep.first_witness(),
            "axioms": serde_json::to_value(&rep)?,
        }),
    })
}
