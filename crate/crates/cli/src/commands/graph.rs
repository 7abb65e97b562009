//! `graph`: sample a law's operator, check the gap on every pair and search
//! for a non-monotone pair.

use anyhow::Result;
use bipokit_core::bipotential::check_monotone;
use serde_json::json;

use super::Common;
use crate::config::{resolve_law, LawFlags};
use crate::report::{write_text, Report};

pub const TOL_GRAPH: f64 = 1e-8;

pub fn run(common: &Common, law: &LawFlags, per_branch: Option<usize>) -> Result<Report> {
    common.config.check_command("graph")?;
    let tol = common.tol(TOL_GRAPH);
    let spec = resolve_law(law, &common.config)?;
    let b = spec.bipotential()?;
    let sampling = common.sampling(per_branch);
    let g = spec.graph(&sampling)?;
    let mut worst = 0.0_f64;
    let mut worst_at = None;
    for (i, (x, y)) in g.pairs().iter().enumerate() {
        let gap = b.gap(x, y)?.get().abs();
        if gap > worst {
            worst = gap;
            worst_at = Some(i);
        }
    }
    let (monotone, witness) = check_monotone(&g);
    if let Some(path) = common.out() {
        write_text(&path, &g.to_csv()?)?;
    }
    Ok(Report {
        command: "graph",
        pass: worst <= tol,
        tol,
        seed: sampling.seed,
        details: json!({
            "law": spec,
            "pairs": g.len(),
            "per_branch": sampling.per_branch,
            "max_gap": worst,
            "max_gap_pair": worst_at,
            "monotone": monotone,
            "monotone_witness": witness,
        }),
    })
}
