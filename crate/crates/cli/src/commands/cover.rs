//! `cover`: build `b = inf_λ φ_λ(x) + φ_λ*(y)` from a cover and check it
//! against the `x̄*` oracle, the minimax identity, Fan convexity and the
//! union of member graphs on seeded probes.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use bipokit_core::covers::{
    build_from_cover, cover_graph_union_check, fan_convexity_check, minimax_check, xbar_conjugate_at, CoverSpec,
    FanOptions,
};
use bipokit_core::{Bipotential, Grid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use super::Common;
use crate::config::{parse_grid, parse_vector};
use crate::report::{num, write_text, Report};

pub const TOL_COVER: f64 = 1e-6;
const REGION: &str = "-3:3:41";
const PROBES: usize = 8;
/// Probes used by the Fan check, which scans a grid per probe.
const FAN_PROBES: usize = 3;
const PRIMAL_PROBE_BOX: f64 = 1.5;
const DUAL_PROBE_BOX: f64 = 2.0;

#[derive(Debug, Default, Clone)]
pub struct CoverFlags {
    pub family: Option<String>,
    pub cover: Option<PathBuf>,
    pub phi: Option<String>,
    pub dim: Option<usize>,
    pub lambda: Option<String>,
    pub nodes: Option<usize>,
    pub shifts: Option<String>,
    pub points: Option<String>,
    pub probes: Option<usize>,
}

fn family_defaults(obj: &mut Map<String, Value>) -> Result<()> {
    let family = obj.get("family").and_then(Value::as_str).context("cover needs a \"family\"")?;
    let defaults = match family {
        "quadratic-scaling" => json!({"lambda": [0.1, 10.0], "nodes": 101}),
        "shifted-quadratics" if !obj.contains_key("shifts") && !obj.contains_key("lambda") => {
            json!({"lambda": [-1.0, 1.0], "nodes": 21})
        }
        "adversarial-indicators" => json!({"points": [[-1.0], [1.0]]}),
        "single" => json!({"phi": "quad"}),
        _ => json!({}),
    };
    for (k, v) in defaults.as_object().cloned().unwrap_or_default() {
        obj.entry(k).or_insert(v);
    }
    Ok(())
}

fn resolve_cover(flags: &CoverFlags, common: &Common) -> Result<(CoverSpec, PathBuf)> {
    let (mut obj, base): (Map<String, Value>, PathBuf) = match (&flags.cover, &flags.family, &common.config.cover) {
        (Some(path), None, _) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading cover {}", path.display()))?;
            let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
            (serde_json::from_str(&text).with_context(|| format!("cover {}", path.display()))?, base)
        }
        (Some(_), Some(_), _) => bail!("give either --cover or --family, not both"),
        (None, Some(f), _) => {
            let mut m = Map::new();
            m.insert("family".into(), Value::String(f.clone()));
            (m, PathBuf::from("."))
        }
        (None, None, Some(Value::Object(m))) => (m.clone(), PathBuf::from(".")),
        (None, None, Some(other)) => bail!("config key \"cover\" must be an object, got {other}"),
        (None, None, None) => bail!("no cover given (use --family or --cover)"),
    };
    if let Some(v) = &flags.phi {
        obj.insert("phi".into(), json!(v));
    }
    if let Some(v) = flags.dim {
        obj.insert("dim".into(), json!(v));
    }
    if let Some(v) = &flags.lambda {
        let b = parse_vector(&v.replace(':', ","))?;
        if b.len() != 2 {
            bail!("--lambda must read lo:hi");
        }
        obj.insert("lambda".into(), json!(b));
    }
    if let Some(v) = flags.nodes {
        obj.insert("nodes".into(), json!(v));
    }
    if let Some(v) = &flags.shifts {
        obj.insert("shifts".into(), json!(parse_vector(v)?));
    }
    if let Some(v) = &flags.points {
        let pts: Vec<Vec<f64>> = v.split(';').map(parse_vector).collect::<Result<_>>()?;
        obj.insert("points".into(), json!(pts));
    }
    family_defaults(&mut obj)?;
    let spec = CoverSpec::from_json(&Value::Object(obj).to_string())?;
    Ok((spec, base))
}

pub fn run(common: &Common, flags: &CoverFlags) -> Result<Report> {
    common.config.check_command("cover")?;
    let tol = common.tol(TOL_COVER);
    let seed = common.seed();
    let (spec, base) = resolve_cover(flags, common)?;
    let cover = spec.build(&base)?;
    let b = build_from_cover(cover.clone())?;
    let d = cover.dim();
    let region_spec = common.grid().unwrap_or_else(|| REGION.to_owned());
    let region = parse_grid(&region_spec, d)?;

    let n = flags.probes.or(common.config.probes).unwrap_or(PROBES).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let probes: Vec<(Vec<f64>, Vec<f64>)> = (0..n)
        .map(|_| {
            let x = (0..d).map(|_| rng.gen_range(-PRIMAL_PROBE_BOX..PRIMAL_PROBE_BOX)).collect();
            let y = (0..d).map(|_| rng.gen_range(-DUAL_PROBE_BOX..DUAL_PROBE_BOX)).collect();
            (x, y)
        })
        .collect();

    let mut rows = Vec::new();
    let (mut oracle_gap, mut minimax_gap) = (0.0_f64, 0.0_f64);
    let (mut edge_limited, mut not_applicable) = (0, 0);
    for (x, y) in &probes {
        let bv = b.eval_coords(x, y);
        let oracle = xbar_conjugate_at(&cover, x, y, &region);
        let mm = minimax_check(&cover, x, y, &region);
        let mut row = json!({"x": x, "y": y, "b": num(bv.get())});
        match (&oracle, &mm) {
            (Ok((xs, edge)), Ok(m)) => {
                let gap = (bv.get() - xs.get()).abs();
                row["xbar_star"] = num(xs.get());
                row["oracle_gap"] = num(gap);
                row["minimax_gap"] = num(m.gap);
                row["edge_limited"] = json!(*edge || m.edge_limited);
                if *edge || m.edge_limited {
                    edge_limited += 1;
                } else {
                    oracle_gap = oracle_gap.max(if gap.is_nan() { f64::INFINITY } else { gap });
                    minimax_gap = minimax_gap.max(m.gap);
                }
            }
            (Err(e), _) | (_, Err(e)) => {
                not_applicable += 1;
                row["not_applicable"] = json!(e.to_string());
            }
        }
        rows.push(row);
    }

    let k = FAN_PROBES.min(n);
    let xs: Vec<Vec<f64>> = probes[..k].iter().map(|p| p.0.clone()).collect();
    let ys: Vec<Vec<f64>> = probes[..k].iter().map(|p| p.1.clone()).collect();
    let fan_grid = Grid::cube(d, -DUAL_PROBE_BOX, DUAL_PROBE_BOX, if d == 1 { 41 } else { 9 })?;
    let fan = fan_convexity_check(&cover, &xs, &ys, &fan_grid, &FanOptions::default());
    let union = cover_graph_union_check(&cover, &probes, tol);
    let union_pass = union.as_ref().map(|u| u.pass).unwrap_or(false);

    let pass = fan.pass && union_pass && oracle_gap <= tol && minimax_gap <= tol;
    let report = Report {
        command: "cover",
        pass,
        tol,
        seed,
        details: json!({
            "cover": spec,
            "region": region_spec,
            "probes": n,
            "max_oracle_gap": num(oracle_gap),
            "max_minimax_gap": num(minimax_gap),
            "edge_limited": edge_limited,
            "not_applicable": not_applicable,
            "fan": fan,
            "union": match &union {
                Ok(u) => serde_json::to_value(u)?,
                Err(e) => json!({"error": e.to_string()}),
            },
            "per_probe": rows,
        }),
    };
    if let Some(path) = common.out() {
        write_text(&path, &serde_json::to_string_pretty(&report.to_json())?)?;
    }
    Ok(report)
}
