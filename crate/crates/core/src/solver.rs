//! Resolution of implicit laws `y ∈ T(x)` by minimizing the bipotential gap
//! `b(x, y) − ⟨x, y⟩`, and 0-D quasi-static histories at a material point
//! or a contact point.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::bipotential::Bipotential;
use crate::ereal::ExtReal;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::laws::contact_branch;
use crate::point::{check_dim, Point, Space};
use crate::search::compass_min;

/// Absolute gap tolerance certifying a resolution.
pub const TOL_SOLVE: f64 = 1e-7;
/// Compass iterations per start.
pub const DESCENT_BUDGET: usize = 500;
/// Corner starts used besides the warm start and the box centre.
const CORNER_STARTS: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    pub tol: f64,
    pub budget: usize,
    /// Half-width of the search box around the origin in every coordinate.
    pub radius: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: TOL_SOLVE,
            budget: DESCENT_BUDGET,
            radius: 10.0,
        }
    }
}

impl SolveOptions {
    /// The search box `[−radius, radius]ⁿ` of a space.
    pub fn region(&self, space: Space) -> Result<Grid> {
        Grid::cube(space.dim(), -self.radius, self.radius, 2)
    }
}

/// How a resolution was selected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Selection {
    /// Closed-form branch analysis; set-valued images give the element
    /// nearest the warm start.
    ClosedForm,
    /// Compass search on the gap from the warm start, the box centre and
    /// box corners.
    Descent,
}

impl Selection {
    pub fn label(self) -> &'static str {
        match self {
            Selection::ClosedForm => "closed-form",
            Selection::Descent => "descent",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Resolution {
    pub point: Point,
    pub gap: f64,
    pub iterations: usize,
    pub selection: Selection,
}

#[derive(Clone, Copy)]
enum Slot {
    Dual,
    Primal,
}

/// `y` with `b(x, y) = ⟨x, y⟩` up to `tol`: closed-form selection nearest
/// `warm` (the origin by default), else gap descent inside `region`.
pub fn resolve_dual<B: Bipotential + ?Sized>(
    b: &B,
    x: &Point,
    warm: Option<&Point>,
    region: &Grid,
    opts: &SolveOptions,
) -> Result<Resolution> {
    check_dim(x, b.primal_space())?;
    resolve(b, Slot::Dual, x, warm, region, opts)
}

/// `x` with `b(x, y) = ⟨x, y⟩` up to `tol`; mirror of [`resolve_dual`].
/// With the default warm start, ray-valued images give their
/// minimal-norm element.
pub fn resolve_primal<B: Bipotential + ?Sized>(
    b: &B,
    y: &Point,
    warm: Option<&Point>,
    region: &Grid,
    opts: &SolveOptions,
) -> Result<Resolution> {
    check_dim(y, b.dual_space())?;
    resolve(b, Slot::Primal, y, warm, region, opts)
}

fn resolve<B: Bipotential + ?Sized>(
    b: &B,
    slot: Slot,
    given: &Point,
    warm: Option<&Point>,
    region: &Grid,
    opts: &SolveOptions,
) -> Result<Resolution> {
    let space = match slot {
        Slot::Dual => b.dual_space(),
        Slot::Primal => b.primal_space(),
    };
    let n = space.dim();
    if region.dim() != n {
        return Err(Error::Dimension {
            expected: n,
            got: region.dim(),
        });
    }
    let warm: Vec<f64> = match warm {
        Some(w) => {
            check_dim(w, space)?;
            w.coords().to_vec()
        }
        None => vec![0.0; n],
    };
    let g = given.coords();
    let gap = |u: &[f64]| -> f64 {
        let v = match slot {
            Slot::Dual => b.gap_coords(g, u),
            Slot::Primal => b.gap_coords(u, g),
        };
        v.get()
    };
    let closed = match slot {
        Slot::Dual => b.resolve_dual_closed(g, &warm),
        Slot::Primal => b.resolve_primal_closed(g, &warm),
    };
    let mut best_gap = f64::INFINITY;
    if let Some(u) = closed {
        let v = gap(&u);
        if v.abs() <= opts.tol {
            return Ok(Resolution {
                point: Point::new(space, u)?,
                gap: v,
                iterations: 0,
                selection: Selection::ClosedForm,
            });
        }
        best_gap = v;
    }
    let (lo, hi) = (region.lo(), region.hi());
    let step = lo.iter().zip(hi).map(|(l, h)| h - l).fold(0.0, f64::max) / 4.0;
    let mut iterations = 0;
    let mut best: Option<(Vec<f64>, f64)> = None;
    for start in starts(&warm, lo, hi) {
        let (u, v, it) = compass_min(&mut |u: &[f64]| gap(u), &start, lo, hi, step, 1e-13, opts.budget);
        iterations += it;
        if best.as_ref().map_or(true, |(_, bv)| v < *bv) {
            best = Some((u, v));
        }
        if v.abs() <= opts.tol {
            break;
        }
    }
    let (u, v) = best.expect("at least one start");
    if v.abs() <= opts.tol {
        return Ok(Resolution {
            point: Point::new(space, u)?,
            gap: v,
            iterations,
            selection: Selection::Descent,
        });
    }
    Err(Error::NoResolution {
        best_gap: best_gap.min(v),
        tol: opts.tol,
    })
}

fn starts(warm: &[f64], lo: &[f64], hi: &[f64]) -> Vec<Vec<f64>> {
    let n = lo.len();
    let mut out = vec![warm.to_vec(), lo.iter().zip(hi).map(|(l, h)| 0.5 * (l + h)).collect()];
    let corners = 1usize.checked_shl(n as u32).unwrap_or(usize::MAX);
    for c in 0..corners.min(CORNER_STARTS) {
        out.push((0..n).map(|a| if (c >> a) & 1 == 1 { hi[a] } else { lo[a] }).collect());
    }
    out
}

/// `B(v, τ) = b(v, τ) − ⟨v, τ⟩`, the 0-D bifunctional; it vanishes exactly
/// on solutions of the law.
pub fn bifunctional_0d<B: Bipotential + ?Sized>(b: &B, v: &Point, tau: &Point) -> Result<ExtReal> {
    b.gap(v, tau)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DrivingKind {
    StrainRate,
    Velocity,
    Force,
}

/// A sequence of driving values at strictly increasing times.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadHistory {
    kind: DrivingKind,
    space: Space,
    steps: Vec<(f64, Point)>,
}

impl LoadHistory {
    pub fn new(kind: DrivingKind, steps: Vec<(f64, Point)>) -> Result<Self> {
        let first = steps
            .first()
            .ok_or_else(|| Error::InvalidParameter("load history has no steps".into()))?;
        let space = first.1.space();
        for w in steps.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::InvalidParameter(format!(
                    "times must increase strictly: {} then {}",
                    w[0].0, w[1].0
                )));
            }
        }
        for (t, p) in &steps {
            if !t.is_finite() {
                return Err(Error::InvalidParameter(format!("non-finite time {t}")));
            }
            check_dim(p, space)?;
        }
        Ok(LoadHistory { kind, space, steps })
    }

    /// CSV rows `time, driver components…`; a non-numeric first row is a
    /// header.
    pub fn from_csv(text: &str, kind: DrivingKind, space: Space) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let mut steps = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
            let parsed: std::result::Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
            let vals = match parsed {
                Ok(v) => v,
                Err(_) if i == 0 => continue,
                Err(e) => return Err(Error::Parse(format!("row {}: {e}", i + 1))),
            };
            if vals.len() != space.dim() + 1 {
                return Err(Error::Parse(format!(
                    "row {}: expected {} columns, got {}",
                    i + 1,
                    space.dim() + 1,
                    vals.len()
                )));
            }
            steps.push((vals[0], Point::new(space, vals[1..].to_vec())?));
        }
        LoadHistory::new(kind, steps)
    }

    pub fn kind(&self) -> DrivingKind {
        self.kind
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn steps(&self) -> &[(f64, Point)] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceStep {
    pub time: f64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub gap: f64,
    pub iterations: usize,
    pub branch: Option<String>,
    pub selection: Selection,
}

/// Per-step record of a history solve. A step that cannot be resolved
/// ends the trace and is kept in `error`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveTrace {
    pub kind: DrivingKind,
    /// Selection rule for set-valued images.
    pub rule: String,
    pub steps: Vec<TraceStep>,
    #[serde(serialize_with = "error_text")]
    pub error: Option<Error>,
}

fn error_text<S: serde::Serializer>(e: &Option<Error>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match e {
        Some(e) => s.serialize_some(&e.to_string()),
        None => s.serialize_none(),
    }
}

impl SolveTrace {
    pub fn is_complete(&self) -> bool {
        self.error.is_none()
    }

    pub fn max_gap(&self) -> f64 {
        self.steps.iter().map(|s| s.gap.abs()).fold(0.0, f64::max)
    }

    /// Columns `time, x0…, y0…, gap, iterations, branch, selection`.
    pub fn to_csv(&self) -> String {
        let nx = self.steps.first().map_or(0, |s| s.x.len());
        let ny = self.steps.first().map_or(0, |s| s.y.len());
        let mut out = String::from("time");
        for i in 0..nx {
            let _ = write!(out, ",x{i}");
        }
        for i in 0..ny {
            let _ = write!(out, ",y{i}");
        }
        out.push_str(",gap,iterations,branch,selection\n");
        for s in &self.steps {
            let _ = write!(out, "{}", s.time);
            for v in s.x.iter().chain(&s.y) {
                let _ = write!(out, ",{v}");
            }
            let _ = writeln!(
                out,
                ",{},{},{},{}",
                s.gap,
                s.iterations,
                s.branch.as_deref().unwrap_or(""),
                s.selection.label()
            );
        }
        out
    }
}

#[allow(clippy::too_many_arguments)]
fn run_history<B: Bipotential + ?Sized>(
    b: &B,
    slot: Slot,
    h: &LoadHistory,
    initial: Option<&Point>,
    opts: &SolveOptions,
    rule: &str,
    label: impl Fn(&[f64]) -> Option<String>,
    reset_on_zero: bool,
) -> Result<SolveTrace> {
    let (driven, solved) = match slot {
        Slot::Dual => (b.primal_space(), b.dual_space()),
        Slot::Primal => (b.dual_space(), b.primal_space()),
    };
    check_dim(&Point::zeros(h.space), driven)?;
    if let Some(p) = initial {
        check_dim(p, solved)?;
    }
    let region = opts.region(solved)?;
    let reference = initial.cloned().unwrap_or_else(|| Point::zeros(solved));
    let mut warm = reference.clone();
    let mut trace = SolveTrace {
        kind: h.kind,
        rule: rule.into(),
        steps: Vec::with_capacity(h.len()),
        error: None,
    };
    for (t, x) in &h.steps {
        let x = x.clone().with_space(driven)?;
        match resolve(b, slot, &x, Some(&warm), &region, opts) {
            Ok(r) => {
                let (xs, ys) = match slot {
                    Slot::Dual => (x.coords().to_vec(), r.point.coords().to_vec()),
                    Slot::Primal => (r.point.coords().to_vec(), x.coords().to_vec()),
                };
                let branch = label(&xs);
                trace.steps.push(TraceStep {
                    time: *t,
                    x: xs,
                    y: ys,
                    gap: r.gap,
                    iterations: r.iterations,
                    branch,
                    selection: r.selection,
                });
                warm = if reset_on_zero && r.point.is_zero(0.0) {
                    reference.clone()
                } else {
                    r.point
                };
            }
            Err(e) => {
                trace.error = Some(e);
                break;
            }
        }
    }
    Ok(trace)
}

/// Stress path of a material point driven by plastic strain rates: each
/// step resolves `y ∈ T(x)` from the previous stress (or `initial`).
pub fn material_point_history<B: Bipotential + ?Sized>(
    b: &B,
    h: &LoadHistory,
    initial: Option<&Point>,
    opts: &SolveOptions,
) -> Result<SolveTrace> {
    if h.kind != DrivingKind::StrainRate {
        return Err(Error::InvalidParameter("material point histories are driven by strain rates".into()));
    }
    run_history(b, Slot::Dual, h, initial, opts, "nearest previous stress", |_| None, false)
}

/// Reaction path of a contact point driven by relative velocities
/// `(x_n, x_t)`, labelled by contact branch. Set-valued reactions are
/// selected nearest the previous reaction; after a separation step
/// (zero reaction) the reference reaction `initial` is used instead.
pub fn contact_point_solve<B: Bipotential + ?Sized>(
    b: &B,
    h: &LoadHistory,
    initial: Option<&Point>,
    opts: &SolveOptions,
) -> Result<SolveTrace> {
    if h.kind != DrivingKind::Velocity {
        return Err(Error::InvalidParameter("contact histories are driven by velocities".into()));
    }
    if h.space.dim() != 3 || b.primal_space().dim() != 3 {
        return Err(Error::Dimension {
            expected: 3,
            got: h.space.dim(),
        });
    }
    run_history(
        b,
        Slot::Dual,
        h,
        initial,
        opts,
        "nearest previous reaction, reference reaction after separation",
        |x| contact_branch(x).map(|c| c.label().to_owned()),
        true,
    )
}

/// Primal path under prescribed dual values (forces or stresses): each
/// step resolves `x` with `y ∈ T(x)`, nearest the previous `x`.
pub fn force_driven_history<B: Bipotential + ?Sized>(
    b: &B,
    h: &LoadHistory,
    initial: Option<&Point>,
    opts: &SolveOptions,
) -> Result<SolveTrace> {
    if h.kind != DrivingKind::Force {
        return Err(Error::InvalidParameter("force-driven histories need driving kind force".into()));
    }
    run_history(b, Slot::Primal, h, initial, opts, "nearest previous primal value", |_| None, false)
}
