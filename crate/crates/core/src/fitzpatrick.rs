//! Fitzpatrick functions of sampled graphs in `ℝ × ℝ`, selfdual lagrangians
//! and the proximal average.
//!
//! Lagrangians live on `X × X*` with `X = ℝ`. Conjugation is always taken
//! for the product pairing `⟨(x, p), (y, q)⟩ = x q + y p`.

use rayon::prelude::*;

use crate::bipotential::{check_monotone, Bipotential, GraphSample, Kind, MonotoneWitness};
use crate::convex::ConvexFn;
use crate::ereal::ExtReal;
use crate::error::{Error, Result};
use crate::grid::{Grid, GridFn};
use crate::point::Space;

/// Share of each axis on which conjugates are trusted.
pub const CENTRAL: f64 = 0.5;

/// Multiplier on the grid tolerance `h²` accepted from a proximal average.
pub const PROX_SELFDUAL_FACTOR: f64 = 10.0;

/// Most splitting offsets per axis in the proximal-average search.
pub const MAX_SPLIT_OFFSETS: usize = 41;

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    Fitzpatrick(Vec<(f64, f64)>),
    Convex(ConvexFn),
}

/// A convex function of `(x, p) ∈ ℝ × ℝ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Lagrangian {
    repr: Repr,
}

fn scalar_pairs(m: &GraphSample) -> Result<Vec<(f64, f64)>> {
    if m.primal_space().dim() != 1 || m.dual_space().dim() != 1 {
        return Err(Error::Dimension {
            expected: 1,
            got: m.primal_space().dim().max(m.dual_space().dim()),
        });
    }
    if m.is_empty() {
        return Err(Error::DomainEmpty("empty graph sample".into()));
    }
    Ok(m.pairs().iter().map(|(a, b)| (a.coords()[0], b.coords()[0])).collect())
}

/// `f_M(x, p) = max { a p + x a* − a a* : (a, a*) ∈ M }`.
pub fn fitzpatrick_fn(m: &GraphSample) -> Result<Lagrangian> {
    Ok(Lagrangian {
        repr: Repr::Fitzpatrick(scalar_pairs(m)?),
    })
}

fn fitz_value(pairs: &[(f64, f64)], x: f64, p: f64) -> f64 {
    pairs
        .iter()
        .map(|&(a, s)| a * p + x * s - a * s)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// `inf { (x − a)(p − a*) : (a, a*) ∈ M }`, so that `f_M = x p − inf`.
fn monotone_defect(pairs: &[(f64, f64)], x: f64, p: f64) -> f64 {
    pairs
        .iter()
        .map(|&(a, s)| (x - a) * (p - s))
        .fold(f64::INFINITY, f64::min)
}

impl Lagrangian {
    /// Wrap a convex function of two variables `(x, p)`.
    pub fn from_fn(f: ConvexFn) -> Result<Self> {
        if let Some(d) = f.dim().filter(|&d| d != 2) {
            return Err(Error::Dimension { expected: 2, got: d });
        }
        Ok(Lagrangian { repr: Repr::Convex(f) })
    }

    pub fn from_grid(g: GridFn) -> Result<Self> {
        Self::from_fn(ConvexFn::Grid(g))
    }

    /// `L(x, p) = a x² + b p²`.
    pub fn quadratic(a: f64, b: f64) -> Self {
        Lagrangian {
            repr: Repr::Convex(ConvexFn::Quadratic {
                q: vec![vec![2.0 * a, 0.0], vec![0.0, 2.0 * b]],
                lin: vec![0.0, 0.0],
                constant: 0.0,
            }),
        }
    }

    pub fn eval(&self, x: f64, p: f64) -> ExtReal {
        match &self.repr {
            Repr::Fitzpatrick(pairs) => ExtReal::finite(fitz_value(pairs, x, p)),
            Repr::Convex(f) => f.eval(&[x, p]),
        }
    }

    /// Values on the nodes of a two-dimensional grid.
    pub fn sample(&self, grid: &Grid) -> Result<GridFn> {
        check_grid(grid)?;
        Ok(GridFn::from_fn(grid.clone(), |z| self.eval(z[0], z[1])))
    }

    /// Grid JSON document tagged `"pairing": "product"`.
    pub fn to_json(&self, grid: &Grid) -> Result<String> {
        Ok(self.sample(grid)?.to_json_with_pairing(Some("product")))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let (g, pairing) = GridFn::from_json_with_pairing(s)?;
        if pairing.as_deref() != Some("product") {
            return Err(Error::Parse("lagrangian grids need \"pairing\": \"product\"".into()));
        }
        check_grid(g.grid())?;
        Self::from_grid(g)
    }
}

fn check_grid(grid: &Grid) -> Result<()> {
    if grid.dim() != 2 {
        return Err(Error::Dimension { expected: 2, got: grid.dim() });
    }
    Ok(())
}

/// Lagrangian grids must carry the same nodes on both axes, so that the
/// product-pairing conjugate is a transposed Euclidean one.
fn check_square(grid: &Grid) -> Result<()> {
    check_grid(grid)?;
    if grid.nodes()[0] != grid.nodes()[1] || grid.lo()[0] != grid.lo()[1] || grid.hi()[0] != grid.hi()[1] {
        return Err(Error::InvalidParameter("lagrangian grid must be square with equal axes".into()));
    }
    Ok(())
}

fn transpose(values: &[ExtReal], n: usize) -> Vec<ExtReal> {
    let mut out = values.to_vec();
    for i in 0..n {
        for j in 0..n {
            out[i * n + j] = values[j * n + i];
        }
    }
    out
}

/// `L*(y, q) = sup { x q + y p − L(x, p) }` by brute force over the grid;
/// suprema still growing at the box edge are `+∞`.
pub fn product_conjugate(l: &GridFn) -> Result<GridFn> {
    check_square(l.grid())?;
    let n = l.grid().nodes()[0];
    let c = l.conjugate(l.grid())?.flagged_as_infinite();
    // c(u, v) = sup x u + p v − L; the product pairing reads (y, q) = (v, u)
    GridFn::new(l.grid().clone(), transpose(c.values(), n))
}

/// Grid tolerance `h²` of a lagrangian grid.
pub fn grid_tolerance(grid: &Grid) -> f64 {
    grid.max_spacing().powi(2)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelfdualReport {
    pub selfdual: bool,
    /// Largest `|L − L*|` over the compared nodes (`+∞` when one side is infinite
    /// and the other is not).
    pub worst_gap: f64,
    pub worst_at: Option<[f64; 2]>,
    pub compared: usize,
}

/// Compares `L` with its product-pairing conjugate on the central part of
/// a square grid.
pub fn selfdual_check(l: &Lagrangian, grid: &Grid, tol: f64) -> Result<SelfdualReport> {
    check_square(grid)?;
    let lg = l.sample(grid)?;
    let ls = product_conjugate(&lg)?;
    let mut worst = 0.0f64;
    let mut worst_at = None;
    let mut compared = 0;
    for k in 0..grid.len() {
        if !grid.in_central(k, CENTRAL) {
            continue;
        }
        let (a, b) = (lg.value_at(k), ls.value_at(k));
        let gap = match (a.finite_value(), b.finite_value()) {
            (Some(a), Some(b)) => (a - b).abs(),
            (None, None) => 0.0,
            _ => f64::INFINITY,
        };
        compared += 1;
        if gap > worst {
            worst = gap;
            let z = grid.node(k);
            worst_at = Some([z[0], z[1]]);
        }
    }
    Ok(SelfdualReport {
        selfdual: worst <= tol,
        worst_gap: worst,
        worst_at,
        compared,
    })
}

/// Sampled values of the two operators attached to `L` at a point `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct LagrangianOperators {
    pub x: f64,
    /// `δL(x)`: probes `p` with `L(x, p) + L*(x, p) = 2 x p`.
    pub delta: Vec<f64>,
    /// `∂̄L(x)`: probes `p` with `L(x, p) = x p`.
    pub bar: Vec<f64>,
}

impl LagrangianOperators {
    pub fn coincide(&self) -> bool {
        self.delta == self.bar
    }
}

/// Evaluates both operators at `x` over the `p` nodes of a square grid.
pub fn lagrangian_operators(l: &Lagrangian, x: f64, grid: &Grid, tol: f64) -> Result<LagrangianOperators> {
    check_square(grid)?;
    let ls = product_conjugate(&l.sample(grid)?)?;
    let mut delta = Vec::new();
    let mut bar = Vec::new();
    for p in grid.axis(1) {
        let v = l.eval(x, p);
        let Some(v) = v.finite_value() else { continue };
        if (v - x * p).abs() <= tol {
            bar.push(p);
        }
        if let Some(w) = ls.eval(&[x, p]).finite_value() {
            if (v + w - 2.0 * x * p).abs() <= tol {
                delta.push(p);
            }
        }
    }
    Ok(LagrangianOperators { x, delta, bar })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MonotoneVerdict {
    ConsistentWithMaximalMonotone,
    NotMonotone,
    /// Some probe is monotonically related to every sample without being one.
    NotMaximal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaximalMonotoneReport {
    pub verdict: MonotoneVerdict,
    /// `f_M ≥ x p` on all probes.
    pub b1: bool,
    /// `inf (x − a)(p − a*) ≤ 0` on all probes.
    pub i1: bool,
    /// Equality `f_M = a a*` on every sample pair.
    pub b2_on_sample: bool,
    /// The two characterizations agreed on every probe.
    pub agree: bool,
    /// Largest `x p − f_M` over the probes.
    pub worst: f64,
    /// `(x, p, x p − f_M)` at the worst probe when it exceeds the tolerance.
    pub witness: Option<[f64; 3]>,
    pub monotone_witness: Option<MonotoneWitness>,
    pub probes: usize,
}

/// Certifies a sample against the Fitzpatrick characterization of maximal
/// monotone graphs, on the nodes of a two-dimensional probe grid.
///
/// Probes outside the hull of the sample see the sample's finiteness rather
/// than the graph, so the grid should sit inside the sampled region; `tol`
/// must exceed the squared sampling step.
pub fn maximal_monotone_test(m: &GraphSample, probes: &Grid, tol: f64) -> Result<MaximalMonotoneReport> {
    let pairs = scalar_pairs(m)?;
    check_grid(probes)?;
    let (monotone, mw) = check_monotone(m);
    let rows: Vec<(f64, f64, f64, f64)> = (0..probes.len())
        .into_par_iter()
        .map(|k| {
            let z = probes.node(k);
            (z[0], z[1], fitz_value(&pairs, z[0], z[1]), monotone_defect(&pairs, z[0], z[1]))
        })
        .collect();
    let mut worst = f64::NEG_INFINITY;
    let mut witness = None;
    let (mut b1, mut i1, mut agree) = (true, true, true);
    for &(x, p, f, inf) in &rows {
        let scale = 1.0 + (x * p).abs() + f.abs();
        if (f - (x * p - inf)).abs() > 1e-12 * scale {
            agree = false;
        }
        let excess = x * p - f;
        b1 &= excess <= tol;
        i1 &= inf <= tol;
        if excess > worst {
            worst = excess;
            if excess > tol {
                witness = Some([x, p, excess]);
            }
        }
    }
    let b2_on_sample = pairs
        .iter()
        .all(|&(a, s)| (fitz_value(&pairs, a, s) - a * s).abs() <= tol);
    let verdict = if !monotone {
        MonotoneVerdict::NotMonotone
    } else if !(b1 && b2_on_sample) {
        MonotoneVerdict::NotMaximal
    } else {
        MonotoneVerdict::ConsistentWithMaximalMonotone
    };
    Ok(MaximalMonotoneReport {
        verdict,
        b1,
        i1,
        b2_on_sample,
        agree,
        worst,
        witness,
        monotone_witness: mw,
        probes: rows.len(),
    })
}

/// `g_M`: the Fitzpatrick function on `hull(dom M) × hull(im M)`, `+∞` off it.
#[derive(Debug, Clone, PartialEq)]
pub struct FitzpatrickRestricted {
    pairs: Vec<(f64, f64)>,
    dom: (f64, f64),
    im: (f64, f64),
}

fn hull(v: impl Iterator<Item = f64>) -> (f64, f64) {
    v.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), t| (lo.min(t), hi.max(t)))
}

/// A slice of the sample that skips a sampled value lying between its
/// extremes: `slice` holds the coordinate shared by the slice, `missing` the
/// skipped value.
fn slice_gap(pairs: &[(f64, f64)], swap: bool) -> Option<(f64, f64)> {
    let key = |&(a, s): &(f64, f64)| if swap { (s, a) } else { (a, s) };
    let tol = 1e-12;
    let keyed: Vec<(f64, f64)> = pairs.iter().map(key).collect();
    let mut others: Vec<f64> = keyed.iter().map(|k| k.1).collect();
    others.sort_by(f64::total_cmp);
    others.dedup_by(|a, b| (*a - *b).abs() <= tol);
    for &(u, _) in &keyed {
        let slice: Vec<f64> = keyed.iter().filter(|k| (k.0 - u).abs() <= tol).map(|k| k.1).collect();
        let (lo, hi) = hull(slice.iter().copied());
        for &w in &others {
            if w > lo + tol && w < hi - tol && !slice.iter().any(|s| (s - w).abs() <= tol) {
                return Some((u, w));
            }
        }
    }
    None
}

/// Builds `g_M`. Slices of a finite sample cannot be seen to be convex; the
/// detectable failure is a slice `m(x)` skipping a value of `im M` between
/// two of its own values (and likewise for `m*(y)`).
pub fn gm_restriction(m: &GraphSample) -> Result<FitzpatrickRestricted> {
    let pairs = scalar_pairs(m)?;
    if let Some((x, w)) = slice_gap(&pairs, false) {
        return Err(Error::BBGraph(format!(
            "slice m({x}) skips the sampled value {w} between its extremes"
        )));
    }
    if let Some((y, w)) = slice_gap(&pairs, true) {
        return Err(Error::BBGraph(format!(
            "slice m*({y}) skips the sampled value {w} between its extremes"
        )));
    }
    let dom = hull(pairs.iter().map(|p| p.0));
    let im = hull(pairs.iter().map(|p| p.1));
    Ok(FitzpatrickRestricted { pairs, dom, im })
}

impl FitzpatrickRestricted {
    pub fn dom(&self) -> (f64, f64) {
        self.dom
    }

    pub fn im(&self) -> (f64, f64) {
        self.im
    }
}

impl Bipotential for FitzpatrickRestricted {
    fn primal_space(&self) -> Space {
        Space::Euclidean(1)
    }
    fn dual_space(&self) -> Space {
        Space::Euclidean(1)
    }
    fn kind(&self) -> Kind {
        Kind::FitzpatrickRestricted
    }
    fn eval_coords(&self, x: &[f64], y: &[f64]) -> ExtReal {
        let inside = |v: f64, (lo, hi): (f64, f64)| v >= lo - 1e-12 * (1.0 + lo.abs()) && v <= hi + 1e-12 * (1.0 + hi.abs());
        if inside(x[0], self.dom) && inside(y[0], self.im) {
            ExtReal::finite(fitz_value(&self.pairs, x[0], y[0]))
        } else {
            ExtReal::INFINITY
        }
    }
}

/// Proximal average of a Fitzpatrick-type lagrangian `f` and its conjugate:
/// `L(x, p) = inf ½f(x+u, p+v) + ½f*(x−u, p−v) + (u² + v²)/2`.
///
/// The splitting `(u, v)` runs over grid offsets (at most
/// [`MAX_SPLIT_OFFSETS`] per axis, subsampled evenly on finer grids). Ties
/// go to the first offset in row-major order. The result is rejected when
/// it is not selfdual within `PROX_SELFDUAL_FACTOR · h²`.
pub fn proximal_average(f: &Lagrangian, grid: &Grid) -> Result<Lagrangian> {
    check_square(grid)?;
    let n = grid.nodes()[0];
    let h = grid.spacing(0);
    let fg = f.sample(grid)?;
    let fs = product_conjugate(&fg)?;
    let stride = n.div_ceil(MAX_SPLIT_OFFSETS).max(1);
    let half = (n / 2) as isize;
    let offsets: Vec<isize> = (-half..=half).filter(|k| k.rem_euclid(stride as isize) == 0).collect();
    let at = |i: isize, j: isize| -> Option<usize> {
        (i >= 0 && j >= 0 && (i as usize) < n && (j as usize) < n).then(|| i as usize * n + j as usize)
    };
    let values: Vec<ExtReal> = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let (i, j) = ((k / n) as isize, (k % n) as isize);
            let mut best = f64::INFINITY;
            for &du in &offsets {
                for &dv in &offsets {
                    let (Some(a), Some(b)) = (at(i + du, j + dv), at(i - du, j - dv)) else {
                        continue;
                    };
                    let (Some(fa), Some(fb)) = (fg.value_at(a).finite_value(), fs.value_at(b).finite_value()) else {
                        continue;
                    };
                    let (u, v) = (du as f64 * h, dv as f64 * h);
                    let val = 0.5 * fa + 0.5 * fb + 0.5 * (u * u + v * v);
                    if val < best {
                        best = val;
                    }
                }
            }
            ExtReal::new(best)
        })
        .collect();
    let out = Lagrangian::from_grid(GridFn::new(grid.clone(), values)?)?;
    let threshold = PROX_SELFDUAL_FACTOR * grid_tolerance(grid);
    let report = selfdual_check(&out, grid, threshold)?;
    if !report.selfdual {
        return Err(Error::Resolution(format!(
            "proximal average is not selfdual on this grid (gap {} > {threshold}); refine the grid",
            report.worst_gap
        )));
    }
    Ok(out)
}
