//! Axis-aligned grids, grid-sampled extended-real functions and discrete
//! Legendre–Fenchel conjugation.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ereal::ExtReal;
use crate::error::{Error, Result};
use crate::point::Space;

/// Regular tensor grid over a box. Nodes are enumerated row-major, the last
/// axis varying fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    lo: Vec<f64>,
    hi: Vec<f64>,
    nodes: Vec<usize>,
}

impl Grid {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>, nodes: Vec<usize>) -> Result<Self> {
        if lo.len() != hi.len() || lo.len() != nodes.len() || lo.is_empty() {
            return Err(Error::InvalidParameter("grid axes disagree in number".into()));
        }
        for a in 0..lo.len() {
            if !(lo[a].is_finite() && hi[a].is_finite() && lo[a] <= hi[a]) {
                return Err(Error::InvalidParameter(format!(
                    "bad box [{}, {}] on axis {a}",
                    lo[a], hi[a]
                )));
            }
            if nodes[a] == 0 || (nodes[a] == 1 && lo[a] != hi[a]) {
                return Err(Error::InvalidParameter(format!(
                    "axis {a} needs at least 2 nodes"
                )));
            }
        }
        Ok(Grid { lo, hi, nodes })
    }

    pub fn uniform(lo: f64, hi: f64, nodes: usize) -> Result<Self> {
        Grid::new(vec![lo], vec![hi], vec![nodes])
    }

    /// The cube `[lo, hi]^dim` with `nodes` per axis.
    pub fn cube(dim: usize, lo: f64, hi: f64, nodes: usize) -> Result<Self> {
        Grid::new(vec![lo; dim], vec![hi; dim], vec![nodes; dim])
    }

    pub fn dim(&self) -> usize {
        self.nodes.len()
    }

    pub fn len(&self) -> usize {
        self.nodes.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        if self.nodes[axis] <= 1 {
            0.0
        } else {
            (self.hi[axis] - self.lo[axis]) / (self.nodes[axis] - 1) as f64
        }
    }

    /// Largest spacing over the axes.
    pub fn max_spacing(&self) -> f64 {
        (0..self.dim()).map(|a| self.spacing(a)).fold(0.0, f64::max)
    }

    #[inline]
    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        let n = self.nodes[axis];
        if n <= 1 {
            return self.lo[axis];
        }
        let (lo, hi) = (self.lo[axis], self.hi[axis]);
        let t = i as f64 / (n - 1) as f64;
        // symmetric boxes hit 0 exactly at the middle node
        lo * (1.0 - t) + hi * t
    }

    /// 1-D coordinates of one axis.
    pub fn axis(&self, axis: usize) -> Vec<f64> {
        (0..self.nodes[axis]).map(|i| self.coord(axis, i)).collect()
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for a in (0..self.dim()).rev() {
            idx[a] = flat % self.nodes[a];
            flat /= self.nodes[a];
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(&self.nodes)
            .fold(0, |acc, (&i, &n)| acc * n + i)
    }

    pub fn node(&self, flat: usize) -> Vec<f64> {
        self.multi_index(flat)
            .iter()
            .enumerate()
            .map(|(a, &i)| self.coord(a, i))
            .collect()
    }

    /// All node coordinates, in flat order.
    pub fn points(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|f| self.node(f)).collect()
    }

    pub fn is_boundary(&self, flat: usize) -> bool {
        self.multi_index(flat)
            .iter()
            .zip(&self.nodes)
            .any(|(&i, &n)| n > 1 && (i == 0 || i + 1 == n))
    }

    /// True when the node lies in the centered sub-box holding `fraction` of
    /// each axis' extent.
    pub fn in_central(&self, flat: usize, fraction: f64) -> bool {
        let x = self.node(flat);
        (0..self.dim()).all(|a| {
            let mid = 0.5 * (self.lo[a] + self.hi[a]);
            let half = 0.5 * (self.hi[a] - self.lo[a]) * fraction;
            (x[a] - mid).abs() <= half + 1e-12 * (1.0 + half)
        })
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter().enumerate().all(|(a, &v)| {
                let slack = 1e-12 * (1.0 + self.hi[a].abs().max(self.lo[a].abs()));
                v >= self.lo[a] - slack && v <= self.hi[a] + slack
            })
    }

    /// Index of the nearest node on one axis.
    pub fn nearest(&self, axis: usize, v: f64) -> usize {
        let h = self.spacing(axis);
        if h == 0.0 {
            return 0;
        }
        let t = ((v - self.lo[axis]) / h).round();
        t.clamp(0.0, (self.nodes[axis] - 1) as f64) as usize
    }
}

/// Extended-real function sampled on a [`Grid`], evaluated off-grid by
/// multilinear interpolation and equal to `+∞` outside the box.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFn {
    space: Space,
    grid: Grid,
    values: Vec<ExtReal>,
}

impl GridFn {
    pub fn new(grid: Grid, values: Vec<ExtReal>) -> Result<Self> {
        let space = Space::Euclidean(grid.dim());
        Self::with_space(space, grid, values)
    }

    pub fn with_space(space: Space, grid: Grid, values: Vec<ExtReal>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Dimension {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if space.dim() != grid.dim() {
            return Err(Error::Dimension {
                expected: space.dim(),
                got: grid.dim(),
            });
        }
        Ok(GridFn {
            space,
            grid,
            values,
        })
    }

    /// Sample `f` at every node.
    pub fn from_fn(grid: Grid, f: impl Fn(&[f64]) -> ExtReal + Sync) -> Self {
        let values = (0..grid.len())
            .into_par_iter()
            .map(|i| f(&grid.node(i)))
            .collect();
        GridFn {
            space: Space::Euclidean(grid.dim()),
            grid,
            values,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn values(&self) -> &[ExtReal] {
        &self.values
    }

    pub fn value_at(&self, flat: usize) -> ExtReal {
        self.values[flat]
    }

    pub fn is_everywhere_infinite(&self) -> bool {
        self.values.iter().all(|v| v.is_infinite())
    }

    /// Multilinear interpolation; `+∞` outside the box or when a corner
    /// with positive weight is infinite.
    pub fn eval(&self, x: &[f64]) -> ExtReal {
        if !self.grid.contains(x) {
            return ExtReal::INFINITY;
        }
        let d = self.grid.dim();
        let mut base = vec![0usize; d];
        let mut frac = vec![0.0; d];
        for a in 0..d {
            let h = self.grid.spacing(a);
            if h == 0.0 {
                continue;
            }
            let t = ((x[a] - self.grid.lo[a]) / h).clamp(0.0, (self.grid.nodes[a] - 1) as f64);
            let mut i = t.floor() as usize;
            if i + 1 >= self.grid.nodes[a] {
                i = self.grid.nodes[a] - 1;
            }
            let mut f = t - i as f64;
            if f < 1e-12 {
                f = 0.0;
            } else if f > 1.0 - 1e-12 {
                i += 1;
                f = 0.0;
            }
            base[a] = i;
            frac[a] = f;
        }
        let mut acc = 0.0;
        let mut idx = vec![0usize; d];
        for corner in 0..(1usize << d) {
            let mut w = 1.0;
            for a in 0..d {
                let up = (corner >> a) & 1 == 1;
                if up {
                    w *= frac[a];
                    idx[a] = base[a] + 1;
                } else {
                    w *= 1.0 - frac[a];
                    idx[a] = base[a];
                }
            }
            if w == 0.0 {
                continue;
            }
            let v = self.values[self.grid.flat_index(&idx)];
            if v.is_infinite() {
                return ExtReal::INFINITY;
            }
            acc += w * v.get();
        }
        ExtReal::finite(acc)
    }

    /// Midpoint inequality on every triple of consecutive nodes along each
    /// axis. Returns the first violation beyond `tol`.
    pub fn check_convex(&self, tol: f64) -> std::result::Result<(), ConvexityViolation> {
        let g = &self.grid;
        for flat in 0..g.len() {
            let idx = g.multi_index(flat);
            for a in 0..g.dim() {
                if idx[a] == 0 || idx[a] + 1 >= g.nodes[a] {
                    continue;
                }
                let mut lo = idx.clone();
                lo[a] -= 1;
                let mut hi = idx.clone();
                hi[a] += 1;
                let fl = self.values[g.flat_index(&lo)];
                let fh = self.values[g.flat_index(&hi)];
                if fl.is_infinite() || fh.is_infinite() {
                    continue;
                }
                let fm = self.values[flat];
                let excess = fm.get() - 0.5 * (fl.get() + fh.get());
                if excess > tol {
                    return Err(ConvexityViolation {
                        node: g.node(flat),
                        axis: a,
                        excess,
                    });
                }
            }
        }
        Ok(())
    }

    /// Brute-force discrete conjugate `g(y) = max_x ⟨x, y⟩ − f(x)` over the
    /// finite nodes. Output nodes are computed in parallel; each maximum is
    /// reduced sequentially in node order, so results are bit-identical to a
    /// sequential run.
    pub fn conjugate(&self, dual: &Grid) -> Result<Conjugate> {
        if dual.dim() != self.grid.dim() {
            return Err(Error::Dimension {
                expected: self.grid.dim(),
                got: dual.dim(),
            });
        }
        let finite: Vec<(usize, Vec<f64>, f64)> = (0..self.grid.len())
            .filter_map(|i| {
                self.values[i]
                    .finite_value()
                    .map(|v| (i, self.grid.node(i), v))
            })
            .collect();
        if finite.is_empty() {
            return Err(Error::DomainEmpty("function is +inf on every grid node".into()));
        }
        let results: Vec<(ExtReal, bool)> = (0..dual.len())
            .into_par_iter()
            .map(|j| {
                let y = dual.node(j);
                let mut best = f64::NEG_INFINITY;
                let mut arg = 0usize;
                for (k, (_, x, fx)) in finite.iter().enumerate() {
                    let v = crate::point::dot(x, &y) - fx;
                    if v > best {
                        best = v;
                        arg = k;
                    }
                }
                let flag = self.edge_growth(finite[arg].0, &y, best);
                (ExtReal::finite(best), flag)
            })
            .collect();
        let (values, edge_flags): (Vec<_>, Vec<_>) = results.into_iter().unzip();
        Ok(Conjugate {
            function: GridFn {
                space: self.space,
                grid: dual.clone(),
                values,
            },
            edge_flags,
        })
    }

    /// Whether the objective `⟨x, y⟩ − f(x)` still increases when stepping
    /// outward from a maximizer sitting on the box boundary. The outward
    /// increment is extrapolated from the last two inward increments, so a
    /// maximum reached exactly at the edge (or along a flat direction
    /// through it) is not mistaken for growth.
    fn edge_growth(&self, flat: usize, y: &[f64], best: f64) -> bool {
        let g = &self.grid;
        let idx = g.multi_index(flat);
        let objective = |nb: &[usize]| {
            let nf = g.flat_index(nb);
            self.values[nf]
                .finite_value()
                .map(|fv| crate::point::dot(&g.node(nf), y) - fv)
        };
        for a in 0..g.dim() {
            let n = g.nodes[a];
            if n < 2 {
                continue;
            }
            let step: isize = if idx[a] == 0 {
                1
            } else if idx[a] + 1 == n {
                -1
            } else {
                continue;
            };
            let at = |k: isize| {
                let mut nb = idx.clone();
                nb[a] = (idx[a] as isize + k * step) as usize;
                nb
            };
            let Some(v1) = objective(&at(1)) else {
                continue;
            };
            let d1 = best - v1;
            let outward = match (n >= 3).then(|| objective(&at(2))).flatten() {
                Some(v2) => 2.0 * d1 - (v1 - v2),
                None => d1,
            };
            if outward > EDGE_SLOPE_TOL * g.spacing(a) {
                return true;
            }
        }
        false
    }


    /// Conjugate by successive 1-D linear-time Legendre transforms, one axis
    /// at a time. Agrees with [`GridFn::conjugate`] to rounding; edge
    /// diagnostics are not computed on this path.
    pub fn conjugate_lft(&self, dual: &Grid) -> Result<GridFn> {
        let d = self.grid.dim();
        if dual.dim() != d {
            return Err(Error::Dimension {
                expected: d,
                got: dual.dim(),
            });
        }
        if self.is_everywhere_infinite() {
            return Err(Error::DomainEmpty("function is +inf on every grid node".into()));
        }
        // `u` holds the function being transformed; +inf marks skipped nodes.
        let mut shape: Vec<usize> = self.grid.nodes.clone();
        let mut data: Vec<f64> = self.values.iter().map(|v| v.get()).collect();
        for axis in (0..d).rev() {
            let xs = self.grid.axis(axis);
            let ys = dual.axis(axis);
            let inner: usize = shape[axis + 1..].iter().product();
            let outer: usize = shape[..axis].iter().product();
            let n_in = shape[axis];
            let n_out = ys.len();
            let mut next = vec![0.0; outer * n_out * inner];
            let mut line = vec![0.0; n_in];
            for o in 0..outer {
                for i in 0..inner {
                    for k in 0..n_in {
                        let v = data[(o * n_in + k) * inner + i];
                        // after the first pass the stored value is g; the next
                        // transform acts on −g
                        line[k] = if axis == d - 1 { v } else { -v };
                    }
                    let out = legendre_1d(&xs, &line, &ys);
                    for (k, v) in out.into_iter().enumerate() {
                        next[(o * n_out + k) * inner + i] = v;
                    }
                }
            }
            shape[axis] = n_out;
            data = next;
        }
        let values = data
            .into_iter()
            .map(|v| {
                if v == f64::NEG_INFINITY {
                    // all primal nodes infinite on this line; cannot happen
                    // after the emptiness check, kept for safety
                    ExtReal::INFINITY
                } else {
                    ExtReal::new(v)
                }
            })
            .collect();
        GridFn::with_space(self.space, dual.clone(), values)
    }
}

const EDGE_SLOPE_TOL: f64 = 1e-9;

/// `max_i (x_i y − u_i)` for every `y`, skipping `u_i = +∞`. Returns `−∞`
/// when every `u_i` is infinite. `xs` and `ys` must be increasing.
pub fn legendre_1d(xs: &[f64], u: &[f64], ys: &[f64]) -> Vec<f64> {
    // lower convex hull of the finite points (x_i, u_i)
    let mut hull: Vec<usize> = Vec::new();
    for i in 0..xs.len() {
        if !u[i].is_finite() {
            continue;
        }
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            let cross = (xs[b] - xs[a]) * (u[i] - u[a]) - (u[b] - u[a]) * (xs[i] - xs[a]);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    if hull.is_empty() {
        return vec![f64::NEG_INFINITY; ys.len()];
    }
    let mut out = Vec::with_capacity(ys.len());
    let mut p = 0;
    for &y in ys {
        while p + 1 < hull.len() {
            let cur = xs[hull[p]] * y - u[hull[p]];
            let nxt = xs[hull[p + 1]] * y - u[hull[p + 1]];
            if nxt >= cur {
                p += 1;
            } else {
                break;
            }
        }
        out.push(xs[hull[p]] * y - u[hull[p]]);
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvexityViolation {
    pub node: Vec<f64>,
    pub axis: usize,
    pub excess: f64,
}

/// A discrete conjugate together with per-node diagnostics: a flag marks a
/// dual node whose supremum was still growing at the primal box edge, so the
/// stored value is only a lower bound (possibly for `+∞`).
#[derive(Debug, Clone)]
pub struct Conjugate {
    pub function: GridFn,
    pub edge_flags: Vec<bool>,
}

impl Conjugate {
    pub fn unbounded_warning(&self) -> bool {
        self.edge_flags.iter().any(|&f| f)
    }

    /// Replace flagged values by `+∞`.
    pub fn flagged_as_infinite(self) -> GridFn {
        let mut f = self.function;
        for (v, &flag) in f.values.iter_mut().zip(&self.edge_flags) {
            if flag {
                *v = ExtReal::INFINITY;
            }
        }
        f
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridFnDoc {
    space: Space,
    #[serde(rename = "box")]
    bounds: Vec<[f64; 2]>,
    nodes: Vec<usize>,
    values: Vec<ExtReal>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pairing: Option<String>,
}

impl GridFn {
    /// JSON document `{space, box, nodes, values}` with `"inf"` for `+∞`.
    pub fn to_json(&self) -> String {
        self.to_json_with_pairing(None)
    }

    pub(crate) fn to_json_with_pairing(&self, pairing: Option<&str>) -> String {
        let doc = GridFnDoc {
            space: self.space,
            bounds: self
                .grid
                .lo
                .iter()
                .zip(&self.grid.hi)
                .map(|(&l, &h)| [l, h])
                .collect(),
            nodes: self.grid.nodes.clone(),
            values: self.values.clone(),
            pairing: pairing.map(str::to_owned),
        };
        serde_json::to_string_pretty(&doc).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(Self::from_json_with_pairing(s)?.0)
    }

    pub(crate) fn from_json_with_pairing(s: &str) -> Result<(Self, Option<String>)> {
        let doc: GridFnDoc = serde_json::from_str(s)?;
        let grid = Grid::new(
            doc.bounds.iter().map(|b| b[0]).collect(),
            doc.bounds.iter().map(|b| b[1]).collect(),
            doc.nodes,
        )?;
        Ok((GridFn::with_space(doc.space, grid, doc.values)?, doc.pairing))
    }
}
