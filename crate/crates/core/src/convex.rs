//! Convex lower-semicontinuous functions, closed-form or grid-sampled, with
//! Fenchel conjugation, subdifferential membership and inf-convolution.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::cone::Cone;
use crate::ereal::ExtReal;
use crate::error::{Error, Result};
use crate::grid::{Grid, GridFn};
use crate::point::{dot, norm, Point};
use crate::search::{zoom_max, ZoomOptions};

/// Coordinate tolerance for point and set membership of closed forms.
pub const TOL_MEMBER: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum ConvexFn {
    /// `½ xᵀQx + ⟨l, x⟩ + c` with `Q` symmetric positive semidefinite.
    Quadratic {
        q: Vec<Vec<f64>>,
        lin: Vec<f64>,
        constant: f64,
    },
    /// `s‖x‖`, `s ≥ 0`.
    NormScaled { scale: f64 },
    /// Indicator of the closed ball of the given radius.
    IndicatorBall { radius: f64 },
    IndicatorCone(Cone),
    SupportFn(Cone),
    /// `⟨l, x⟩ + c`.
    Affine { lin: Vec<f64>, constant: f64 },
    /// `offset` at `at`, `+∞` elsewhere.
    IndicatorPoint { at: Vec<f64>, offset: f64 },
    /// Indicator of a box; bounds may be infinite.
    IndicatorBox { lo: Vec<f64>, hi: Vec<f64> },
    /// Support function of a box.
    SupportBox { lo: Vec<f64>, hi: Vec<f64> },
    /// `t · f(x / t)`, `t > 0`.
    Perspective { t: f64, f: Box<ConvexFn> },
    /// Positive combination `Σ wᵢ fᵢ`.
    Sum(Vec<(f64, ConvexFn)>),
    Grid(GridFn),
}

impl ConvexFn {
    /// `‖x‖²/2` on `R^n`.
    pub fn half_square(n: usize) -> Self {
        ConvexFn::Quadratic {
            q: identity(n),
            lin: vec![0.0; n],
            constant: 0.0,
        }
    }

    /// `|x|` (the unit-scaled norm).
    pub fn abs() -> Self {
        ConvexFn::NormScaled { scale: 1.0 }
    }

    /// Indicator of `{0}` in `R^n`.
    pub fn zero_indicator(n: usize) -> Self {
        ConvexFn::IndicatorPoint {
            at: vec![0.0; n],
            offset: 0.0,
        }
    }

    /// Indicator of `(−∞, 0]` on the line.
    pub fn nonpositive_ray() -> Self {
        ConvexFn::IndicatorBox {
            lo: vec![f64::NEG_INFINITY],
            hi: vec![0.0],
        }
    }

    /// Indicator of `[0, ∞)` on the line.
    pub fn nonnegative_ray() -> Self {
        ConvexFn::IndicatorBox {
            lo: vec![0.0],
            hi: vec![f64::INFINITY],
        }
    }

    pub fn sum(terms: Vec<(f64, ConvexFn)>) -> Result<Self> {
        if terms.iter().any(|(w, _)| !(*w > 0.0 && w.is_finite())) {
            return Err(Error::InvalidParameter(
                "combination weights must be positive (0 * inf is undefined)".into(),
            ));
        }
        Ok(ConvexFn::Sum(terms))
    }

    pub fn perspective(t: f64, f: ConvexFn) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidParameter(format!("perspective scale {t} must be > 0")));
        }
        Ok(ConvexFn::Perspective { t, f: Box::new(f) })
    }

    /// Fixed dimension, when the representation carries one.
    pub fn dim(&self) -> Option<usize> {
        match self {
            ConvexFn::Quadratic { lin, .. } | ConvexFn::Affine { lin, .. } => Some(lin.len()),
            ConvexFn::IndicatorPoint { at, .. } => Some(at.len()),
            ConvexFn::IndicatorBox { lo, .. } | ConvexFn::SupportBox { lo, .. } => Some(lo.len()),
            ConvexFn::IndicatorCone(c) | ConvexFn::SupportFn(c) => Some(c.space().dim()),
            ConvexFn::Grid(g) => Some(g.grid().dim()),
            ConvexFn::Perspective { f, .. } => f.dim(),
            ConvexFn::Sum(terms) => terms.iter().find_map(|(_, f)| f.dim()),
            ConvexFn::NormScaled { .. } | ConvexFn::IndicatorBall { .. } => None,
        }
    }

    /// Evaluate at a coordinate vector. Dimension agreement is the caller's
    /// responsibility; see [`ConvexFn::eval_point`] for a checked variant.
    pub fn eval(&self, x: &[f64]) -> ExtReal {
        match self {
            ConvexFn::Quadratic { q, lin, constant } => {
                let mut s = 0.0;
                for (i, row) in q.iter().enumerate() {
                    s += x[i] * dot(row, x);
                }
                ExtReal::finite(0.5 * s + dot(lin, x) + constant)
            }
            ConvexFn::NormScaled { scale } => ExtReal::finite(scale * norm(x)),
            ConvexFn::IndicatorBall { radius } => {
                ExtReal::indicator(norm(x) <= radius + TOL_MEMBER * (1.0 + radius))
            }
            ConvexFn::IndicatorCone(c) => ExtReal::indicator(c.contains_coords(x)),
            ConvexFn::SupportFn(c) => c.support_coords(x),
            ConvexFn::Affine { lin, constant } => ExtReal::finite(dot(lin, x) + constant),
            ConvexFn::IndicatorPoint { at, offset } => {
                if at.iter().zip(x).all(|(a, b)| (a - b).abs() <= TOL_MEMBER) {
                    ExtReal::finite(*offset)
                } else {
                    ExtReal::INFINITY
                }
            }
            ConvexFn::IndicatorBox { lo, hi } => ExtReal::indicator(
                x.iter()
                    .zip(lo.iter().zip(hi))
                    .all(|(&v, (&l, &h))| v >= l - TOL_MEMBER && v <= h + TOL_MEMBER),
            ),
            ConvexFn::SupportBox { lo, hi } => {
                let mut s = 0.0;
                for ((&v, &l), &h) in x.iter().zip(lo).zip(hi) {
                    if v > TOL_MEMBER {
                        if h.is_infinite() {
                            return ExtReal::INFINITY;
                        }
                        s += h * v;
                    } else if v < -TOL_MEMBER {
                        if l.is_infinite() {
                            return ExtReal::INFINITY;
                        }
                        s += l * v;
                    }
                }
                ExtReal::finite(s)
            }
            ConvexFn::Perspective { t, f } => {
                let scaled: Vec<f64> = x.iter().map(|v| v / t).collect();
                let v = f.eval(&scaled);
                if v.is_infinite() {
                    v
                } else {
                    ExtReal::finite(t * v.get())
                }
            }
            ConvexFn::Sum(terms) => {
                let mut acc = 0.0;
                for (w, f) in terms {
                    let v = f.eval(x);
                    if v.is_infinite() {
                        return ExtReal::INFINITY;
                    }
                    acc += w * v.get();
                }
                ExtReal::finite(acc)
            }
            ConvexFn::Grid(g) => g.eval(x),
        }
    }

    pub fn eval_point(&self, p: &Point) -> Result<ExtReal> {
        if let Some(d) = self.dim() {
            if d != p.dim() {
                return Err(Error::Dimension {
                    expected: d,
                    got: p.dim(),
                });
            }
        }
        Ok(self.eval(p.coords()))
    }

    /// Closed-form conjugate, when the representation has one.
    pub fn conjugate_closed_form(&self) -> Option<ConvexFn> {
        match self {
            ConvexFn::Quadratic { q, lin, constant } => {
                let n = lin.len();
                let m = DMatrix::from_fn(n, n, |i, j| q[i][j]);
                let inv = m.cholesky()?.inverse();
                let l = DVector::from_column_slice(lin);
                let il = &inv * &l;
                Some(ConvexFn::Quadratic {
                    q: (0..n).map(|i| (0..n).map(|j| inv[(i, j)]).collect()).collect(),
                    lin: il.iter().map(|v| -v).collect(),
                    constant: 0.5 * l.dot(&il) - constant,
                })
            }
            ConvexFn::NormScaled { scale } => Some(ConvexFn::IndicatorBall { radius: *scale }),
            ConvexFn::IndicatorBall { radius } => Some(ConvexFn::NormScaled { scale: *radius }),
            ConvexFn::IndicatorCone(c) => Some(ConvexFn::SupportFn(*c)),
            ConvexFn::SupportFn(c) => Some(ConvexFn::IndicatorCone(*c)),
            ConvexFn::Affine { lin, constant } => Some(ConvexFn::IndicatorPoint {
                at: lin.clone(),
                offset: -constant,
            }),
            ConvexFn::IndicatorPoint { at, offset } => Some(ConvexFn::Affine {
                lin: at.clone(),
                constant: -offset,
            }),
            ConvexFn::IndicatorBox { lo, hi } => Some(ConvexFn::SupportBox {
                lo: lo.clone(),
                hi: hi.clone(),
            }),
            ConvexFn::SupportBox { lo, hi } => Some(ConvexFn::IndicatorBox {
                lo: lo.clone(),
                hi: hi.clone(),
            }),
            // (t f(·/t))* = t f*
            ConvexFn::Perspective { t, f } => {
                Some(ConvexFn::Sum(vec![(*t, f.conjugate_closed_form()?)]))
            }
            ConvexFn::Sum(terms) if terms.len() == 1 => {
                // (w f)* (y) = w f*(y / w), a perspective of f*
                let (w, f) = &terms[0];
                Some(ConvexFn::Perspective {
                    t: *w,
                    f: Box::new(f.conjugate_closed_form()?),
                })
            }
            ConvexFn::Sum(_) | ConvexFn::Grid(_) => None,
        }
    }

    /// Sample on a grid.
    pub fn sample(&self, grid: &Grid) -> GridFn {
        GridFn::from_fn(grid.clone(), |x| self.eval(x))
    }

    /// Midpoint convexity of the sampled function.
    pub fn check_convex_on(&self, grid: &Grid, tol: f64) -> Result<()> {
        self.sample(grid).check_convex(tol).map_err(|v| {
            Error::Convexity(format!(
                "midpoint excess {:e} at {:?} along axis {}",
                v.excess, v.node, v.axis
            ))
        })
    }
}

fn identity(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

/// Outcome of [`fenchel_conjugate`].
#[derive(Debug, Clone)]
pub struct ConjugateResult {
    pub function: ConvexFn,
    /// Set when some dual node's supremum was still growing at the edge of
    /// the primal box (the stored value is then a lower bound).
    pub unbounded_warning: bool,
    pub edge_flags: Vec<bool>,
}

/// Fenchel conjugate `f*(y) = sup_x ⟨x, y⟩ − f(x)`.
///
/// Closed forms with known conjugates return them. Grid functions are
/// conjugated by brute force onto `dual`; other representations are first
/// sampled on `primal`, which is then required.
pub fn fenchel_conjugate(f: &ConvexFn, dual: &Grid, primal: Option<&Grid>) -> Result<ConjugateResult> {
    if let Some(g) = f.conjugate_closed_form() {
        return Ok(ConjugateResult {
            function: g,
            unbounded_warning: false,
            edge_flags: Vec::new(),
        });
    }
    let sampled;
    let gf = match f {
        ConvexFn::Grid(g) => g,
        _ => {
            let primal = primal.ok_or_else(|| {
                Error::InvalidParameter("no closed-form conjugate; a primal grid is required".into())
            })?;
            sampled = f.sample(primal);
            &sampled
        }
    };
    let c = gf.conjugate(dual)?;
    Ok(ConjugateResult {
        unbounded_warning: c.unbounded_warning(),
        edge_flags: c.edge_flags.clone(),
        function: ConvexFn::Grid(c.function),
    })
}

/// Pointwise conjugate `sup_x ⟨x, y⟩ − f(x)` over the box `[lo, hi]`,
/// refined beyond the lattice by [`zoom_max`]. The flag reports a maximizer
/// on the box boundary.
pub fn conjugate_at(f: &ConvexFn, y: &[f64], lo: &[f64], hi: &[f64], opts: ZoomOptions) -> Result<(ExtReal, bool)> {
    if let Some(g) = f.conjugate_closed_form() {
        return Ok((g.eval(y), false));
    }
    let mut obj = |x: &[f64]| {
        let v = f.eval(x);
        if v.is_infinite() {
            f64::NEG_INFINITY
        } else {
            dot(x, y) - v.get()
        }
    };
    let (arg, best) = zoom_max(&mut obj, lo, hi, opts);
    if best == f64::NEG_INFINITY {
        return Err(Error::DomainEmpty("function is +inf on the search box".into()));
    }
    let on_edge = arg
        .iter()
        .enumerate()
        .any(|(a, &v)| (v - lo[a]).abs() < 1e-12 || (v - hi[a]).abs() < 1e-12);
    Ok((ExtReal::finite(best), on_edge))
}

/// Whether `y ∈ ∂f(x)`, tested by the Fenchel–Young equality
/// `f(x) + f*(y) − ⟨x, y⟩ ≤ tol`. Closed forms use their exact conjugate;
/// grid functions the discrete conjugate over their own nodes.
pub fn subdifferential_test(f: &ConvexFn, x: &[f64], y: &[f64], tol: f64) -> Result<bool> {
    Ok(fenchel_young_gap(f, x, y)? <= tol)
}

/// `f(x) + f*(y) − ⟨x, y⟩`, `+∞` when `y ∉ dom f*`.
pub fn fenchel_young_gap(f: &ConvexFn, x: &[f64], y: &[f64]) -> Result<f64> {
    let fx = f.eval(x);
    if fx.is_infinite() {
        return Err(Error::Domain(format!("{x:?} is outside dom f")));
    }
    let fs = match f.conjugate_closed_form() {
        Some(g) => g.eval(y),
        None => match f {
            ConvexFn::Grid(g) => {
                let mut best = f64::NEG_INFINITY;
                for i in 0..g.grid().len() {
                    if let Some(v) = g.value_at(i).finite_value() {
                        best = best.max(dot(&g.grid().node(i), y) - v);
                    }
                }
                ExtReal::finite(best)
            }
            _ => {
                return Err(Error::InvalidParameter(
                    "no closed-form conjugate; sample the function on a grid first".into(),
                ))
            }
        },
    };
    Ok((fx + fs - dot(x, y)).get())
}

/// Inf-convolution `(f1 □ f2)(x) = min_z f1(z) + f2(x − z)`, the minimum
/// taken over the grid nodes `z`, evaluated at every node `x`.
pub fn inf_convolution(f1: &ConvexFn, f2: &ConvexFn, grid: &Grid) -> Result<GridFn> {
    let nodes = grid.points();
    let f1_vals: Vec<(usize, f64)> = nodes
        .iter()
        .enumerate()
        .filter_map(|(i, z)| f1.eval(z).finite_value().map(|v| (i, v)))
        .collect();
    let values: Vec<ExtReal> = nodes
        .par_iter()
        .map(|x| {
            let mut best = f64::INFINITY;
            let mut diff = vec![0.0; x.len()];
            for &(i, v1) in &f1_vals {
                for (d, (a, b)) in diff.iter_mut().zip(x.iter().zip(&nodes[i])) {
                    *d = a - b;
                }
                let v2 = f2.eval(&diff);
                if v2.is_finite() {
                    best = best.min(v1 + v2.get());
                }
            }
            ExtReal::new(best)
        })
        .collect();
    if values.iter().all(|v| v.is_infinite()) {
        return Err(Error::DomainEmpty("inf-convolution is +inf on the grid".into()));
    }
    GridFn::new(grid.clone(), values)
}
