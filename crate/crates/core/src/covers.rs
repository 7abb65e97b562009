//! Convex lagrangian covers `λ ↦ φ_λ` over a compact parameter set, the
//! bipotential `b(x, y) = inf_λ φ_λ(x) + φ_λ*(y)` they build, the implicit
//! and Fan convexity checks, and the minimax identity `b(x, ·) = x̄*`.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bipotential::{Bipotential, Kind};
use crate::convex::{fenchel_conjugate, fenchel_young_gap, ConjugateResult, ConvexFn};
use crate::ereal::ExtReal;
use crate::error::{Error, Result};
use crate::grid::{Grid, GridFn};
use crate::point::{dot, Space};
use crate::search::{ellipsoid_max, mesh_max, mesh_min, zoom_max, ZoomOptions};

/// Default tolerance of the convexity searches.
const ELLIPSOID_ITERS: usize = 150;
const GRADIENT_STEP: f64 = 1e-6;

pub const TOL_FAN: f64 = 1e-9;

/// A compact parameter set realized as a finite sorted sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LambdaSet {
    /// `nodes` equally spaced samples of `[lo, hi]`; minima and maxima over
    /// the set are refined between neighbouring nodes by golden section.
    Interval { lo: f64, hi: f64, nodes: usize },
    /// An explicit finite set, searched exhaustively.
    Finite(Vec<f64>),
}

impl LambdaSet {
    pub fn interval(lo: f64, hi: f64, nodes: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo > hi {
            return Err(Error::InvalidParameter(format!("bad parameter interval [{lo}, {hi}]")));
        }
        if nodes == 0 || (lo < hi && nodes < 2) {
            return Err(Error::InvalidParameter(format!("{nodes} nodes cannot sample [{lo}, {hi}]")));
        }
        Ok(LambdaSet::Interval { lo, hi, nodes })
    }

    /// Sorted, deduplicated finite set. May be empty; covers over an empty
    /// set are rejected when the bipotential is built.
    pub fn finite(mut values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("parameter values must be finite".into()));
        }
        values.sort_by(f64::total_cmp);
        values.dedup();
        Ok(LambdaSet::Finite(values))
    }

    pub fn mesh(&self) -> Vec<f64> {
        match self {
            LambdaSet::Interval { lo, hi, nodes } => {
                if *nodes == 1 {
                    return vec![*lo];
                }
                (0..*nodes)
                    .map(|i| {
                        let t = i as f64 / (*nodes - 1) as f64;
                        lo * (1.0 - t) + hi * t
                    })
                    .collect()
            }
            LambdaSet::Finite(v) => v.clone(),
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, LambdaSet::Finite(v) if v.is_empty())
    }

    pub fn bounds(&self) -> Option<(f64, f64)> {
        let m = self.mesh();
        Some((*m.first()?, *m.last()?))
    }

    /// Whether searches refine between mesh nodes.
    pub fn refinable(&self) -> bool {
        matches!(self, LambdaSet::Interval { nodes, .. } if *nodes >= 2)
    }

    /// The same interval with another node count; finite sets are unchanged.
    pub fn with_nodes(&self, n: usize) -> Result<Self> {
        match *self {
            LambdaSet::Interval { lo, hi, .. } => LambdaSet::interval(lo, hi, n),
            LambdaSet::Finite(_) => Ok(self.clone()),
        }
    }
}

/// A member `φ` of an explicit cover together with its conjugate.
#[derive(Debug, Clone)]
pub struct Member {
    pub phi: ConvexFn,
    pub phi_star: ConvexFn,
}

impl Member {
    pub fn new(phi: ConvexFn, phi_star: ConvexFn) -> Self {
        Member { phi, phi_star }
    }

    /// Conjugate in closed form when known, otherwise by brute force onto
    /// `dual` (primal samples on `primal` unless `phi` is itself a grid
    /// function). Dual nodes whose supremum reaches the primal edge are `+∞`.
    pub fn derived(phi: ConvexFn, primal: &Grid, dual: &Grid) -> Result<Self> {
        let c = fenchel_conjugate(&phi, dual, Some(primal))?;
        Ok(Member {
            phi,
            phi_star: flagged_to_infinity(c)?,
        })
    }
}

fn flagged_to_infinity(c: ConjugateResult) -> Result<ConvexFn> {
    match c.function {
        ConvexFn::Grid(g) if c.unbounded_warning => {
            let values = g
                .values()
                .iter()
                .zip(&c.edge_flags)
                .map(|(&v, &f)| if f { ExtReal::INFINITY } else { v })
                .collect();
            Ok(ConvexFn::Grid(GridFn::with_space(g.space(), g.grid().clone(), values)?))
        }
        f => Ok(f),
    }
}

#[derive(Debug, Clone)]
pub enum CoverFamily {
    /// `φ_λ = (λ/2)‖x‖²`, `λ > 0`, with `φ_λ* = ‖y‖²/(2λ)`.
    QuadraticScaling,
    /// `φ_λ = ½‖x − λe₁‖²`, with `φ_λ* = ½‖y‖² + λy₁`.
    ShiftedQuadratics,
    /// `φ_λ` the indicator of `points[λ]`; `λ` is an index.
    PointIndicators { points: Vec<Vec<f64>> },
    /// Caller-supplied members; `λ` is an index.
    Explicit { members: Vec<Member> },
}

/// A convex lagrangian cover: a parameter set and a family of members.
#[derive(Debug, Clone)]
pub struct Cover {
    dim: usize,
    lambda: LambdaSet,
    family: CoverFamily,
}

impl Cover {
    pub fn quadratic_scaling(dim: usize, lambda: LambdaSet) -> Result<Self> {
        check_cover_dim(dim)?;
        if lambda.bounds().is_some_and(|(lo, _)| lo <= 0.0) {
            return Err(Error::InvalidParameter("quadratic scaling needs λ > 0".into()));
        }
        Ok(Cover {
            dim,
            lambda,
            family: CoverFamily::QuadraticScaling,
        })
    }

    pub fn shifted_quadratics(dim: usize, lambda: LambdaSet) -> Result<Self> {
        check_cover_dim(dim)?;
        Ok(Cover {
            dim,
            lambda,
            family: CoverFamily::ShiftedQuadratics,
        })
    }

    /// Indicators of the given points, indexed by `λ ∈ {0, …, n−1}`.
    pub fn point_indicators(points: Vec<Vec<f64>>) -> Result<Self> {
        let dim = common_dim(points.iter().map(|p| Some(p.len())))?;
        let lambda = index_set(points.len());
        Ok(Cover {
            dim,
            lambda,
            family: CoverFamily::PointIndicators { points },
        })
    }

    pub fn explicit(members: Vec<Member>) -> Result<Self> {
        let dim = common_dim(members.iter().flat_map(|m| [m.phi.dim(), m.phi_star.dim()]))?;
        let lambda = index_set(members.len());
        Ok(Cover {
            dim,
            lambda,
            family: CoverFamily::Explicit { members },
        })
    }

    /// A one-member cover; its bipotential is the separable `φ(x) + φ*(y)`.
    pub fn single(phi: ConvexFn, phi_star: ConvexFn) -> Result<Self> {
        Cover::explicit(vec![Member::new(phi, phi_star)])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn space(&self) -> Space {
        Space::Euclidean(self.dim)
    }

    pub fn lambda(&self) -> &LambdaSet {
        &self.lambda
    }

    pub fn family(&self) -> &CoverFamily {
        &self.family
    }

    /// The same family over another parameter set. Indexed families accept
    /// subsets of their index range.
    pub fn with_lambda(&self, lambda: LambdaSet) -> Result<Self> {
        match &self.family {
            CoverFamily::QuadraticScaling => Cover::quadratic_scaling(self.dim, lambda),
            CoverFamily::ShiftedQuadratics => Cover::shifted_quadratics(self.dim, lambda),
            CoverFamily::PointIndicators { points } => self.indexed_subset(lambda, points.len()),
            CoverFamily::Explicit { members } => self.indexed_subset(lambda, members.len()),
        }
    }

    fn indexed_subset(&self, lambda: LambdaSet, n: usize) -> Result<Self> {
        let ok = match &lambda {
            LambdaSet::Finite(v) => v.iter().all(|&l| l >= 0.0 && l.fract() == 0.0 && (l as usize) < n),
            LambdaSet::Interval { .. } => false,
        };
        if !ok {
            return Err(Error::InvalidParameter(format!("indexed covers take subsets of 0..{n}")));
        }
        Ok(Cover {
            lambda,
            ..self.clone()
        })
    }

    fn index(l: f64) -> usize {
        l.round().max(0.0) as usize
    }

    /// `φ_λ(x)`.
    pub fn phi(&self, l: f64, x: &[f64]) -> ExtReal {
        match &self.family {
            CoverFamily::QuadraticScaling => ExtReal::new(0.5 * l * dot(x, x)),
            CoverFamily::ShiftedQuadratics => {
                let s: f64 = x.iter().enumerate().map(|(i, &v)| shifted(i, v, l).powi(2)).sum();
                ExtReal::new(0.5 * s)
            }
            CoverFamily::PointIndicators { points } => {
                ExtReal::indicator(points[Self::index(l)].iter().zip(x).all(|(p, v)| (p - v).abs() <= 1e-12))
            }
            CoverFamily::Explicit { members } => members[Self::index(l)].phi.eval(x),
        }
    }

    /// `φ_λ*(y)`.
    pub fn phi_star(&self, l: f64, y: &[f64]) -> ExtReal {
        match &self.family {
            CoverFamily::QuadraticScaling => ExtReal::new(dot(y, y) / (2.0 * l)),
            CoverFamily::ShiftedQuadratics => ExtReal::new(0.5 * dot(y, y) + l * y[0]),
            CoverFamily::PointIndicators { points } => ExtReal::new(dot(&points[Self::index(l)], y)),
            CoverFamily::Explicit { members } => members[Self::index(l)].phi_star.eval(y),
        }
    }

    /// `φ_λ` as a convex function, for independent checks.
    pub fn member(&self, l: f64) -> ConvexFn {
        let n = self.dim;
        match &self.family {
            CoverFamily::QuadraticScaling => ConvexFn::Quadratic {
                q: scaled_identity(n, l),
                lin: vec![0.0; n],
                constant: 0.0,
            },
            CoverFamily::ShiftedQuadratics => {
                let mut lin = vec![0.0; n];
                lin[0] = -l;
                ConvexFn::Quadratic {
                    q: scaled_identity(n, 1.0),
                    lin,
                    constant: 0.5 * l * l,
                }
            }
            CoverFamily::PointIndicators { points } => ConvexFn::IndicatorPoint {
                at: points[Self::index(l)].clone(),
                offset: 0.0,
            },
            CoverFamily::Explicit { members } => members[Self::index(l)].phi.clone(),
        }
    }

    fn b_lambda(&self, l: f64, x: &[f64], y: &[f64]) -> f64 {
        (self.phi(l, x) + self.phi_star(l, y)).get()
    }

    /// `sup_z ⟨z, y⟩ − max_λ d(λ, z)` over the box of `region`, where
    /// `d(λ, ·)` is `φ_λ` up to a constant: a lattice zoom polished by
    /// the ellipsoid method, with `y − ∇φ_λ̂(z)` for the active `λ̂` as
    /// supergradient.
    fn sup_min_aux(
        &self,
        mesh: &[f64],
        y: &[f64],
        region: &Grid,
        d: impl Fn(f64, &[f64]) -> f64,
        refine: bool,
    ) -> (Vec<f64>, f64) {
        let mut value = |z: &[f64]| dot(z, y) - mesh_max(mesh, refine && self.lambda.refinable(), |l| d(l, z)).1;
        let (start, v0) = zoom_max(&mut value, region.lo(), region.hi(), zoom_for(region));
        if !v0.is_finite() {
            return (start, v0);
        }
        let mut obj = |z: &[f64]| {
            let (l, m) = mesh_max(mesh, refine && self.lambda.refinable(), |l| d(l, z));
            if !m.is_finite() {
                return (f64::NEG_INFINITY, None);
            }
            let g = self.member_gradient(l, z).map(|g| y.iter().zip(&g).map(|(a, b)| a - b).collect());
            (dot(z, y) - m, g)
        };
        let iters = ELLIPSOID_ITERS * self.dim * self.dim;
        let (z, v) = ellipsoid_max(&mut obj, &start, region.lo(), region.hi(), iters);
        if v > v0 {
            (z, v)
        } else {
            (start, v0)
        }
    }

    /// Central-difference gradient of `φ_λ` at `z`, one-sided next to the
    /// edge of its domain.
    fn member_gradient(&self, l: f64, z: &[f64]) -> Option<Vec<f64>> {
        let mut w = z.to_vec();
        let mut g = vec![0.0; z.len()];
        for a in 0..z.len() {
            let h = GRADIENT_STEP * (1.0 + z[a].abs());
            w[a] = z[a] + h;
            let up = self.phi(l, &w);
            w[a] = z[a] - h;
            let down = self.phi(l, &w);
            w[a] = z[a];
            let mid = self.phi(l, z);
            g[a] = match (up.finite_value(), down.finite_value()) {
                (Some(u), Some(d)) => (u - d) / (2.0 * h),
                (Some(u), None) => (u - mid.finite_value()?) / h,
                (None, Some(d)) => (mid.finite_value()? - d) / h,
                (None, None) => return None,
            };
        }
        Some(g)
    }

    /// The proof's auxiliary function `⟨z, y⟩ + φ_λ(x) − φ_λ(z)`.
    fn aux(&self, l: f64, x: &[f64], y: &[f64], z: &[f64]) -> f64 {
        let pz = self.phi(l, z);
        if pz.is_infinite() {
            return f64::NEG_INFINITY;
        }
        dot(z, y) + self.phi(l, x).get() - pz.get()
    }

    fn check_point(&self, p: &[f64]) -> Result<()> {
        if p.len() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                got: p.len(),
            });
        }
        Ok(())
    }

    fn check_real_at(&self, mesh: &[f64], x: &[f64]) -> Result<()> {
        if let Some(&l) = mesh.iter().find(|&&l| self.phi(l, x).is_infinite()) {
            return Err(Error::Domain(format!("member λ = {l} is +inf at {x:?}")));
        }
        Ok(())
    }
}

fn shifted(i: usize, v: f64, l: f64) -> f64 {
    if i == 0 {
        v - l
    } else {
        v
    }
}

fn scaled_identity(n: usize, s: f64) -> Vec<Vec<f64>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { s } else { 0.0 }).collect()).collect()
}

fn index_set(n: usize) -> LambdaSet {
    LambdaSet::Finite((0..n).map(|i| i as f64).collect())
}

fn check_cover_dim(dim: usize) -> Result<()> {
    if dim == 0 {
        return Err(Error::InvalidParameter("cover dimension must be >= 1".into()));
    }
    Ok(())
}

fn common_dim(dims: impl Iterator<Item = Option<usize>>) -> Result<usize> {
    let mut found: Option<usize> = None;
    for d in dims.flatten() {
        match found {
            Some(f) if f != d => return Err(Error::Dimension { expected: f, got: d }),
            _ => found = Some(d),
        }
    }
    let d = found.unwrap_or(1);
    check_cover_dim(d)?;
    Ok(d)
}

/// The inf-construction `b(x, y) = min_λ φ_λ(x) + φ_λ*(y)`.
#[derive(Debug, Clone)]
pub struct CoverBipotential {
    cover: Cover,
    mesh: Vec<f64>,
    refine: bool,
}

pub fn build_from_cover(c: Cover) -> Result<CoverBipotential> {
    if c.lambda.is_empty() {
        return Err(Error::DomainEmpty("cover has an empty parameter set".into()));
    }
    Ok(CoverBipotential {
        mesh: c.lambda.mesh(),
        refine: c.lambda.refinable(),
        cover: c,
    })
}

impl CoverBipotential {
    pub fn cover(&self) -> &Cover {
        &self.cover
    }

    /// Minimize over the mesh nodes only.
    pub fn without_refinement(mut self) -> Self {
        self.refine = false;
        self
    }

    /// Minimizing parameter and the minimum.
    pub fn argmin(&self, x: &[f64], y: &[f64]) -> (f64, ExtReal) {
        let (l, v) = mesh_min(&self.mesh, self.refine, |l| self.cover.b_lambda(l, x, y));
        (l, ExtReal::new(v))
    }
}

impl Bipotential for CoverBipotential {
    fn primal_space(&self) -> Space {
        self.cover.space()
    }

    fn dual_space(&self) -> Space {
        self.cover.space()
    }

    fn kind(&self) -> Kind {
        Kind::CoverInf
    }

    fn eval_coords(&self, x: &[f64], y: &[f64]) -> ExtReal {
        self.argmin(x, y).1
    }
}

fn zoom_for(region: &Grid) -> ZoomOptions {
    ZoomOptions {
        initial_nodes: region.nodes().iter().copied().max().unwrap_or(2).max(3),
        ..ZoomOptions::default()
    }
}

fn on_box_edge(z: &[f64], region: &Grid) -> bool {
    z.iter().enumerate().any(|(a, &v)| {
        let (lo, hi) = (region.lo()[a], region.hi()[a]);
        let eps = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
        (v - lo).abs() <= eps || (v - hi).abs() <= eps
    })
}

/// `x̄*(y) = sup_z ⟨z, y⟩ − x̄(z)` over the box of `region`, refined beyond
/// the lattice. The flag reports a maximizer on the box edge.
pub fn xbar_conjugate_at(c: &Cover, x: &[f64], y: &[f64], region: &Grid) -> Result<(ExtReal, bool)> {
    c.check_point(x)?;
    c.check_point(y)?;
    let mesh = c.lambda.mesh();
    if mesh.is_empty() {
        return Err(Error::DomainEmpty("cover has an empty parameter set".into()));
    }
    c.check_real_at(&mesh, x)?;
    let (arg, best) = c.sup_min_aux(&mesh, y, region, |l, z| (c.phi(l, z) - c.phi(l, x).get()).get(), true);
    if best == f64::NEG_INFINITY {
        return Err(Error::DomainEmpty("x̄ is +inf on the search box".into()));
    }
    Ok((ExtReal::new(best), on_box_edge(&arg, region)))
}

/// `x̄*` on every node of `dual`, where `x̄(z) = max_λ φ_λ(z) − φ_λ(x)`.
/// Nodes whose supremum sits on the edge of `region` are set to `+∞` and
/// flagged.
pub fn xbar_conjugate(c: &Cover, x: &[f64], dual: &Grid, region: &Grid) -> Result<ConjugateResult> {
    if dual.dim() != c.dim || region.dim() != c.dim {
        return Err(Error::Dimension {
            expected: c.dim,
            got: if dual.dim() != c.dim { dual.dim() } else { region.dim() },
        });
    }
    let nodes = dual.points();
    let vals: Vec<(ExtReal, bool)> = nodes
        .par_iter()
        .map(|y| xbar_conjugate_at(c, x, y, region))
        .collect::<Result<_>>()?;
    let edge_flags: Vec<bool> = vals.iter().map(|v| v.1).collect();
    let values = vals
        .iter()
        .map(|&(v, f)| if f { ExtReal::INFINITY } else { v })
        .collect();
    Ok(ConjugateResult {
        function: ConvexFn::Grid(GridFn::with_space(c.space(), dual.clone(), values)?),
        unbounded_warning: edge_flags.iter().any(|&f| f),
        edge_flags,
    })
}

/// Both sides of `min_λ sup_z x̄y(λ, z) = sup_z min_λ x̄y(λ, z)` for the
/// auxiliary function `x̄y(λ, z) = ⟨z, y⟩ + φ_λ(x) − φ_λ(z)`, with the two
/// closed-form targets they must reproduce.
#[derive(Debug, Clone, Serialize)]
pub struct MinimaxReport {
    /// `min_λ sup_z`, which should equal `b(x, y)`.
    pub lhs: f64,
    /// `sup_z min_λ`, which should equal `x̄*(y)`.
    pub rhs: f64,
    pub gap: f64,
    pub b: f64,
    pub xbar_star: f64,
    /// Some supremum was attained on the edge of the search box.
    pub edge_limited: bool,
}

pub fn minimax_check(c: &Cover, x: &[f64], y: &[f64], region: &Grid) -> Result<MinimaxReport> {
    c.check_point(x)?;
    c.check_point(y)?;
    if region.dim() != c.dim {
        return Err(Error::Dimension {
            expected: c.dim,
            got: region.dim(),
        });
    }
    let bip = build_from_cover(c.clone())?;
    c.check_real_at(&bip.mesh, x)?;
    let opts = zoom_for(region);
    let sup_at = |l: f64| zoom_max(&mut |z: &[f64]| c.aux(l, x, y, z), region.lo(), region.hi(), opts);
    let (l_star, lhs) = mesh_min(&bip.mesh, bip.refine, |l| sup_at(l).1);
    let lhs_edge = on_box_edge(&sup_at(l_star).0, region);
    let (z_star, rhs) = c.sup_min_aux(&bip.mesh, y, region, |l, z| dot(z, y) - c.aux(l, x, y, z), bip.refine);
    let (xs, xs_edge) = xbar_conjugate_at(c, x, y, region)?;
    Ok(MinimaxReport {
        lhs,
        rhs,
        gap: (lhs - rhs).abs(),
        b: bip.eval_coords(x, y).get(),
        xbar_star: xs.get(),
        edge_limited: lhs_edge || on_box_edge(&z_star, region) || xs_edge,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FanSide {
    /// `g(x, λ, z) = φ_λ(x) − φ_λ(z)`.
    G,
    /// `h(y, λ, u) = φ_λ*(y) − φ_λ*(u)`.
    H,
}

#[derive(Debug, Clone, Serialize)]
pub struct FanWitness {
    pub side: FanSide,
    /// The fixed probe `x` (or `y`).
    pub at: Vec<f64>,
    pub lambda1: f64,
    pub lambda2: f64,
    pub alpha: f64,
    /// `min_λ max_z` of the defining inequality's excess.
    pub excess: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FanReport {
    pub pass: bool,
    /// Every member is finite on the probes and grid; Fan convexity is only
    /// defined for real-valued covers.
    pub real_valued: bool,
    /// Instances `(probe, λ₁, λ₂, α)` examined.
    pub instances: usize,
    /// Size of the finite set standing in for "for all z".
    pub counterpart_probes: usize,
    pub worst_excess: f64,
    pub witness: Option<FanWitness>,
}

#[derive(Debug, Clone)]
pub struct FanOptions {
    pub alphas: Vec<f64>,
    /// Parameters drawn for `λ₁, λ₂`: at most this many evenly spread nodes.
    pub pair_nodes: usize,
    pub tol: f64,
}

impl Default for FanOptions {
    fn default() -> Self {
        FanOptions {
            alphas: vec![0.25, 0.5, 0.75],
            pair_nodes: 11,
            tol: TOL_FAN,
        }
    }
}

fn spread(mesh: &[f64], k: usize) -> Vec<f64> {
    if mesh.len() <= k || k < 2 {
        return mesh.to_vec();
    }
    let mut out: Vec<f64> = (0..k).map(|i| mesh[i * (mesh.len() - 1) / (k - 1)]).collect();
    out.dedup();
    out
}

/// Fan convexity of `g(x, ·, ·)` and `h(y, ·, ·)`: for every probe, pair
/// `λ₁ < λ₂` and weight `α`, some `λ` must satisfy
/// `g(x, λ, z) ≤ α g(x, λ₁, z) + (1 − α) g(x, λ₂, z)` for all grid nodes
/// `z` at once (and likewise for `h` over dual nodes `u`).
pub fn fan_convexity_check(c: &Cover, xs: &[Vec<f64>], ys: &[Vec<f64>], grid: &Grid, opts: &FanOptions) -> FanReport {
    let mesh = c.lambda.mesh();
    let zs = grid.points();
    let mut report = FanReport {
        pass: true,
        real_valued: true,
        instances: 0,
        counterpart_probes: zs.len(),
        worst_excess: f64::NEG_INFINITY,
        witness: None,
    };
    let phi = |l: f64, p: &[f64]| c.phi(l, p);
    let phi_star = |l: f64, p: &[f64]| c.phi_star(l, p);
    let sides: [(FanSide, &[Vec<f64>], &(dyn Fn(f64, &[f64]) -> ExtReal + Sync)); 2] =
        [(FanSide::G, xs, &phi), (FanSide::H, ys, &phi_star)];
    for (side, probes, f) in sides {
        let real = mesh
            .iter()
            .all(|&l| probes.iter().chain(&zs).all(|p| f(l, p).is_finite()));
        if !real {
            report.real_valued = false;
            report.pass = false;
            continue;
        }
        let results: Vec<(usize, Option<FanWitness>, f64)> = probes
            .par_iter()
            .map(|p| fan_side(side, p, &mesh, c.lambda.refinable(), &zs, f, opts))
            .collect();
        for (n, w, worst) in results {
            report.instances += n;
            report.worst_excess = report.worst_excess.max(worst);
            if w.is_some() && report.witness.is_none() {
                report.pass = false;
                report.witness = w;
            }
        }
    }
    report
}

fn fan_side(
    side: FanSide,
    p: &[f64],
    mesh: &[f64],
    refine: bool,
    zs: &[Vec<f64>],
    f: &(dyn Fn(f64, &[f64]) -> ExtReal + Sync),
    opts: &FanOptions,
) -> (usize, Option<FanWitness>, f64) {
    let g = |l: f64, z: &[f64]| f(l, p).get() - f(l, z).get();
    let row = |l: f64| zs.iter().map(|z| g(l, z)).collect::<Vec<f64>>();
    let pick = spread(mesh, opts.pair_nodes);
    let rows: Vec<Vec<f64>> = pick.iter().map(|&l| row(l)).collect();
    let mut n = 0;
    let mut worst = f64::NEG_INFINITY;
    let mut witness = None;
    for i in 0..pick.len() {
        for j in i + 1..pick.len() {
            for &alpha in &opts.alphas {
                n += 1;
                let beta = 1.0 - alpha;
                let target: Vec<f64> = rows[i].iter().zip(&rows[j]).map(|(a, b)| alpha * a + beta * b).collect();
                let excess = |l: f64| {
                    zs.iter()
                        .zip(&target)
                        .map(|(z, t)| g(l, z) - t)
                        .fold(f64::NEG_INFINITY, f64::max)
                };
                let (_, v) = mesh_min(mesh, refine, excess);
                worst = worst.max(v);
                if v > opts.tol && witness.is_none() {
                    witness = Some(FanWitness {
                        side,
                        at: p.to_vec(),
                        lambda1: pick[i],
                        lambda2: pick[j],
                        alpha,
                        excess: v,
                    });
                }
            }
        }
    }
    (n, witness, worst)
}

#[derive(Debug, Clone, Serialize)]
pub struct ImplicitWitness {
    pub lambda1: f64,
    pub z1: Vec<f64>,
    pub lambda2: f64,
    pub z2: Vec<f64>,
    pub alpha: f64,
    /// `min_λ f(λ, αz₁ + βz₂) − (α f(λ₁, z₁) + β f(λ₂, z₂))`.
    pub excess: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ImplicitReport {
    pub pass: bool,
    pub trials: usize,
    /// Pairs `(λ, z)` with `f(λ, z)` finite, from which trials are drawn.
    pub finite_candidates: usize,
    pub witness: Option<ImplicitWitness>,
}

impl ImplicitReport {
    fn merge(mut self, other: ImplicitReport) -> ImplicitReport {
        self.trials += other.trials;
        self.finite_candidates += other.finite_candidates;
        if self.pass && !other.pass {
            self.pass = false;
            self.witness = other.witness;
        }
        self
    }
}

/// Implicit convexity of `f : Λ × Z → ℝ ∪ {+∞}`: for random finite pairs
/// `(λ₁, z₁), (λ₂, z₂)` and `α ∈ {¼, ½, ¾}` some `λ` must satisfy
/// `f(λ, αz₁ + βz₂) ≤ α f(λ₁, z₁) + β f(λ₂, z₂) + tol`. Reports the first
/// unsatisfiable instance in draw order.
pub fn implicit_convexity_check<F>(f: F, lambda: &LambdaSet, zs: &[Vec<f64>], trials: usize, seed: u64, tol: f64) -> ImplicitReport
where
    F: Fn(f64, &[f64]) -> ExtReal + Sync,
{
    let mesh = lambda.mesh();
    let refine = lambda.refinable();
    let candidates: Vec<(f64, &Vec<f64>, f64)> = mesh
        .iter()
        .flat_map(|&l| zs.iter().map(move |z| (l, z)))
        .filter_map(|(l, z)| f(l, z).finite_value().map(|v| (l, z, v)))
        .collect();
    let mut report = ImplicitReport {
        pass: true,
        trials: 0,
        finite_candidates: candidates.len(),
        witness: None,
    };
    if candidates.is_empty() {
        return report;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alphas = [0.25, 0.5, 0.75];
    let draws: Vec<(usize, usize, f64)> = (0..trials)
        .map(|_| {
            let i = rng.gen_range(0..candidates.len());
            let j = rng.gen_range(0..candidates.len());
            (i, j, alphas[rng.gen_range(0..alphas.len())])
        })
        .collect();
    let failures: Vec<Option<ImplicitWitness>> = draws
        .par_iter()
        .map(|&(i, j, alpha)| {
            let (l1, z1, v1) = candidates[i];
            let (l2, z2, v2) = candidates[j];
            let beta = 1.0 - alpha;
            let mid: Vec<f64> = z1.iter().zip(z2).map(|(a, b)| alpha * a + beta * b).collect();
            let bound = alpha * v1 + beta * v2;
            let (_, best) = mesh_min(&mesh, refine, |l| f(l, &mid).get());
            let excess = best - bound;
            (excess > tol).then(|| ImplicitWitness {
                lambda1: l1,
                z1: z1.clone(),
                lambda2: l2,
                z2: z2.clone(),
                alpha,
                excess,
            })
        })
        .collect();
    report.trials = trials;
    if let Some(w) = failures.into_iter().flatten().next() {
        report.pass = false;
        report.witness = Some(w);
    }
    report
}

/// Implicit convexity of the cover's slices `(λ, y) ↦ φ_λ(x) + φ_λ*(y)` for
/// each probe `x` and `(λ, x) ↦ φ_λ(x) + φ_λ*(y)` for each probe `y`, with
/// the free variable ranging over the grid nodes.
pub fn cover_implicit_convexity(
    c: &Cover,
    xs: &[Vec<f64>],
    ys: &[Vec<f64>],
    grid: &Grid,
    trials: usize,
    seed: u64,
    tol: f64,
) -> ImplicitReport {
    let zs = grid.points();
    let mut report = ImplicitReport {
        pass: true,
        trials: 0,
        finite_candidates: 0,
        witness: None,
    };
    let mut k = 0u64;
    for x in xs {
        let f = |l: f64, y: &[f64]| c.phi(l, x) + c.phi_star(l, y);
        report = report.merge(implicit_convexity_check(f, &c.lambda, &zs, trials, seed.wrapping_add(k), tol));
        k += 1;
    }
    for y in ys {
        let f = |l: f64, x: &[f64]| c.phi(l, x) + c.phi_star(l, y);
        report = report.merge(implicit_convexity_check(f, &c.lambda, &zs, trials, seed.wrapping_add(k), tol));
        k += 1;
    }
    report
}

#[derive(Debug, Clone, Serialize)]
pub struct UnionWitness {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub b_gap: f64,
    pub member_gap: f64,
    pub lambda: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct UnionReport {
    pub pass: bool,
    pub checked: usize,
    /// Probes on the graph of `b`.
    pub on_b: usize,
    /// Probes on some member graph `M(φ_λ)`.
    pub on_member: usize,
    pub witness: Option<UnionWitness>,
}

/// `M(b) = ⋃_λ M(φ_λ)` on the probes: a pair has `b`-gap `≤ tol` exactly
/// when some member's Fenchel–Young gap is `≤ tol`. Member gaps use the
/// members' own conjugates, independent of the cover's `φ_λ*`.
pub fn cover_graph_union_check(c: &Cover, probes: &[(Vec<f64>, Vec<f64>)], tol: f64) -> Result<UnionReport> {
    let bip = build_from_cover(c.clone())?;
    for (x, y) in probes {
        c.check_point(x)?;
        c.check_point(y)?;
    }
    let rows: Vec<(f64, f64, f64)> = probes
        .par_iter()
        .map(|(x, y)| {
            let b_gap = bip.gap_coords(x, y).get();
            let (l, member_gap) = mesh_min(&bip.mesh, bip.refine, |l| {
                fenchel_young_gap(&c.member(l), x, y).unwrap_or(f64::INFINITY)
            });
            (b_gap, member_gap, l)
        })
        .collect();
    let mut report = UnionReport {
        pass: true,
        checked: probes.len(),
        on_b: 0,
        on_member: 0,
        witness: None,
    };
    for ((x, y), (b_gap, member_gap, l)) in probes.iter().zip(rows) {
        let on_b = b_gap <= tol;
        let on_m = member_gap <= tol;
        report.on_b += on_b as usize;
        report.on_member += on_m as usize;
        if on_b != on_m && report.witness.is_none() {
            report.pass = false;
            report.witness = Some(UnionWitness {
                x: x.clone(),
                y: y.clone(),
                b_gap,
                member_gap,
                lambda: l,
            });
        }
    }
    Ok(report)
}

/// Cover specification as read from JSON, e.g.
/// `{"family": "quadratic-scaling", "lambda": [0.1, 10], "nodes": 101}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CoverSpec {
    QuadraticScaling {
        lambda: [f64; 2],
        nodes: usize,
        #[serde(default = "one")]
        dim: usize,
    },
    /// Either `lambda` with `nodes` (an interval) or a finite list of `shifts`.
    ShiftedQuadratics {
        #[serde(default)]
        lambda: Option<[f64; 2]>,
        #[serde(default)]
        nodes: Option<usize>,
        #[serde(default)]
        shifts: Option<Vec<f64>>,
        #[serde(default = "one")]
        dim: usize,
    },
    AdversarialIndicators {
        points: Vec<Vec<f64>>,
    },
    /// One named member: `quad` (`½‖x‖²`), `abs` (`‖x‖`) or `ball`
    /// (indicator of the unit ball).
    Single {
        phi: String,
        #[serde(default = "one")]
        dim: usize,
    },
    /// Grid-function JSON files; conjugates are computed on each member's
    /// own grid.
    Explicit {
        members: Vec<String>,
    },
}

fn one() -> usize {
    1
}

impl CoverSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn name(&self) -> &'static str {
        match self {
            CoverSpec::QuadraticScaling { .. } => "quadratic-scaling",
            CoverSpec::ShiftedQuadratics { .. } => "shifted-quadratics",
            CoverSpec::AdversarialIndicators { .. } => "adversarial-indicators",
            CoverSpec::Single { .. } => "single",
            CoverSpec::Explicit { .. } => "explicit",
        }
    }

    /// Build the cover; relative member paths resolve against `base`.
    pub fn build(&self, base: &Path) -> Result<Cover> {
        match self {
            CoverSpec::QuadraticScaling { lambda, nodes, dim } => {
                Cover::quadratic_scaling(*dim, LambdaSet::interval(lambda[0], lambda[1], *nodes)?)
            }
            CoverSpec::ShiftedQuadratics {
                lambda,
                nodes,
                shifts,
                dim,
            } => {
                let set = match (lambda, nodes, shifts) {
                    (Some(l), Some(n), None) => LambdaSet::interval(l[0], l[1], *n)?,
                    (None, None, Some(s)) => LambdaSet::finite(s.clone())?,
                    _ => {
                        return Err(Error::Parse(
                            "shifted-quadratics takes either lambda and nodes or shifts".into(),
                        ))
                    }
                };
                Cover::shifted_quadratics(*dim, set)
            }
            CoverSpec::AdversarialIndicators { points } => Cover::point_indicators(points.clone()),
            CoverSpec::Single { phi, dim } => {
                check_cover_dim(*dim)?;
                let f = match phi.as_str() {
                    "quad" => ConvexFn::half_square(*dim),
                    "abs" => ConvexFn::NormScaled { scale: 1.0 },
                    "ball" => ConvexFn::IndicatorBall { radius: 1.0 },
                    other => return Err(Error::Parse(format!("unknown member {other:?}"))),
                };
                let star = f.conjugate_closed_form().expect("named members have closed-form conjugates");
                let mut c = Cover::single(f, star)?;
                c.dim = *dim;
                Ok(c)
            }
            CoverSpec::Explicit { members } => {
                let ms = members
                    .iter()
                    .map(|p| {
                        let text = std::fs::read_to_string(base.join(p)).map_err(|e| Error::Io(format!("{p}: {e}")))?;
                        let g = GridFn::from_json(&text)?;
                        let grid = g.grid().clone();
                        Member::derived(ConvexFn::Grid(g), &grid, &grid)
                    })
                    .collect::<Result<Vec<_>>>()?;
                Cover::explicit(ms)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bipotential::{check_axioms, ProbeGrid};
    use crate::point::Point;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::Rng;

    fn scaling(dim: usize, nodes: usize) -> Cover {
        Cover::quadratic_scaling(dim, LambdaSet::interval(0.1, 10.0, nodes).unwrap()).unwrap()
    }

    fn box1(r: f64) -> Grid {
        Grid::uniform(-r, r, 41).unwrap()
    }

    fn adversarial() -> Cover {
        Cover::point_indicators(vec![vec![-1.0], vec![1.0]]).unwrap()
    }

    #[test]
    fn quadratic_scaling_examples() {
        let b = build_from_cover(scaling(1, 101)).unwrap();
        assert_abs_diff_eq!(b.eval_coords(&[1.0], &[1.0]).get(), 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(b.eval_coords(&[2.0], &[1.0]).get(), 2.0, epsilon = 1e-9);
        assert_abs_diff_eq!(b.eval_coords(&[1.0], &[20.0]).get(), 25.0, epsilon = 1e-12);
        let (l, _) = b.argmin(&[1.0], &[20.0]);
        assert_eq!(l, 10.0);
    }

    #[test]
    fn quadratic_scaling_reproduces_cauchy_in_range() {
        let b = build_from_cover(scaling(2, 101)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let x: Vec<f64> = (0..2).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let nx = dot(&x, &x).sqrt();
            let ratio = rng.gen_range(0.1..10.0);
            let dir: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let y = [ratio * nx * dir.cos(), ratio * nx * dir.sin()];
            let want = nx * dot(&y, &y).sqrt();
            assert_abs_diff_eq!(b.eval_coords(&x, &y).get(), want, epsilon = 1e-6 * (1.0 + want));
        }
    }

    #[test]
    fn mesh_refinement_is_converged() {
        let coarse = build_from_cover(scaling(1, 101)).unwrap();
        let fine = build_from_cover(scaling(1, 201)).unwrap();
        for (x, y) in [(1.0, 1.0), (0.3, 2.0), (2.0, 0.5), (1.0, 20.0), (-1.5, 0.7), (0.0, 1.0)] {
            let d = (coarse.eval_coords(&[x], &[y]).get() - fine.eval_coords(&[x], &[y]).get()).abs();
            assert!(d <= 1e-6, "({x}, {y}): {d}");
        }
    }

    #[test]
    fn empty_parameter_set_is_rejected() {
        let c = Cover::shifted_quadratics(1, LambdaSet::finite(vec![]).unwrap()).unwrap();
        assert!(matches!(build_from_cover(c), Err(Error::DomainEmpty(_))));
    }

    #[test]
    fn xbar_conjugate_is_the_norm_at_a_unit_point() {
        let c = scaling(1, 101);
        let dual = Grid::uniform(-5.0, 5.0, 21).unwrap();
        let r = xbar_conjugate(&c, &[1.0], &dual, &box1(2.0)).unwrap();
        assert!(!r.unbounded_warning);
        for y in dual.points() {
            // ‖y‖ where ‖y‖/‖x‖ ∈ Λ; below that the smallest member is active
            let a = y[0].abs();
            let want = if a >= 0.1 { a } else { a * a / 0.2 + 0.05 };
            assert_abs_diff_eq!(r.function.eval(&y).get(), want, epsilon = 1e-6);
        }
    }

    #[test]
    fn xbar_conjugate_at_the_origin_uses_the_largest_member() {
        let c = scaling(1, 101);
        for y in [-3.0, -0.5, 0.0, 1.0, 4.0] {
            let (v, edge) = xbar_conjugate_at(&c, &[0.0], &[y], &box1(2.0)).unwrap();
            assert!(!edge);
            assert_abs_diff_eq!(v.get(), y * y / 20.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn single_member_xbar_is_the_member() {
        let c = Cover::single(ConvexFn::half_square(1), ConvexFn::half_square(1)).unwrap();
        for y in [-2.0, 0.0, 1.5] {
            let (v, _) = xbar_conjugate_at(&c, &[0.0], &[y], &box1(4.0)).unwrap();
            assert_abs_diff_eq!(v.get(), y * y / 2.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn proof_identity_on_probes() {
        let c = scaling(1, 101);
        let b = build_from_cover(c.clone()).unwrap();
        let region = box1(3.0);
        for x in [-2.0, -0.5, 0.0, 0.7, 1.0, 2.5] {
            for y in [-4.0, -1.0, 0.0, 0.3, 1.0, 2.0] {
                let (v, edge) = xbar_conjugate_at(&c, &[x], &[y], &region).unwrap();
                assert!(!edge, "({x}, {y})");
                let d = (b.eval_coords(&[x], &[y]).get() - v.get()).abs();
                assert!(d <= 1e-6, "({x}, {y}): {d}");
            }
        }
    }

    #[test]
    fn minimax_examples() {
        let c = scaling(2, 101);
        let region = Grid::cube(2, -2.0, 2.0, 21).unwrap();
        let r = minimax_check(&c, &[1.0, 0.0], &[1.0, 0.0], &region).unwrap();
        assert!(r.gap <= 1e-6, "{r:?}");
        assert_abs_diff_eq!(r.lhs, 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(r.rhs, r.xbar_star, epsilon = 1e-6);
        assert_abs_diff_eq!(r.lhs, r.b, epsilon = 1e-6);

        let c1 = scaling(1, 101);
        let r = minimax_check(&c1, &[1.0], &[20.0], &box1(3.0)).unwrap();
        assert!(!r.edge_limited);
        assert_abs_diff_eq!(r.lhs, 25.0, epsilon = 1e-6);
        assert_abs_diff_eq!(r.rhs, 25.0, epsilon = 1e-6);
    }

    #[test]
    fn minimax_gap_vanishes_for_one_member() {
        let c = Cover::single(ConvexFn::half_square(1), ConvexFn::half_square(1)).unwrap();
        for (x, y) in [(0.0, 1.0), (1.0, -2.0), (0.5, 0.5)] {
            let r = minimax_check(&c, &[x], &[y], &box1(4.0)).unwrap();
            assert_eq!(r.gap, 0.0);
        }
    }

    #[test]
    fn fan_convexity_verdicts() {
        let grid = box1(3.0);
        let xs = vec![vec![-1.0], vec![0.0], vec![2.0]];
        let r = fan_convexity_check(&scaling(1, 101), &xs, &xs, &grid, &FanOptions::default());
        assert!(r.pass && r.real_valued, "{r:?}");
        assert_eq!(r.counterpart_probes, 41);

        let single = Cover::single(ConvexFn::half_square(1), ConvexFn::half_square(1)).unwrap();
        assert!(fan_convexity_check(&single, &xs, &xs, &grid, &FanOptions::default()).pass);

        let r = fan_convexity_check(&adversarial(), &xs, &xs, &grid, &FanOptions::default());
        assert!(!r.pass && !r.real_valued);

        let two_shifts = Cover::shifted_quadratics(1, LambdaSet::finite(vec![-1.0, 1.0]).unwrap()).unwrap();
        let r = fan_convexity_check(&two_shifts, &xs, &xs, &grid, &FanOptions::default());
        assert!(!r.pass && r.real_valued);
        let w = r.witness.unwrap();
        assert_eq!((w.lambda1, w.lambda2), (-1.0, 1.0));
        assert!(w.excess > 0.1);

        let interval = Cover::shifted_quadratics(1, LambdaSet::interval(-1.0, 1.0, 101).unwrap()).unwrap();
        assert!(fan_convexity_check(&interval, &xs, &xs, &grid, &FanOptions::default()).pass);
    }

    #[test]
    fn implicit_convexity_verdicts() {
        let grid = box1(3.0);
        let xs = vec![vec![-1.0], vec![0.5], vec![2.0]];
        let single = Cover::single(ConvexFn::half_square(1), ConvexFn::half_square(1)).unwrap();
        assert!(cover_implicit_convexity(&single, &xs, &xs, &grid, 100, 1, TOL_FAN).pass);
        assert!(cover_implicit_convexity(&scaling(1, 101), &xs, &xs, &grid, 100, 1, TOL_FAN).pass);
        let nodes_at_points = Grid::uniform(-2.0, 2.0, 41).unwrap();
        let r = cover_implicit_convexity(&adversarial(), &[vec![1.0]], &[vec![1.0]], &nodes_at_points, 100, 1, TOL_FAN);
        assert!(!r.pass);
        let w = r.witness.unwrap();
        assert_ne!(w.lambda1, w.lambda2);
        assert!(w.excess.is_infinite());
    }

    #[test]
    fn graph_union_examples() {
        let c = scaling(2, 101);
        let probes = vec![
            (vec![1.0, 0.0], vec![1.0, 0.0]),
            (vec![1.0, 0.0], vec![0.0, 1.0]),
            (vec![2.0, 0.0], vec![1.0, 0.0]),
            (vec![0.0, 0.0], vec![0.0, 0.0]),
        ];
        let r = cover_graph_union_check(&c, &probes, 1e-8).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.on_b, 3);
        let b = build_from_cover(c).unwrap();
        assert_abs_diff_eq!(b.gap_coords(&[1.0, 0.0], &[0.0, 1.0]).get(), 1.0, epsilon = 1e-9);

        let single = Cover::single(ConvexFn::abs(), ConvexFn::IndicatorBall { radius: 1.0 }).unwrap();
        let probes = vec![(vec![1.0], vec![1.0]), (vec![0.0], vec![0.3]), (vec![1.0], vec![0.5])];
        let r = cover_graph_union_check(&single, &probes, 1e-9).unwrap();
        assert!(r.pass && r.on_b == 2);
    }

    #[test]
    fn fan_convex_cover_passes_the_axioms() {
        let b = build_from_cover(scaling(1, 101)).unwrap();
        let probes = ProbeGrid::symmetric(Grid::uniform(-2.0, 2.0, 41).unwrap());
        let slices: Vec<Point> = [-1.0, 0.5, 1.0].iter().map(|&v| Point::scalar(v)).collect();
        let r = check_axioms(&b, &slices, &slices, &probes, 1e-8).unwrap();
        assert!(r.pass, "{:?}", r.first_witness());
    }

    #[test]
    fn explicit_grid_members() {
        let g = Grid::uniform(-2.0, 2.0, 81).unwrap();
        let members = [1.0, 2.0]
            .iter()
            .map(|&s| {
                let phi = ConvexFn::Grid(GridFn::from_fn(g.clone(), move |x| ExtReal::new(0.5 * s * x[0] * x[0])));
                Member::derived(phi, &g, &g).unwrap()
            })
            .collect();
        let b = build_from_cover(Cover::explicit(members).unwrap()).unwrap();
        // min(x²/2 + y²/2, x² + y²/4) at (1, 1)
        assert_abs_diff_eq!(b.eval_coords(&[1.0], &[1.0]).get(), 1.0, epsilon = 1e-2);
        assert!(b.eval_coords(&[1.0], &[1.9]).get() < 2.0);
    }

    #[test]
    fn cover_spec_json() {
        let s = CoverSpec::from_json(r#"{"family":"quadratic-scaling","lambda":[0.1,10],"nodes":101}"#).unwrap();
        let c = s.build(Path::new(".")).unwrap();
        assert_eq!(c.lambda().mesh().len(), 101);
        assert_eq!(c.dim(), 1);
        let s = CoverSpec::from_json(r#"{"family":"shifted-quadratics","shifts":[1,-1]}"#).unwrap();
        assert_eq!(s.build(Path::new(".")).unwrap().lambda().mesh(), vec![-1.0, 1.0]);
        assert!(CoverSpec::from_json(r#"{"family":"shifted-quadratics","shifts":[1],"nodes":3}"#)
            .unwrap()
            .build(Path::new("."))
            .is_err());
        assert!(CoverSpec::from_json(r#"{"family":"quadratic-scaling","lambda":[0.1,10],"nodes":101,"x":1}"#).is_err());
        let s = CoverSpec::from_json(r#"{"family":"single","phi":"quad","dim":2}"#).unwrap();
        assert_eq!(s.build(Path::new(".")).unwrap().dim(), 2);
        assert!(CoverSpec::from_json(r#"{"family":"explicit","members":["missing.json"]}"#)
            .unwrap()
            .build(Path::new("/nonexistent"))
            .is_err());
    }

    #[test]
    fn indexed_covers_restrict_to_subsets() {
        let c = adversarial();
        assert!(c.with_lambda(LambdaSet::finite(vec![1.0]).unwrap()).is_ok());
        assert!(c.with_lambda(LambdaSet::finite(vec![2.0]).unwrap()).is_err());
        assert!(c.with_lambda(LambdaSet::interval(0.0, 1.0, 3).unwrap()).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn enlarging_the_parameter_set_never_increases_b(
            x in -3.0..3.0f64, y in -3.0..3.0f64, keep in proptest::collection::vec(any::<bool>(), 21),
        ) {
            let full = scaling(1, 21);
            let mesh = full.lambda().mesh();
            let sub: Vec<f64> = mesh.iter().zip(&keep).filter(|(_, &k)| k).map(|(&l, _)| l).collect();
            prop_assume!(!sub.is_empty());
            let small = build_from_cover(full.with_lambda(LambdaSet::finite(sub).unwrap()).unwrap()).unwrap();
            let big = build_from_cover(full.with_lambda(LambdaSet::finite(mesh).unwrap()).unwrap()).unwrap();
            prop_assert!(big.eval_coords(&[x], &[y]).get() <= small.eval_coords(&[x], &[y]).get());
        }

        #[test]
        fn cover_b_dominates_the_pairing(x in -3.0..3.0f64, y in -3.0..3.0f64) {
            let b = build_from_cover(scaling(1, 101)).unwrap();
            prop_assert!(b.gap_coords(&[x], &[y]).get() >= -1e-12);
        }
    }
}
