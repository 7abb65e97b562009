//! Unilateral contact with Coulomb dry friction.
//!
//! Coordinates are `(n, t₁, t₂)`: `x` holds the gap velocity and the sliding
//! velocity, `y` the normal reaction and the tangential reaction.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bipotential::{Bipotential, GraphSample, Kind};
use crate::cone::{project_soc, Cone, TOL_CONE};
use crate::ereal::ExtReal;
use crate::error::{Error, Result};
use crate::point::{norm, Point, Space};

use super::operator::Sampling;

/// `b(x, y) = μ y_n ‖x_t‖ + χ_{K_μ}(y) + χ_{x_n ≤ 0}(x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coulomb {
    mu: f64,
}

pub fn coulomb_bipotential(mu: f64) -> Result<Coulomb> {
    Cone::second_order(mu)?;
    Ok(Coulomb { mu })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ContactBranch {
    Separation,
    Sticking,
    Sliding,
}

impl ContactBranch {
    pub fn label(self) -> &'static str {
        match self {
            ContactBranch::Separation => "separation",
            ContactBranch::Sticking => "sticking",
            ContactBranch::Sliding => "sliding",
        }
    }
}

/// Which branch of the contact law a velocity `x` belongs to; `None` when
/// the bodies approach (`x_n > 0`), where the law has no reaction.
pub fn contact_branch(x: &[f64]) -> Option<ContactBranch> {
    let tol = 1e-12 * (1.0 + norm(x));
    let xt = norm(&x[1..3]);
    if x[0] < -tol {
        Some(ContactBranch::Separation)
    } else if x[0] > tol {
        None
    } else if xt <= tol {
        Some(ContactBranch::Sticking)
    } else {
        Some(ContactBranch::Sliding)
    }
}

impl Coulomb {
    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn cone(&self) -> Cone {
        Cone::SecondOrder { mu: self.mu }
    }
}

impl Bipotential for Coulomb {
    fn primal_space(&self) -> Space {
        Space::ContactSplit
    }
    fn dual_space(&self) -> Space {
        Space::ContactSplit
    }
    fn kind(&self) -> Kind {
        Kind::Coulomb
    }
    fn eval_coords(&self, x: &[f64], y: &[f64]) -> ExtReal {
        if x[0] > TOL_CONE || !self.cone().contains_coords(y) {
            return ExtReal::INFINITY;
        }
        ExtReal::finite(self.mu * y[0] * norm(&x[1..3]))
    }
    fn resolve_dual_closed(&self, x: &[f64], warm: &[f64]) -> Option<Vec<f64>> {
        match contact_branch(x)? {
            ContactBranch::Separation => Some(vec![0.0; 3]),
            ContactBranch::Sticking => {
                let (n, t) = project_soc(warm[0], &warm[1..3], self.mu);
                Some(vec![n, t[0], t[1]])
            }
            ContactBranch::Sliding => {
                let s = norm(&x[1..3]);
                let dir = [1.0, self.mu * x[1] / s, self.mu * x[2] / s];
                let a = ((warm[0] * dir[0] + warm[1] * dir[1] + warm[2] * dir[2]) / (1.0 + self.mu * self.mu)).max(0.0);
                Some(dir.iter().map(|d| a * d).collect())
            }
        }
    }
    fn resolve_primal_closed(&self, y: &[f64], warm: &[f64]) -> Option<Vec<f64>> {
        if !self.cone().contains_coords(y) {
            return None;
        }
        let yt = norm(&y[1..3]);
        let tol = 1e-12 * (1.0 + norm(y));
        if y[0] <= tol && yt <= tol {
            return Some(vec![warm[0].min(0.0), warm[1], warm[2]]);
        }
        if yt < self.mu * y[0] - tol {
            return Some(vec![0.0; 3]);
        }
        let (ux, uy) = (y[1] / yt, y[2] / yt);
        let t = (warm[1] * ux + warm[2] * uy).max(0.0);
        Some(vec![0.0, t * ux, t * uy])
    }
}

/// Differential-inclusion form of the law:
/// `(x_n − μ‖x_t‖, x_t) ∈ ∂χ_{K_μ}(y)`, tested by `y ∈ K_μ` and
/// `proj_{K_μ}(y + p) = y`.
pub fn coulomb_inclusion_check(mu: f64, x: &[f64], y: &[f64], tol: f64) -> bool {
    if norm(&y[1..3]) > mu * y[0] + tol {
        return false;
    }
    let p = [x[0] - mu * norm(&x[1..3]), x[1], x[2]];
    let z = [y[0] + p[0], y[1] + p[1], y[2] + p[2]];
    let (n, t) = project_soc(z[0], &z[1..3], mu);
    let err = ((n - y[0]).powi(2) + (t[0] - y[1]).powi(2) + (t[1] - y[2]).powi(2)).sqrt();
    err <= tol * (1.0 + norm(y) + norm(&p))
}

/// `(x, 0)` with `x_n < 0`.
pub fn separation_pair(xn: f64, xt: [f64; 2]) -> Result<(Point, Point)> {
    if !(xn < 0.0) {
        return Err(Error::InvalidParameter(format!("separation needs x_n < 0, got {xn}")));
    }
    Ok((Point::contact(xn, xt), Point::zeros(Space::ContactSplit)))
}

/// `(0, y)` with `y ∈ K_μ`.
pub fn sticking_pair(mu: f64, y: [f64; 3]) -> Result<(Point, Point)> {
    if norm(&y[1..3]) > mu * y[0] + TOL_CONE {
        return Err(Error::InvalidParameter(format!("reaction {y:?} outside the friction cone")));
    }
    Ok((Point::zeros(Space::ContactSplit), Point::contact(y[0], [y[1], y[2]])))
}

/// `((0, x_t), (y_n, μ y_n x_t/‖x_t‖))` with `y_n ≥ 0`, `x_t ≠ 0`.
pub fn sliding_pair(mu: f64, xt: [f64; 2], yn: f64) -> Result<(Point, Point)> {
    let s = norm(&xt);
    if s == 0.0 || !(yn >= 0.0) {
        return Err(Error::InvalidParameter("sliding needs x_t != 0 and y_n >= 0".into()));
    }
    let yt = [mu * yn * xt[0] / s, mu * yn * xt[1] / s];
    Ok((Point::contact(0.0, xt), Point::contact(yn, yt)))
}

/// Seeded sample of the three branches, `per_branch` pairs each, labelled
/// `separation`, `sticking` and `sliding`.
pub fn coulomb_graph(mu: f64, sampling: &Sampling) -> Result<GraphSample> {
    Cone::second_order(mu)?;
    if sampling.per_branch == 0 {
        return Err(Error::Sampling("per_branch must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(sampling.seed);
    let mut g = GraphSample::new(Space::ContactSplit, Space::ContactSplit, format!("coulomb mu={mu}"));
    let unit = |rng: &mut ChaCha8Rng| {
        let a: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        [a.cos(), a.sin()]
    };
    for i in 0..sampling.per_branch {
        let xt = unit(&mut rng);
        let s = rng.gen_range(0.0..2.0);
        let (x, y) = separation_pair(-rng.gen_range(0.1..3.0), [s * xt[0], s * xt[1]])?;
        g.push_labeled(x, y, Some("separation"))?;

        // alternate between the boundary and the interior of K_μ
        let yn = rng.gen_range(0.1..3.0);
        let frac = if i % 2 == 0 { 1.0 } else { rng.gen_range(0.0..1.0) };
        let d = unit(&mut rng);
        let (x, y) = sticking_pair(mu, [yn, frac * mu * yn * d[0], frac * mu * yn * d[1]])?;
        g.push_labeled(x, y, Some("sticking"))?;

        let d = unit(&mut rng);
        let s = rng.gen_range(0.1..3.0);
        let (x, y) = sliding_pair(mu, [s * d[0], s * d[1]], rng.gen_range(0.0..3.0))?;
        g.push_labeled(x, y, Some("sliding"))?;
    }
    Ok(g)
}
