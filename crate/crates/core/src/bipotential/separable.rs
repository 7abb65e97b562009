use super::{Bipotential, Kind};
use crate::convex::ConvexFn;
use crate::ereal::ExtReal;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::point::{dot, norm, Space};

/// Midpoint tolerance used when a potential is checked for convexity.
const TOL_CONVEX: f64 = 1e-9;

/// Where the conjugate of a separable potential comes from.
#[derive(Debug, Clone)]
pub enum Conjugation<'a> {
    Given(ConvexFn),
    /// Closed form when known, otherwise sampled on `primal` and conjugated
    /// onto `dual`, with edge-flagged nodes set to `+∞`.
    Derive { primal: &'a Grid, dual: &'a Grid },
}

/// `b(x, y) = φ(x) + φ*(y)`.
#[derive(Debug, Clone)]
pub struct Separable {
    space: Space,
    phi: ConvexFn,
    phi_star: ConvexFn,
}

pub fn separable(space: Space, phi: ConvexFn, conj: Conjugation<'_>) -> Result<Separable> {
    if let ConvexFn::Grid(g) = &phi {
        g.check_convex(TOL_CONVEX)
            .map_err(|v| Error::Convexity(format!("excess {:e} at node {:?}", v.excess, v.node)))?;
    }
    let phi_star = match conj {
        Conjugation::Given(f) => f,
        Conjugation::Derive { primal, dual } => {
            phi.check_convex_on(primal, TOL_CONVEX)?;
            match phi.conjugate_closed_form() {
                Some(f) => f,
                None => {
                    let sampled = match &phi {
                        ConvexFn::Grid(g) => g.clone(),
                        other => other.sample(primal),
                    };
                    ConvexFn::Grid(sampled.conjugate(dual)?.flagged_as_infinite())
                }
            }
        }
    };
    Ok(Separable { space, phi, phi_star })
}

impl Separable {
    pub fn phi(&self) -> &ConvexFn {
        &self.phi
    }

    pub fn phi_star(&self) -> &ConvexFn {
        &self.phi_star
    }
}

impl Bipotential for Separable {
    fn primal_space(&self) -> Space {
        self.space
    }
    fn dual_space(&self) -> Space {
        self.space
    }
    fn kind(&self) -> Kind {
        Kind::Separable
    }
    fn eval_coords(&self, x: &[f64], y: &[f64]) -> ExtReal {
        self.phi.eval(x) + self.phi_star.eval(y)
    }
    fn resolve_dual_closed(&self, x: &[f64], warm: &[f64]) -> Option<Vec<f64>> {
        subgradient_select(&self.phi, x, warm)
    }
    fn resolve_primal_closed(&self, y: &[f64], warm: &[f64]) -> Option<Vec<f64>> {
        subgradient_select(&self.phi_star, y, warm)
    }
}

const TOL_KINK: f64 = 1e-12;

/// The element of `∂f(x)` nearest `warm`, for closed forms whose
/// subdifferential is explicit. `None` when `∂f(x)` is empty or the
/// representation has no closed-form subdifferential.
pub fn subgradient_select(f: &ConvexFn, x: &[f64], warm: &[f64]) -> Option<Vec<f64>> {
    match f {
        ConvexFn::Quadratic { q, lin, .. } => Some(q.iter().zip(lin).map(|(row, l)| dot(row, x) + l).collect()),
        ConvexFn::Affine { lin, .. } => Some(lin.clone()),
        ConvexFn::NormScaled { scale } => {
            let n = norm(x);
            if n > TOL_KINK {
                Some(x.iter().map(|v| scale * v / n).collect())
            } else {
                Some(project_ball(warm, *scale))
            }
        }
        ConvexFn::IndicatorBall { radius } => {
            let n = norm(x);
            let slack = TOL_KINK * (1.0 + radius);
            if n > radius + slack {
                None
            } else if *radius <= slack {
                Some(warm.to_vec())
            } else if n < radius - slack {
                Some(vec![0.0; x.len()])
            } else {
                let t = dot(warm, x).max(0.0) / (n * n);
                Some(x.iter().map(|v| t * v).collect())
            }
        }
        ConvexFn::IndicatorPoint { at, .. } => {
            if at.iter().zip(x).all(|(a, b)| (a - b).abs() <= TOL_KINK) {
                Some(warm.to_vec())
            } else {
                None
            }
        }
        ConvexFn::IndicatorBox { lo, hi } => {
            let mut out = Vec::with_capacity(x.len());
            for i in 0..x.len() {
                let at_lo = (x[i] - lo[i]).abs() <= TOL_KINK;
                let at_hi = (x[i] - hi[i]).abs() <= TOL_KINK;
                if x[i] < lo[i] - TOL_KINK || x[i] > hi[i] + TOL_KINK {
                    return None;
                }
                out.push(match (at_lo, at_hi) {
                    (true, true) => warm[i],
                    (true, false) => warm[i].min(0.0),
                    (false, true) => warm[i].max(0.0),
                    (false, false) => 0.0,
                });
            }
            Some(out)
        }
        ConvexFn::SupportBox { lo, hi } => {
            let mut out = Vec::with_capacity(x.len());
            for i in 0..x.len() {
                let v = if x[i] > TOL_KINK {
                    hi[i]
                } else if x[i] < -TOL_KINK {
                    lo[i]
                } else {
                    warm[i].clamp(lo[i], hi[i])
                };
                if v.is_infinite() {
                    return None;
                }
                out.push(v);
            }
            Some(out)
        }
        // ∂(t f(·/t))(x) = ∂f(x/t)
        ConvexFn::Perspective { t, f } => {
            let inner: Vec<f64> = x.iter().map(|v| v / t).collect();
            subgradient_select(f, &inner, warm)
        }
        ConvexFn::Sum(terms) if terms.len() == 1 => {
            let (w, f) = &terms[0];
            let inner_warm: Vec<f64> = warm.iter().map(|v| v / w).collect();
            subgradient_select(f, x, &inner_warm).map(|g| g.into_iter().map(|v| w * v).collect())
        }
        _ => None,
    }
}

fn project_ball(p: &[f64], r: f64) -> Vec<f64> {
    let n = norm(p);
    if n <= r {
        p.to_vec()
    } else {
        p.iter().map(|v| r * v / n).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridFn;
    use crate::point::Point;

    fn line() -> Space {
        Space::Euclidean(1)
    }

    #[test]
    fn quadratic_separable() {
        let b = separable(line(), ConvexFn::half_square(1), Conjugation::Given(ConvexFn::half_square(1))).unwrap();
        assert_eq!(b.eval(&Point::scalar(1.0), &Point::scalar(1.0)).unwrap(), 1.0);
        assert_eq!(b.gap(&Point::scalar(1.0), &Point::scalar(1.0)).unwrap(), 0.0);
    }

    #[test]
    fn abs_separable_with_derived_conjugate() {
        let primal = Grid::uniform(-5.0, 5.0, 1001).unwrap();
        let dual = Grid::uniform(-3.0, 3.0, 601).unwrap();
        let phi = ConvexFn::Grid(ConvexFn::abs().sample(&primal));
        let b = separable(line(), phi, Conjugation::Derive { primal: &primal, dual: &dual }).unwrap();
        let v = b.eval(&Point::scalar(2.0), &Point::scalar(0.5)).unwrap();
        assert!((v.get() - 2.0).abs() < 1e-12);
        assert!(b.eval_coords(&[0.0], &[1.5]).is_infinite());
    }

    #[test]
    fn zero_indicator_separable_is_vertical() {
        let b = separable(line(), ConvexFn::zero_indicator(1), Conjugation::Given(ConvexFn::Affine { lin: vec![0.0], constant: 0.0 })).unwrap();
        for y in [-3.0, 0.0, 2.5] {
            assert_eq!(b.gap_coords(&[0.0], &[y]), 0.0);
        }
        assert!(b.eval_coords(&[0.1], &[0.0]).is_infinite());
    }

    #[test]
    fn nonconvex_grid_potential_is_rejected() {
        let g = Grid::uniform(-2.0, 2.0, 41).unwrap();
        let phi = ConvexFn::Grid(GridFn::from_fn(g.clone(), |x| ExtReal::finite(-(x[0] * x[0]))));
        let r = separable(line(), phi, Conjugation::Derive { primal: &g, dual: &g });
        assert!(matches!(r, Err(Error::Convexity(_))));
    }

    #[test]
    fn subgradient_selection_rules() {
        assert_eq!(subgradient_select(&ConvexFn::abs(), &[0.0], &[3.0]), Some(vec![1.0]));
        assert_eq!(subgradient_select(&ConvexFn::abs(), &[-2.0], &[3.0]), Some(vec![-1.0]));
        let ball = ConvexFn::IndicatorBall { radius: 2.0 };
        assert_eq!(subgradient_select(&ball, &[0.5], &[3.0]), Some(vec![0.0]));
        assert_eq!(subgradient_select(&ball, &[2.0], &[3.0]), Some(vec![3.0]));
        assert_eq!(subgradient_select(&ball, &[2.0], &[-3.0]), Some(vec![0.0]));
        assert_eq!(subgradient_select(&ball, &[2.5], &[0.0]), None);
        let ray = ConvexFn::nonpositive_ray();
        assert_eq!(subgradient_select(&ray, &[0.0], &[-1.0]), Some(vec![0.0]));
        assert_eq!(subgradient_select(&ray, &[0.0], &[4.0]), Some(vec![4.0]));
    }
}
