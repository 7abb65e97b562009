//! Maxima of two separable bipotentials: the conjugate-mixing conditions
//! that make `max(b₁, b₂)` a strong bipotential, and the inf-convolution
//! subdifferential identity that follows from them.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{separable, Bipotential, Conjugation, MaxCombination};
use crate::convex::{conjugate_at, inf_convolution, subdifferential_test, ConvexFn};
use crate::ereal::ExtReal;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::point::Space;
use crate::search::ZoomOptions;

/// Fraction of each grid (around its centre) on which conditions are
/// checked, away from box truncation effects.
const CENTRAL: f64 = 2.0 / 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConditionStatus {
    Pass,
    Fail,
    /// The domain intersection is empty on the grid.
    Vacuous,
    /// `λ ∈ {0, 1}`: both sides coincide by definition.
    Trivial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionCheck {
    pub status: ConditionStatus,
    /// Largest `|lhs − rhs|` over the checked nodes.
    pub worst: f64,
    /// First failing node with both sides.
    pub witness: Option<(Vec<f64>, ExtReal, ExtReal)>,
    pub checked: usize,
    /// Nodes whose supremum sat on the search box boundary.
    pub skipped: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaCondition {
    pub lambda: f64,
    /// `(λφ₁ + (1−λ)φ₂)* = λφ₁* + (1−λ)φ₂*` on `dom φ₁* ∩ dom φ₂*`.
    pub ii_prime: ConditionCheck,
    /// `(λφ₁* + (1−λ)φ₂*)* = λφ₁ + (1−λ)φ₂` on `dom φ₁ ∩ dom φ₂`.
    pub ii_second: ConditionCheck,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub per_lambda: Vec<LambdaCondition>,
    pub tol: f64,
    pub pass: bool,
}

/// `b = max(φ₁ ⊕ φ₁*, φ₂ ⊕ φ₂*)` with the report on conditions (ii′) and
/// (ii″) for each sampled `λ`.
pub fn max_of_separable(
    space: Space,
    phi1: ConvexFn,
    phi2: ConvexFn,
    primal: &Grid,
    dual: &Grid,
    lambdas: &[f64],
    tol: f64,
) -> Result<(MaxCombination, ConditionReport)> {
    let b1 = separable(space, phi1, Conjugation::Derive { primal, dual })?;
    let b2 = separable(space, phi2, Conjugation::Derive { primal, dual })?;
    let mut per_lambda = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::InvalidParameter(format!("lambda = {lambda} outside [0, 1]")));
        }
        per_lambda.push(LambdaCondition {
            lambda,
            ii_prime: mixing_condition(b1.phi(), b2.phi(), b1.phi_star(), b2.phi_star(), lambda, primal, dual, tol)?,
            ii_second: mixing_condition(b1.phi_star(), b2.phi_star(), b1.phi(), b2.phi(), lambda, dual, primal, tol)?,
        });
    }
    let pass = per_lambda
        .iter()
        .all(|c| c.ii_prime.status != ConditionStatus::Fail && c.ii_second.status != ConditionStatus::Fail);
    let parts: Vec<Arc<dyn Bipotential>> = vec![Arc::new(b1), Arc::new(b2)];
    Ok((
        MaxCombination::new(parts)?,
        ConditionReport {
            per_lambda,
            tol,
            pass,
        },
    ))
}

/// Checks `(λf₁ + (1−λ)f₂)*(v) = λg₁(v) + (1−λ)g₂(v)` at the central nodes
/// `v` of `at` where `g₁, g₂` are finite; `f₁, f₂` live on `search`.
#[allow(clippy::too_many_arguments)]
fn mixing_condition(
    f1: &ConvexFn,
    f2: &ConvexFn,
    g1: &ConvexFn,
    g2: &ConvexFn,
    lambda: f64,
    search: &Grid,
    at: &Grid,
    tol: f64,
) -> Result<ConditionCheck> {
    let mut check = ConditionCheck {
        status: ConditionStatus::Pass,
        worst: 0.0,
        witness: None,
        checked: 0,
        skipped: 0,
    };
    if lambda == 0.0 || lambda == 1.0 {
        check.status = ConditionStatus::Trivial;
        return Ok(check);
    }
    let mix = ConvexFn::sum(vec![(lambda, f1.clone()), (1.0 - lambda, f2.clone())])?;
    let opts = ZoomOptions {
        initial_nodes: search.nodes()[0].min(201) | 1,
        ..ZoomOptions::default()
    };
    for flat in 0..at.len() {
        if !at.in_central(flat, CENTRAL) {
            continue;
        }
        let v = at.node(flat);
        let (Some(a), Some(b)) = (g1.eval(&v).finite_value(), g2.eval(&v).finite_value()) else {
            continue;
        };
        let rhs = lambda * a + (1.0 - lambda) * b;
        let (lhs, on_edge) = conjugate_at(&mix, &v, search.lo(), search.hi(), opts)?;
        if on_edge {
            check.skipped += 1;
            continue;
        }
        check.checked += 1;
        let diff = (lhs.get() - rhs).abs();
        if diff > check.worst {
            check.worst = diff;
        }
        if diff > tol && check.witness.is_none() {
            check.status = ConditionStatus::Fail;
            check.witness = Some((v, lhs, ExtReal::finite(rhs)));
        }
    }
    if check.checked == 0 && check.skipped == 0 {
        check.status = ConditionStatus::Vacuous;
    }
    Ok(check)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfConvReport {
    pub lambda: f64,
    pub x: Vec<f64>,
    /// Probe nodes in `∂(f₁,λ □ f₂,λ)(x)`.
    pub lhs: Vec<Vec<f64>>,
    /// Probe nodes in `∂φ₁(x) ∩ ∂φ₂(x)`.
    pub rhs: Vec<Vec<f64>>,
    pub equal: bool,
}

/// Compares `∂(f₁,λ □ f₂,λ)(x)` with `∂φ₁(x) ∩ ∂φ₂(x)` over the nodes of
/// `probes`, where `f₁,λ = λφ₁(·/λ)` and `f₂,λ = (1−λ)φ₂(·/(1−λ))`. The
/// inf-convolution is computed on `grid`; its subdifferential is the
/// discrete one. A failed `precondition` report is an error.
pub fn infconv_subdiff_check(
    phi1: &ConvexFn,
    phi2: &ConvexFn,
    x: &[f64],
    lambda: f64,
    grid: &Grid,
    probes: &Grid,
    tol: f64,
    precondition: Option<&ConditionReport>,
) -> Result<InfConvReport> {
    if let Some(p) = precondition {
        if !p.pass {
            return Err(Error::Precondition(
                "conditions (ii') and (ii'') fail for this pair of potentials".into(),
            ));
        }
    }
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::InvalidParameter(format!("lambda = {lambda} must lie in (0, 1)")));
    }
    if phi1.eval(x).is_infinite() || phi2.eval(x).is_infinite() {
        return Err(Error::Domain(format!("{x:?} is outside dom phi1 ∩ dom phi2")));
    }
    let f1 = ConvexFn::perspective(lambda, phi1.clone())?;
    let f2 = ConvexFn::perspective(1.0 - lambda, phi2.clone())?;
    let h = ConvexFn::Grid(inf_convolution(&f1, &f2, grid)?);
    let mut lhs = Vec::new();
    let mut rhs = Vec::new();
    for y in probes.points() {
        if subdifferential_test(&h, x, &y, tol)? {
            lhs.push(y.clone());
        }
        if subdifferential_test(phi1, x, &y, tol)? && subdifferential_test(phi2, x, &y, tol)? {
            rhs.push(y);
        }
    }
    let equal = lhs == rhs;
    Ok(InfConvReport {
        lambda,
        x: x.to_vec(),
        lhs,
        rhs,
        equal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bipotential::{check_strong, ProbeGrid};
    use crate::point::Point;

    fn grids() -> (Grid, Grid) {
        (Grid::uniform(-5.0, 5.0, 201).unwrap(), Grid::uniform(-3.0, 3.0, 121).unwrap())
    }

    fn slices() -> Vec<Point> {
        [-1.0, 0.0, 0.5, 1.0].iter().map(|&t| Point::scalar(t)).collect()
    }

    const LAMBDAS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

    #[test]
    fn identical_quadratics_pass() {
        let (p, d) = grids();
        let q = ConvexFn::half_square(1);
        let (b, rep) = max_of_separable(Space::Euclidean(1), q.clone(), q, &p, &d, &LAMBDAS, 1e-6).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert_eq!(rep.per_lambda[0].ii_prime.status, ConditionStatus::Trivial);
        assert_eq!(b.eval_coords(&[1.0], &[2.0]).get(), 2.5);
    }

    #[test]
    fn ray_indicators_pass_on_the_origin() {
        let (p, d) = grids();
        let (b, rep) = max_of_separable(
            Space::Euclidean(1),
            ConvexFn::nonpositive_ray(),
            ConvexFn::nonnegative_ray(),
            &p,
            &d,
            &LAMBDAS,
            1e-6,
        )
        .unwrap();
        assert!(rep.pass, "{rep:?}");
        assert_eq!(rep.per_lambda[2].ii_prime.checked, 1);
        assert_eq!(b.eval_coords(&[0.0], &[0.0]), 0.0);
        assert!(b.eval_coords(&[0.0], &[1.0]).is_infinite());
        let probes = ProbeGrid::symmetric(Grid::uniform(-2.0, 2.0, 41).unwrap());
        assert!(check_strong(&b, &slices(), &slices(), &probes, 1e-8).unwrap().pass);
    }

    #[test]
    fn point_indicator_with_quadratic_fails_both() {
        let (p, d) = grids();
        let (b, rep) = max_of_separable(
            Space::Euclidean(1),
            ConvexFn::zero_indicator(1),
            ConvexFn::half_square(1),
            &p,
            &d,
            &LAMBDAS,
            1e-6,
        )
        .unwrap();
        assert!(!rep.pass);
        let half = &rep.per_lambda[2].ii_prime;
        assert_eq!(half.status, ConditionStatus::Fail);
        assert!(half.witness.is_some());
        // at y = 1: left side 0, right side (1 - λ)/2
        let (lhs, rhs) = mixing_at(0.5, 1.0);
        assert!(lhs.abs() < 1e-12 && (rhs - 0.25).abs() < 1e-12);
        let probes = ProbeGrid::symmetric(Grid::uniform(-2.0, 2.0, 41).unwrap());
        assert!(!check_strong(&b, &slices(), &slices(), &probes, 1e-8).unwrap().pass);
    }

    fn mixing_at(lambda: f64, y: f64) -> (f64, f64) {
        let f = ConvexFn::sum(vec![(lambda, ConvexFn::zero_indicator(1)), (1.0 - lambda, ConvexFn::half_square(1))]).unwrap();
        let (l, _) = conjugate_at(&f, &[y], &[-5.0], &[5.0], ZoomOptions::default()).unwrap();
        (l.get(), (1.0 - lambda) * y * y / 2.0)
    }

    #[test]
    fn infconv_quadratics() {
        let g = Grid::uniform(-2.0, 2.0, 4001).unwrap();
        let probes = Grid::uniform(-3.0, 3.0, 61).unwrap();
        let q = ConvexFn::half_square(1);
        let r = infconv_subdiff_check(&q, &q, &[1.0], 0.5, &g, &probes, 1e-9, None).unwrap();
        assert!(r.equal, "{r:?}");
        assert_eq!(r.rhs.len(), 1);
        assert!((r.rhs[0][0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn infconv_abs_and_quadratic_at_zero() {
        let g = Grid::uniform(-2.0, 2.0, 801).unwrap();
        let probes = Grid::uniform(-3.0, 3.0, 61).unwrap();
        let r = infconv_subdiff_check(&ConvexFn::abs(), &ConvexFn::half_square(1), &[0.0], 0.5, &g, &probes, 1e-9, None).unwrap();
        assert!(r.equal);
        assert_eq!(r.lhs, vec![vec![0.0]]);
    }

    #[test]
    fn infconv_ray_indicators_agree_on_the_origin() {
        let g = Grid::uniform(-2.0, 2.0, 401).unwrap();
        let probes = Grid::uniform(-3.0, 3.0, 61).unwrap();
        let r = infconv_subdiff_check(&ConvexFn::nonpositive_ray(), &ConvexFn::nonnegative_ray(), &[0.0], 0.5, &g, &probes, 1e-9, None).unwrap();
        assert_eq!(r.lhs, vec![vec![0.0]]);
        assert_eq!(r.rhs, vec![vec![0.0]]);
    }

    #[test]
    fn failed_precondition_is_an_error() {
        let (p, d) = grids();
        let (_, rep) = max_of_separable(Space::Euclidean(1), ConvexFn::abs(), ConvexFn::half_square(1), &p, &d, &[0.5], 1e-6).unwrap();
        assert!(!rep.pass);
        let g = Grid::uniform(-2.0, 2.0, 201).unwrap();
        let r = infconv_subdiff_check(&ConvexFn::abs(), &ConvexFn::half_square(1), &[0.0], 0.5, &g, &g, 1e-9, Some(&rep));
        assert!(matches!(r, Err(Error::Precondition(_))));
    }
}
