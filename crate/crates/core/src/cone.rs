//! Closed convex cones of the contact and plasticity laws: indicators,
//! support functions and Euclidean projections.

use serde::{Deserialize, Serialize};

use crate::ereal::ExtReal;
use crate::error::{Error, Result};
use crate::point::{check_dim, norm, Point, Space};
use crate::symmat::SymMatrix;

/// Absolute tolerance on cone inequalities.
pub const TOL_CONE: f64 = 1e-9;

/// Drücker-Prager elastic domain `{y : ‖y_d‖ ≤ r (c − y_h tanφ)}` on 3×3
/// symmetric stresses, with its derived radius and vertex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DpCone {
    /// Friction angle in radians, in `(0, π/2)`.
    pub phi: f64,
    /// Cohesion, `> 0`.
    pub c: f64,
    /// `3√2 / √(9 + 12 tan²φ)`.
    pub r: f64,
    /// Spheric part of the vertex `v = (c / tanφ)·I`.
    pub vertex_h: f64,
}

impl DpCone {
    pub fn new(phi: f64, c: f64) -> Result<Self> {
        if !(phi > 0.0 && phi < std::f64::consts::FRAC_PI_2) {
            return Err(Error::InvalidParameter(format!(
                "friction angle {phi} outside (0, pi/2)"
            )));
        }
        if !(c > 0.0) {
            return Err(Error::InvalidParameter(format!("cohesion {c} must be > 0")));
        }
        let tan = phi.tan();
        Ok(DpCone {
            phi,
            c,
            r: dp_radius(phi),
            vertex_h: c / tan,
        })
    }

    pub fn tan_phi(&self) -> f64 {
        self.phi.tan()
    }

    /// The vertex `v` as a symmetric matrix.
    pub fn vertex(&self) -> SymMatrix {
        SymMatrix::identity(3).scaled(self.vertex_h)
    }

    /// Signed margin `r(c − y_h tanφ) − ‖y_d‖`; nonnegative inside.
    pub fn margin(&self, y: &SymMatrix) -> f64 {
        let (yd, yh) = y.stress_split();
        self.r * (self.c - yh * self.tan_phi()) - yd.norm()
    }
}

/// Drücker-Prager radius `3√2 / √(9 + 12 tan²φ)`.
pub fn dp_radius(phi: f64) -> f64 {
    let t = phi.tan();
    3.0 * std::f64::consts::SQRT_2 / (9.0 + 12.0 * t * t).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Cone {
    /// Coulomb cone `K_μ = {‖y_t‖ ≤ μ y_n}`.
    SecondOrder { mu: f64 },
    /// Its polar `K_μ* = {μ‖x_t‖ + x_n ≤ 0}`.
    DualSecondOrder { mu: f64 },
    /// `K_0 = {(y_n, 0) : y_n ≥ 0}`.
    HalfLine,
    /// `K_0* = {x_n ≤ 0}`.
    NonpositiveNormal,
    /// Drücker-Prager domain (a cone with apex at `v`).
    DruckerPrager(DpCone),
}

impl Cone {
    pub fn second_order(mu: f64) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::InvalidParameter(format!("aperture {mu} must be > 0")));
        }
        Ok(Cone::SecondOrder { mu })
    }

    pub fn space(&self) -> Space {
        match self {
            Cone::DruckerPrager(_) => Space::Symmetric(3),
            _ => Space::ContactSplit,
        }
    }

    /// Polar cone, for the cones through the origin.
    pub fn polar(&self) -> Option<Cone> {
        match *self {
            Cone::SecondOrder { mu } => Some(Cone::DualSecondOrder { mu }),
            Cone::DualSecondOrder { mu } => Some(Cone::SecondOrder { mu }),
            Cone::HalfLine => Some(Cone::NonpositiveNormal),
            Cone::NonpositiveNormal => Some(Cone::HalfLine),
            Cone::DruckerPrager(_) => None,
        }
    }

    pub fn contains(&self, p: &Point) -> Result<bool> {
        check_dim(p, self.space())?;
        Ok(self.contains_coords(p.coords()))
    }

    pub(crate) fn contains_coords(&self, c: &[f64]) -> bool {
        match *self {
            Cone::SecondOrder { mu } => norm(&c[1..3]) <= mu * c[0] + TOL_CONE,
            Cone::DualSecondOrder { mu } => mu * norm(&c[1..3]) + c[0] <= TOL_CONE,
            Cone::HalfLine => c[0] >= -TOL_CONE && norm(&c[1..3]) <= TOL_CONE,
            Cone::NonpositiveNormal => c[0] <= TOL_CONE,
            Cone::DruckerPrager(dp) => {
                let y = SymMatrix::from_point(
                    &Point::new(Space::Symmetric(3), c.to_vec()).expect("finite"),
                )
                .expect("matrix space");
                dp.margin(&y) >= -TOL_CONE
            }
        }
    }

    /// Indicator `χ_K(p)`.
    pub fn indicator(&self, p: &Point) -> Result<ExtReal> {
        Ok(ExtReal::indicator(self.contains(p)?))
    }

    /// Support function `σ_K(p) = sup_{k ∈ K} ⟨p, k⟩`.
    pub fn support(&self, p: &Point) -> Result<ExtReal> {
        check_dim(p, self.space())?;
        Ok(self.support_coords(p.coords()))
    }

    pub(crate) fn support_coords(&self, c: &[f64]) -> ExtReal {
        match self.polar() {
            Some(polar) => ExtReal::indicator(polar.contains_coords(c)),
            None => {
                let Cone::DruckerPrager(dp) = *self else {
                    unreachable!()
                };
                // sup over K of tr(x_d y_d) + x_h y_h is finite iff
                // x_h ≥ r tanφ ‖x_d‖, and then equals (c/tanφ) x_h
                let x = SymMatrix::from_point(
                    &Point::new(Space::Symmetric(3), c.to_vec()).expect("finite"),
                )
                .expect("matrix space");
                let (xd, xh) = x.strain_split();
                if xh + TOL_CONE >= dp.r * dp.tan_phi() * xd.norm() {
                    ExtReal::finite(dp.vertex_h * xh)
                } else {
                    ExtReal::INFINITY
                }
            }
        }
    }

    /// Euclidean projection onto the cone.
    pub fn project(&self, p: &Point) -> Result<Point> {
        check_dim(p, self.space())?;
        let c = p.coords();
        let out = match *self {
            Cone::SecondOrder { mu } => {
                let (n, t) = project_soc(c[0], &c[1..3], mu);
                vec![n, t[0], t[1]]
            }
            Cone::DualSecondOrder { mu } => {
                let (n, t) = project_soc(-c[0], &c[1..3], 1.0 / mu);
                vec![-n, t[0], t[1]]
            }
            Cone::HalfLine => vec![c[0].max(0.0), 0.0, 0.0],
            Cone::NonpositiveNormal => vec![c[0].min(0.0), c[1], c[2]],
            Cone::DruckerPrager(dp) => {
                return Ok(project_dp(&dp, &SymMatrix::from_point(p)?).to_point());
            }
        };
        Point::new(p.space(), out)
    }
}

/// Projection onto `{(n, t) : ‖t‖ ≤ μ n}` in any tangential dimension.
pub fn project_soc(n: f64, t: &[f64], mu: f64) -> (f64, Vec<f64>) {
    let s = norm(t);
    if s <= mu * n {
        (n, t.to_vec())
    } else if mu * s <= -n {
        (0.0, vec![0.0; t.len()])
    } else {
        let a = (n + mu * s) / (1.0 + mu * mu);
        (a, t.iter().map(|ti| mu * a * ti / s).collect())
    }
}

/// In the coordinates `w = √3 (c/tanφ − y_h)`, `y_d` the domain is a
/// second-order cone of aperture `r tanφ / √3` and the map is an isometry.
fn project_dp(dp: &DpCone, y: &SymMatrix) -> SymMatrix {
    let sqrt3 = 3f64.sqrt();
    let (yd, yh) = y.stress_split();
    let w = sqrt3 * (dp.vertex_h - yh);
    let aperture = dp.r * dp.tan_phi() / sqrt3;
    let (w2, d2) = project_soc(w, yd.packed(), aperture);
    let yh2 = dp.vertex_h - w2 / sqrt3;
    let mut packed = d2;
    for v in &mut packed[..3] {
        *v += yh2;
    }
    SymMatrix::from_point(&Point::new(Space::Symmetric(3), packed).expect("finite"))
        .expect("matrix space")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn coulomb_cone_membership() {
        let k = Cone::second_order(0.5).unwrap();
        assert_eq!(k.indicator(&Point::contact(2.0, [1.0, 0.0])).unwrap(), 0.0);
        assert!(k.indicator(&Point::contact(1.0, [1.0, 0.0])).unwrap().is_infinite());
        let k0 = Cone::NonpositiveNormal;
        assert_eq!(k0.indicator(&Point::contact(-1.0, [3.0, 3.0])).unwrap(), 0.0);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let k = Cone::second_order(0.5).unwrap();
        assert!(matches!(
            k.indicator(&Point::euclid(vec![1.0, 2.0])),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn soc_projection_cases() {
        let k = Cone::second_order(1.0).unwrap();
        let p = k.project(&Point::contact(-1.0, [0.0, 0.0])).unwrap();
        assert_eq!(p.coords(), &[0.0, 0.0, 0.0]);
        let p = k.project(&Point::contact(1.0, [0.5, 0.0])).unwrap();
        assert_eq!(p.coords(), &[1.0, 0.5, 0.0]);
        let p = k.project(&Point::contact(0.0, [1.0, 0.0])).unwrap();
        assert_abs_diff_eq!(p.coords()[0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(p.coords()[1], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn dual_cone_is_polar() {
        let k = Cone::second_order(0.5).unwrap();
        let kp = k.polar().unwrap();
        // a point of the polar pairs nonpositively with a point of the cone
        let a = Point::contact(-1.0, [1.0, 1.0]);
        assert!(kp.contains(&a).unwrap());
        let b = Point::contact(2.0, [0.6, -0.8]);
        assert!(k.contains(&b).unwrap());
        assert!(a.dot(&b) <= 0.0);
        let proj = kp.project(&Point::contact(1.0, [0.0, 1.0])).unwrap();
        assert!(kp.contains(&proj).unwrap());
    }

    #[test]
    fn dp_vertex_and_projection() {
        let dp = DpCone::new(std::f64::consts::FRAC_PI_4, 1.0).unwrap();
        assert_abs_diff_eq!(dp.r, 3.0 * 2f64.sqrt() / 21f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(dp.margin(&dp.vertex()), 0.0, epsilon = 1e-15);
        let cone = Cone::DruckerPrager(dp);
        let outside = SymMatrix::diag(&[3.0, 2.0, 2.0]).to_point();
        assert!(!cone.contains(&outside).unwrap());
        let proj = cone.project(&outside).unwrap();
        assert!(cone.contains(&proj).unwrap());
        // projecting the projection is the identity
        let again = cone.project(&proj).unwrap();
        assert!(again.approx_eq(&proj, 1e-12));
    }

    #[test]
    fn dp_support_function_matches_vertex_pairing() {
        let dp = DpCone::new(0.5, 2.0).unwrap();
        let cone = Cone::DruckerPrager(dp);
        let x = SymMatrix::diag(&[1.0, 1.0, 1.0]).to_point();
        let s = cone.support(&x).unwrap();
        assert_abs_diff_eq!(s.get(), dp.vertex().to_point().dot(&x), epsilon = 1e-12);
        let shear = SymMatrix::diag(&[1.0, -1.0, 0.0]).to_point();
        assert!(cone.support(&shear).unwrap().is_infinite());
    }
}
