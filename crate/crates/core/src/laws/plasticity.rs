//! Von Mises and Drücker-Prager plasticity: operators and bipotentials on
//! 3×3 symmetric strain rates and stresses.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bipotential::{separable, Bipotential, Conjugation, Kind, Separable};
use crate::cone::{DpCone, TOL_CONE};
use crate::convex::ConvexFn;
use crate::ereal::ExtReal;
use crate::error::{Error, Result};
use crate::point::{Point, Space};
use crate::symmat::SymMatrix;

use super::operator::{random_unit_deviator, OperatorRule, OperatorSample, Sampling};

/// Von Mises plasticity: `b(x, y) = c‖x‖ + χ_{‖y‖ ≤ c}(y)` on traceless
/// matrices. Its graph is that of `T_p = ∂(c‖·‖)`.
pub fn vonmises_bipotential(c: f64) -> Result<Separable> {
    if !(c >= 0.0 && c.is_finite()) {
        return Err(Error::InvalidParameter(format!("yield stress {c} must be >= 0")));
    }
    separable(
        Space::Traceless(3),
        ConvexFn::NormScaled { scale: c },
        Conjugation::Given(ConvexFn::IndicatorBall { radius: c }),
    )
}

/// `T_p`: the ball `‖y‖ ≤ c` at `x = 0`, `c·x/‖x‖` elsewhere.
pub fn vonmises_operator(c: f64, sampling: Sampling) -> Result<OperatorSample> {
    if !(c >= 0.0 && c.is_finite()) {
        return Err(Error::InvalidParameter(format!("yield stress {c} must be >= 0")));
    }
    Ok(OperatorSample::new(OperatorRule::VonMises { c }, sampling))
}

pub(crate) fn vonmises_image(c: f64, x: &Point, sampling: &Sampling, rng: &mut impl Rng) -> Result<Vec<Point>> {
    let n = x.norm();
    if n <= TOL_ZERO {
        let mut out = vec![Point::zeros(Space::Traceless(3))];
        for i in 0..sampling.per_branch {
            let rho = if i % 2 == 0 { 1.0 } else { rng.gen_range(0.0..1.0) };
            out.push(random_unit_deviator(rng).scaled(c * rho).to_traceless_point()?);
        }
        Ok(out)
    } else {
        Ok(vec![x.scaled(c / n)])
    }
}

/// Below this norm a strain rate counts as zero.
const TOL_ZERO: f64 = 1e-12;

/// How `‖x‖` is read in the coupling term of the non-associated bipotential.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CouplingNorm {
    /// `‖x_d‖`: the reading under which operator pairs close the gap.
    #[default]
    Deviatoric,
    /// `‖x‖ = (‖x_d‖² + x_h²/3)^½`, kept for comparison.
    Full,
}

/// Drücker-Prager parameters. `theta == phi` is the associated model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DpParams {
    pub cone: DpCone,
    /// Dilatancy angle in radians, `0 ≤ θ ≤ φ`.
    pub theta: f64,
}

impl DpParams {
    pub fn new(phi: f64, c: f64, theta: f64) -> Result<Self> {
        let cone = DpCone::new(phi, c)?;
        if !(theta >= 0.0 && theta <= phi) {
            return Err(Error::InvalidParameter(format!(
                "dilatancy angle {theta} outside [0, phi = {phi}]"
            )));
        }
        Ok(DpParams { cone, theta })
    }

    pub fn from_degrees(phi_deg: f64, c: f64, theta_deg: f64) -> Result<Self> {
        Self::new(phi_deg.to_radians(), c, theta_deg.to_radians())
    }

    /// The associated model, `θ = φ`.
    pub fn associated(&self) -> DpParams {
        DpParams {
            cone: self.cone,
            theta: self.cone.phi,
        }
    }

    pub fn phi(&self) -> f64 {
        self.cone.phi
    }

    pub fn c(&self) -> f64 {
        self.cone.c
    }

    pub fn r(&self) -> f64 {
        self.cone.r
    }

    /// Vertex `v = (c / tanφ)·I`.
    pub fn vertex(&self) -> SymMatrix {
        self.cone.vertex()
    }

    pub fn is_associated(&self) -> bool {
        self.theta == self.cone.phi
    }

    /// Signed distance-like margin of `x` to the boundary of `K_p`,
    /// `x_h − r‖x_d‖ tanθ`.
    pub fn kp_margin(&self, x: &SymMatrix) -> f64 {
        let (xd, xh) = x.strain_split();
        xh - self.r() * xd.norm() * self.theta.tan()
    }

    /// The point `v + η(x̂_d − v/(rc))` of the ray family.
    pub fn ray_point(&self, xd_unit: &SymMatrix, eta: f64) -> SymMatrix {
        let v = self.vertex();
        v.add(&xd_unit.scaled(eta)).add(&v.scaled(-eta / (self.r() * self.c())))
    }
}

/// Which case of the operator's definition applies at `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DpBranch {
    /// `x = 0`: the whole plastic domain.
    Cone,
    /// `x_h = r‖x_d‖ tanθ`: a ray through the vertex.
    Ray,
    /// `x_h > r‖x_d‖ tanθ`: the vertex alone.
    Vertex,
    /// Outside `K_p`: no stress.
    Empty,
}

pub fn dp_branch(p: &DpParams, x: &SymMatrix) -> DpBranch {
    let scale = 1.0 + x.norm();
    if x.norm() <= TOL_ZERO {
        return DpBranch::Cone;
    }
    let m = p.kp_margin(x);
    let (xd, _) = x.strain_split();
    if m.abs() <= TOL_CONE * scale && xd.norm() > TOL_ZERO {
        DpBranch::Ray
    } else if m > 0.0 {
        DpBranch::Vertex
    } else {
        DpBranch::Empty
    }
}

/// `(T_DP, T_na)`: the associated and non-associated operators.
pub fn dp_operators(p: &DpParams, sampling: Sampling) -> Result<(OperatorSample, OperatorSample)> {
    if sampling.etas.is_empty() {
        return Err(Error::Sampling("the ray family needs at least one eta".into()));
    }
    Ok((
        OperatorSample::new(
            OperatorRule::DruckerPrager {
                params: *p,
                associated: true,
            },
            sampling.clone(),
        ),
        OperatorSample::new(
            OperatorRule::DruckerPrager {
                params: *p,
                associated: false,
            },
            sampling,
        ),
    ))
}

pub(crate) fn dp_image(p: &DpParams, x: &Point, sampling: &Sampling, rng: &mut impl Rng) -> Result<Vec<Point>> {
    let xm = SymMatrix::from_point(x)?;
    let out = match dp_branch(p, &xm) {
        DpBranch::Cone => {
            let mut out = vec![p.vertex()];
            let tan = p.cone.tan_phi();
            for i in 0..sampling.per_branch {
                // depth s below the vertex, deviator on the boundary or inside
                let s = rng.gen_range(0.0..2.0) * p.c() / tan;
                let frac = if i % 2 == 0 { 1.0 } else { rng.gen_range(0.0..1.0) };
                let d = random_unit_deviator(rng).scaled(frac * p.r() * tan * s);
                out.push(d.add(&SymMatrix::identity(3).scaled(p.cone.vertex_h - s)));
            }
            out
        }
        DpBranch::Ray => {
            let (xd, _) = xm.strain_split();
            let unit = xd.scaled(1.0 / xd.norm());
            sampling.etas.iter().map(|&eta| p.ray_point(&unit, eta)).collect()
        }
        DpBranch::Vertex => vec![p.vertex()],
        DpBranch::Empty => Vec::new(),
    };
    for y in &out {
        if p.cone.margin(y) < -TOL_CONE * (1.0 + y.norm()) {
            return Err(Error::Sampling(format!("emitted stress outside K: {:?}", y.packed())));
        }
    }
    Ok(out.into_iter().map(|m| m.to_point()).collect())
}

/// Strain rates covering the three nonempty cases of the operator.
pub(crate) fn dp_probes(p: &DpParams, sampling: &Sampling, rng: &mut impl Rng) -> Vec<Point> {
    let mut xs = vec![SymMatrix::zeros(3).to_point()];
    let tan_theta = p.theta.tan();
    for _ in 0..sampling.per_branch {
        let d = random_unit_deviator(rng).scaled(rng.gen_range(0.2..2.0));
        let on_ray = d.norm() * p.r() * tan_theta;
        xs.push(d.add(&SymMatrix::identity(3).scaled(on_ray / 3.0)).to_point());
        let above = on_ray + rng.gen_range(0.1..2.0);
        xs.push(d.add(&SymMatrix::identity(3).scaled(above / 3.0)).to_point());
    }
    xs
}

/// Non-associated Drücker-Prager bipotential
/// `b_p(x, y) = χ_K(y) + χ_{K_p}(x) + (c/tanφ) x_h + r‖x_d‖(tanφ − tanθ)(c/tanφ − y_h)`
/// with `K_p = {x_h ≥ r‖x_d‖ tanθ}`.
///
/// The coupling factor is written `c/tanφ − y_h`, which is nonnegative on
/// `K`. With the opposite orientation the ray pairs of `T_na` fall below the
/// duality pairing by `2η‖x_d‖(1 − tanθ/tanφ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DruckerPrager {
    params: DpParams,
    coupling: CouplingNorm,
}

pub fn dp_bipotential(p: &DpParams) -> DruckerPrager {
    DruckerPrager {
        params: *p,
        coupling: CouplingNorm::Deviatoric,
    }
}

impl DruckerPrager {
    pub fn with_coupling(mut self, coupling: CouplingNorm) -> Self {
        self.coupling = coupling;
        self
    }

    pub fn params(&self) -> &DpParams {
        &self.params
    }

    fn matrices(x: &[f64], y: &[f64]) -> (SymMatrix, SymMatrix) {
        let mx = SymMatrix::from_point(&Point::new(Space::Symmetric(3), x.to_vec()).expect("finite"))
            .expect("matrix space");
        let my = SymMatrix::from_point(&Point::new(Space::Symmetric(3), y.to_vec()).expect("finite"))
            .expect("matrix space");
        (mx, my)
    }
}

impl Bipotential for DruckerPrager {
    fn primal_space(&self) -> Space {
        Space::Symmetric(3)
    }
    fn dual_space(&self) -> Space {
        Space::Symmetric(3)
    }
    fn kind(&self) -> Kind {
        Kind::DruckerPrager
    }
    fn eval_coords(&self, x: &[f64], y: &[f64]) -> ExtReal {
        let p = &self.params;
        let (mx, my) = Self::matrices(x, y);
        if p.cone.margin(&my) < -TOL_CONE || p.kp_margin(&mx) < -TOL_CONE {
            return ExtReal::INFINITY;
        }
        let (xd, xh) = mx.strain_split();
        let (_, yh) = my.stress_split();
        let tan_phi = p.cone.tan_phi();
        let xnorm = match self.coupling {
            CouplingNorm::Deviatoric => xd.norm(),
            CouplingNorm::Full => (xd.norm().powi(2) + xh * xh / 3.0).sqrt(),
        };
        let coupling = p.r() * xnorm * (tan_phi - p.theta.tan()) * (p.cone.vertex_h - yh);
        ExtReal::finite(p.cone.vertex_h * xh + coupling)
    }
    fn resolve_dual_closed(&self, x: &[f64], warm: &[f64]) -> Option<Vec<f64>> {
        let p = &self.params;
        let (mx, mw) = Self::matrices(x, warm);
        let y = match dp_branch(p, &mx) {
            DpBranch::Cone => crate::cone::Cone::DruckerPrager(p.cone)
                .project(&mw.to_point())
                .ok()
                .map(|q| q.into_coords())?,
            DpBranch::Vertex => p.vertex().packed().to_vec(),
            DpBranch::Ray => {
                // nearest ray point: project the warm start onto the
                // half-line v + η e, e = x̂_d − v/(rc)
                let (xd, _) = mx.strain_split();
                let unit = xd.scaled(1.0 / xd.norm());
                let v = p.vertex();
                let e = p.ray_point(&unit, 1.0).add(&v.scaled(-1.0));
                let eta = (mw.add(&v.scaled(-1.0)).inner(&e) / e.inner(&e)).max(0.0);
                p.ray_point(&unit, eta).packed().to_vec()
            }
            DpBranch::Empty => return None,
        };
        Some(y)
    }
}

/// Margin of packed stress coordinates to the boundary of `K`.
pub fn dp_cone_margin(p: &DpParams, y: &[f64]) -> f64 {
    let m = SymMatrix::from_point(&Point::new(Space::Symmetric(3), y.to_vec()).expect("finite")).expect("matrix");
    p.cone.margin(&m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point::dot;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn params(theta_frac: f64) -> DpParams {
        let phi = std::f64::consts::FRAC_PI_4;
        DpParams::new(phi, 1.0, theta_frac * phi).unwrap()
    }

    #[test]
    fn derived_radius_and_vertex() {
        let p = params(0.0);
        assert_abs_diff_eq!(p.r(), 3.0 * 2f64.sqrt() / 21f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(p.vertex().get(0, 0), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.vertex().get(0, 1), 0.0);
    }

    #[test]
    fn vertex_pair_has_zero_gap() {
        let b = dp_bipotential(&params(0.3));
        let x = SymMatrix::zeros(3).to_point();
        let v = params(0.3).vertex().to_point();
        assert_eq!(b.eval(&x, &v).unwrap(), 0.0);
    }

    #[test]
    fn outside_the_cone_is_infinite() {
        let b = dp_bipotential(&params(0.3));
        let y = SymMatrix::identity(3).scaled(2.0).to_point();
        assert!(b.eval(&SymMatrix::zeros(3).to_point(), &y).unwrap().is_infinite());
    }

    #[test]
    fn ray_pairs_close_the_gap() {
        for frac in [0.0, 0.3, 1.0] {
            let p = params(frac);
            let b = dp_bipotential(&p);
            let mut rng = ChaCha8Rng::seed_from_u64(3);
            let d = random_unit_deviator(&mut rng).scaled(1.7);
            let x = d.add(&SymMatrix::identity(3).scaled(d.norm() * p.r() * p.theta.tan() / 3.0));
            assert_eq!(dp_branch(&p, &x), DpBranch::Ray);
            for eta in [0.0, 0.5, 1.0, 2.0] {
                let y = p.ray_point(&d.scaled(1.0 / d.norm()), eta);
                assert!(p.cone.margin(&y).abs() < 1e-12);
                let gap = b.gap_coords(x.packed(), y.packed()).get();
                assert!(gap.abs() <= 1e-12, "theta frac {frac}, eta {eta}: gap {gap}");
            }
        }
    }

    #[test]
    fn printed_coupling_orientation_goes_below_the_pairing() {
        // the other sign of (y_h − c/tanφ) on a ray pair gives −2η‖x_d‖(1 − tanθ/tanφ)
        let p = params(0.3);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let d = random_unit_deviator(&mut rng);
        let x = d.add(&SymMatrix::identity(3).scaled(p.r() * p.theta.tan() / 3.0));
        let eta = 1.0;
        let y = p.ray_point(&d, eta);
        let (_, xh) = x.strain_split();
        let (_, yh) = y.stress_split();
        let tp = p.cone.tan_phi();
        let printed = p.cone.vertex_h * xh + p.r() * (tp - p.theta.tan()) * (yh - p.cone.vertex_h);
        let gap = printed - dot(x.packed(), y.packed());
        assert_abs_diff_eq!(gap, -2.0 * eta * (1.0 - p.theta.tan() / tp), epsilon = 1e-12);
    }

    #[test]
    fn full_norm_coupling_misses_ray_pairs() {
        let p = params(0.3);
        let b = dp_bipotential(&p).with_coupling(CouplingNorm::Full);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let d = random_unit_deviator(&mut rng);
        let x = d.add(&SymMatrix::identity(3).scaled(p.r() * p.theta.tan() / 3.0));
        let y = p.ray_point(&d, 1.0);
        assert!(b.gap_coords(x.packed(), y.packed()).get() > 1e-6);
    }

    #[test]
    fn associated_and_nonassociated_coincide_at_theta_phi() {
        let p = params(1.0);
        let (t_dp, t_na) = dp_operators(&p, Sampling::default()).unwrap();
        assert_eq!(t_dp.graph().unwrap().pairs(), t_na.graph().unwrap().pairs());
    }

    #[test]
    fn vertex_branch_and_empty_branch() {
        let p = params(0.3);
        let x = SymMatrix::identity(3).scaled(0.5);
        assert_eq!(dp_branch(&p, &x), DpBranch::Vertex);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let img = dp_image(&p, &x.to_point(), &Sampling::default(), &mut rng).unwrap();
        assert_eq!(img, vec![p.vertex().to_point()]);
        let x = SymMatrix::identity(3).scaled(-0.5);
        assert_eq!(dp_branch(&p, &x), DpBranch::Empty);
        assert!(dp_image(&p, &x.to_point(), &Sampling::default(), &mut rng).unwrap().is_empty());
    }

    #[test]
    fn empty_eta_sampling_is_an_error() {
        let s = Sampling {
            etas: vec![],
            ..Sampling::default()
        };
        assert!(matches!(dp_operators(&params(0.3), s), Err(Error::Sampling(_))));
    }

    #[test]
    fn vonmises_radial_image() {
        let x = SymMatrix::diag(&[2.0, -1.0, -1.0]);
        let unit = x.scaled(1.0 / x.norm()).to_traceless_point().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let img = vonmises_image(2.0, &unit, &Sampling::default(), &mut rng).unwrap();
        assert!(img[0].approx_eq(&unit.scaled(2.0), 1e-15));
        let b = vonmises_bipotential(2.0).unwrap();
        assert!(b.gap(&unit, &img[0]).unwrap().get().abs() < 1e-12);
        let zero = Point::zeros(Space::Traceless(3));
        let img = vonmises_image(2.0, &zero, &Sampling::default(), &mut rng).unwrap();
        assert!(img.iter().all(|y| y.norm() <= 2.0 + 1e-12));
    }

    #[test]
    fn dp_closed_form_resolution() {
        let p = params(0.3);
        let b = dp_bipotential(&p);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let d = random_unit_deviator(&mut rng);
        let x = d.add(&SymMatrix::identity(3).scaled(p.r() * p.theta.tan() / 3.0));
        let warm = p.ray_point(&d, 0.8).add(&SymMatrix::identity(3).scaled(0.01));
        let y = b.resolve_dual_closed(x.packed(), warm.packed()).unwrap();
        assert!(b.gap_coords(x.packed(), &y).get().abs() < 1e-12);
    }
}
