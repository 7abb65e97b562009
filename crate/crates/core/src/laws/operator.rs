//! Multivalued operators given by a case analysis, sampled into graphs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bipotential::GraphSample;
use crate::error::{Error, Result};
use crate::point::{check_dim, Point, Space};
use crate::symmat::{eig_sym, SymMatrix};

use super::plasticity::{dp_image, dp_probes, vonmises_image, DpParams};

/// How densely each branch of an operator is sampled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Sampling {
    pub per_branch: usize,
    /// Ray parameters for the Drücker-Prager ray branch.
    pub etas: Vec<f64>,
    pub seed: u64,
}

impl Default for Sampling {
    fn default() -> Self {
        Sampling {
            per_branch: 5,
            etas: vec![0.0, 0.5, 1.0, 2.0],
            seed: 0,
        }
    }
}

impl Sampling {
    pub fn per_branch(n: usize) -> Self {
        Sampling {
            per_branch: n,
            ..Sampling::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "rule")]
pub enum OperatorRule {
    /// `T_p` on traceless 3×3 matrices.
    VonMises { c: f64 },
    /// `T_DP` when `associated`, otherwise `T_na` with the dilatancy angle of `params`.
    DruckerPrager { params: DpParams, associated: bool },
    /// `T_iso` on `ℝⁿ`.
    Iso { dim: usize },
    /// `T_H` on symmetric `k×k` matrices.
    Coaxial { k: usize },
}

impl OperatorRule {
    pub fn tag(&self) -> &'static str {
        match self {
            OperatorRule::VonMises { .. } => "T_p",
            OperatorRule::DruckerPrager { associated: true, .. } => "T_DP",
            OperatorRule::DruckerPrager { associated: false, .. } => "T_na",
            OperatorRule::Iso { .. } => "T_iso",
            OperatorRule::Coaxial { .. } => "T_H",
        }
    }

    pub fn space(&self) -> Space {
        match *self {
            OperatorRule::VonMises { .. } => Space::Traceless(3),
            OperatorRule::DruckerPrager { .. } => Space::Symmetric(3),
            OperatorRule::Iso { dim } => Space::Euclidean(dim),
            OperatorRule::Coaxial { k } => Space::Symmetric(k),
        }
    }

    fn effective_dp(&self) -> Option<DpParams> {
        match *self {
            OperatorRule::DruckerPrager { params, associated } => {
                Some(if associated { params.associated() } else { params })
            }
            _ => None,
        }
    }
}

/// An operator together with the sampling used to turn it into a graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorSample {
    pub rule: OperatorRule,
    pub sampling: Sampling,
}

impl OperatorSample {
    pub fn new(rule: OperatorRule, sampling: Sampling) -> Self {
        OperatorSample { rule, sampling }
    }

    pub fn tag(&self) -> &'static str {
        self.rule.tag()
    }

    pub fn space(&self) -> Space {
        self.rule.space()
    }

    fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.sampling.seed)
    }

    /// Sampled elements of `T(x)`. Set-valued branches are represented by
    /// `per_branch` points (plus distinguished points such as `0` or `v`).
    pub fn image(&self, x: &Point) -> Result<Vec<Point>> {
        check_dim(x, self.space())?;
        let mut rng = self.rng();
        self.image_with(x, &mut rng)
    }

    fn image_with(&self, x: &Point, rng: &mut ChaCha8Rng) -> Result<Vec<Point>> {
        let s = &self.sampling;
        match self.rule {
            OperatorRule::VonMises { c } => vonmises_image(c, &x.clone().with_space(Space::Traceless(3))?, s, rng),
            OperatorRule::DruckerPrager { .. } => {
                let p = self.rule.effective_dp().expect("drucker-prager rule");
                dp_image(&p, x, s, rng)
            }
            OperatorRule::Iso { dim } => {
                let space = Space::Euclidean(dim);
                if x.norm() == 0.0 {
                    let mut out = vec![Point::zeros(space)];
                    for _ in 0..s.per_branch {
                        out.push(Point::new(space, (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect())?);
                    }
                    Ok(out)
                } else {
                    Ok((0..s.per_branch.max(1))
                        .map(|_| x.scaled(rng.gen_range(0.1..3.0)))
                        .collect())
                }
            }
            OperatorRule::Coaxial { k } => {
                let xm = SymMatrix::from_point(&x.clone().with_space(Space::Symmetric(k))?)?;
                if xm.norm() == 0.0 {
                    let mut out = vec![SymMatrix::zeros(k).to_point()];
                    for _ in 0..s.per_branch {
                        out.push(random_symmetric(k, rng).to_point());
                    }
                    return Ok(out);
                }
                let eig = eig_sym(&xm)?;
                let mut out = Vec::with_capacity(s.per_branch);
                for _ in 0..s.per_branch.max(1) {
                    let mut mu: Vec<f64> = (0..k).map(|_| rng.gen_range(-2.0..2.0)).collect();
                    mu.sort_by(|a, b| b.total_cmp(a));
                    out.push(SymMatrix::from_spectral(&mu, &eig.vectors).to_point());
                }
                Ok(out)
            }
        }
    }

    /// Probe points in the domain, covering every branch of the case analysis.
    pub fn probes(&self) -> Vec<Point> {
        let mut rng = self.rng();
        self.probes_with(&mut rng)
    }

    fn probes_with(&self, rng: &mut ChaCha8Rng) -> Vec<Point> {
        let n = self.sampling.per_branch;
        match self.rule {
            OperatorRule::VonMises { .. } => {
                let mut xs = vec![Point::zeros(Space::Traceless(3))];
                for _ in 0..n {
                    let d = random_unit_deviator(rng).scaled(rng.gen_range(0.1..3.0));
                    xs.push(d.to_traceless_point().expect("traceless"));
                }
                xs
            }
            OperatorRule::DruckerPrager { .. } => dp_probes(&self.rule.effective_dp().expect("dp"), &self.sampling, rng),
            OperatorRule::Iso { dim } => {
                let mut xs = vec![Point::zeros(Space::Euclidean(dim))];
                for _ in 0..n {
                    xs.push(Point::euclid((0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect()));
                }
                xs
            }
            OperatorRule::Coaxial { k } => {
                let mut xs = vec![SymMatrix::zeros(k).to_point()];
                for _ in 0..n {
                    xs.push(random_symmetric(k, rng).to_point());
                }
                xs
            }
        }
    }

    /// The sampled graph over the default probes. Deterministic in the seed.
    pub fn graph(&self) -> Result<GraphSample> {
        let mut rng = self.rng();
        let xs = self.probes_with(&mut rng);
        self.collect(&xs, &mut rng)
    }

    /// The sampled graph over caller-supplied primal points.
    pub fn graph_at(&self, xs: &[Point]) -> Result<GraphSample> {
        for x in xs {
            check_dim(x, self.space())?;
        }
        let mut rng = self.rng();
        self.collect(xs, &mut rng)
    }

    fn collect(&self, xs: &[Point], rng: &mut ChaCha8Rng) -> Result<GraphSample> {
        if self.sampling.per_branch == 0 {
            return Err(Error::Sampling("per_branch must be >= 1".into()));
        }
        let space = self.space();
        let mut g = GraphSample::new(space, space, self.tag());
        for x in xs {
            for y in self.image_with(x, rng)? {
                g.push_labeled(x.clone().with_space(space)?, y.with_space(space)?, Some(self.tag()))?;
            }
        }
        Ok(g)
    }
}

/// `T_iso`: `ℝⁿ` at the origin, the open ray `{λx : λ > 0}` elsewhere.
pub fn iso_operator(dim: usize, sampling: Sampling) -> OperatorSample {
    OperatorSample::new(OperatorRule::Iso { dim }, sampling)
}

/// `T_H`: all of `S(k)` at the origin, matrices coaxial with `x` elsewhere.
pub fn coaxial_operator(k: usize, sampling: Sampling) -> OperatorSample {
    OperatorSample::new(OperatorRule::Coaxial { k }, sampling)
}

/// Symmetric matrix with entries uniform in `[−2, 2]`.
pub fn random_symmetric(k: usize, rng: &mut impl Rng) -> SymMatrix {
    let mut rows = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in i..k {
            let v = rng.gen_range(-2.0..2.0);
            rows[i][j] = v;
            rows[j][i] = v;
        }
    }
    SymMatrix::from_rows(&rows).expect("symmetric by construction")
}

/// Uniformly drawn traceless 3×3 matrix of unit norm.
pub fn random_unit_deviator(rng: &mut impl Rng) -> SymMatrix {
    loop {
        let d = random_symmetric(3, rng).deviatoric();
        let n = d.norm();
        if n > 1e-3 {
            return d.scaled(1.0 / n);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bipotential::check_monotone;

    #[test]
    fn iso_ray_example() {
        let op = iso_operator(2, Sampling::default());
        let img = op.image(&Point::euclid(vec![1.0, 2.0])).unwrap();
        for y in &img {
            let lambda = y.coords()[0];
            assert!(lambda > 0.0);
            assert!((y.coords()[1] - 2.0 * lambda).abs() < 1e-15);
        }
    }

    #[test]
    fn iso_graph_is_not_monotone() {
        let g = iso_operator(2, Sampling::default()).graph().unwrap();
        let (ok, w) = check_monotone(&g);
        assert!(!ok);
        assert!(w.unwrap().value < 0.0);
    }

    #[test]
    fn coaxial_images_share_eigenvectors_in_order() {
        let op = coaxial_operator(3, Sampling::default());
        let x = SymMatrix::from_rows(&[vec![2.0, 1.0, 0.0], vec![1.0, 0.0, 0.5], vec![0.0, 0.5, -1.0]]).unwrap();
        for y in op.image(&x.to_point()).unwrap() {
            let y = SymMatrix::from_point(&y).unwrap();
            let lx = crate::symmat::eigenvalues(&x).unwrap();
            let ly = crate::symmat::eigenvalues(&y).unwrap();
            let ordered: f64 = lx.iter().zip(&ly).map(|(a, b)| a * b).sum();
            assert!((ordered - x.inner(&y)).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_sampling_is_rejected() {
        let op = iso_operator(2, Sampling::per_branch(0));
        assert!(matches!(op.graph(), Err(Error::Sampling(_))));
    }

    #[test]
    fn graphs_are_reproducible() {
        let op = coaxial_operator(3, Sampling::default());
        assert_eq!(op.graph().unwrap(), op.graph().unwrap());
    }

    #[test]
    fn sampling_json_defaults() {
        let s: Sampling = serde_json::from_str(r#"{"per_branch": 2}"#).unwrap();
        assert_eq!(s.etas, vec![0.0, 0.5, 1.0, 2.0]);
        assert!(serde_json::from_str::<Sampling>(r#"{"per_brnch": 2}"#).is_err());
    }
}
