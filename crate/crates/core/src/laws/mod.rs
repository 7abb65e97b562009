//! Constitutive laws: contact with friction, plasticity and the isotropic
//! and coaxial laws, each with its bipotential and a sampled graph.

mod coulomb;
mod isotropic;
mod operator;
mod plasticity;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bipotential::{Bipotential, GraphSample};
use crate::error::{Error, Result};

pub use coulomb::{
    contact_branch, coulomb_bipotential, coulomb_graph, coulomb_inclusion_check, separation_pair, sliding_pair,
    sticking_pair, ContactBranch, Coulomb,
};
pub use isotropic::{cauchy_bipotential, coaxial_check, hill_bipotential, Cauchy, Hill};
pub use operator::{
    coaxial_operator, iso_operator, random_symmetric, random_unit_deviator, OperatorRule, OperatorSample, Sampling,
};
pub use plasticity::{
    dp_bipotential, dp_branch, dp_cone_margin, dp_operators, vonmises_bipotential, vonmises_operator, CouplingNorm,
    DpBranch, DpParams, DruckerPrager,
};

/// Law parameters as read from JSON, e.g. `{"law": "coulomb", "mu": 0.5}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "kebab-case", deny_unknown_fields)]
pub enum LawSpec {
    Coulomb {
        mu: f64,
    },
    DruckerPrager {
        phi_deg: f64,
        c: f64,
        theta_deg: f64,
        #[serde(default)]
        coupling: CouplingNorm,
    },
    Cauchy {
        dim: usize,
    },
    Hill {
        k: usize,
    },
    Vonmises {
        c: f64,
    },
}

impl LawSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn name(&self) -> &'static str {
        match self {
            LawSpec::Coulomb { .. } => "coulomb",
            LawSpec::DruckerPrager { .. } => "drucker-prager",
            LawSpec::Cauchy { .. } => "cauchy",
            LawSpec::Hill { .. } => "hill",
            LawSpec::Vonmises { .. } => "vonmises",
        }
    }

    fn check_dim(n: usize) -> Result<()> {
        if n == 0 {
            return Err(Error::InvalidParameter("dimension must be >= 1".into()));
        }
        Ok(())
    }

    pub fn bipotential(&self) -> Result<Arc<dyn Bipotential>> {
        Ok(match *self {
            LawSpec::Coulomb { mu } => Arc::new(coulomb_bipotential(mu)?),
            LawSpec::DruckerPrager {
                phi_deg,
                c,
                theta_deg,
                coupling,
            } => Arc::new(dp_bipotential(&DpParams::from_degrees(phi_deg, c, theta_deg)?).with_coupling(coupling)),
            LawSpec::Cauchy { dim } => {
                Self::check_dim(dim)?;
                Arc::new(cauchy_bipotential(dim))
            }
            LawSpec::Hill { k } => {
                Self::check_dim(k)?;
                Arc::new(hill_bipotential(k))
            }
            LawSpec::Vonmises { c } => Arc::new(vonmises_bipotential(c)?),
        })
    }

    /// Sampled graph of the law's operator: the three contact branches,
    /// `T_na`, `T_iso`, `T_H` or `T_p`.
    pub fn graph(&self, sampling: &Sampling) -> Result<GraphSample> {
        match *self {
            LawSpec::Coulomb { mu } => coulomb_graph(mu, sampling),
            LawSpec::DruckerPrager {
                phi_deg, c, theta_deg, ..
            } => dp_operators(&DpParams::from_degrees(phi_deg, c, theta_deg)?, sampling.clone())?.1.graph(),
            LawSpec::Cauchy { dim } => {
                Self::check_dim(dim)?;
                iso_operator(dim, sampling.clone()).graph()
            }
            LawSpec::Hill { k } => {
                Self::check_dim(k)?;
                coaxial_operator(k, sampling.clone()).graph()
            }
            LawSpec::Vonmises { c } => vonmises_operator(c, sampling.clone())?.graph(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bipotential::check_cyclically_monotone;

    #[test]
    fn json_forms() {
        let s = LawSpec::from_json(r#"{"law":"coulomb","mu":0.5}"#).unwrap();
        assert_eq!(s, LawSpec::Coulomb { mu: 0.5 });
        let s = LawSpec::from_json(r#"{"law":"drucker-prager","phi_deg":30,"c":1.0,"theta_deg":10}"#).unwrap();
        assert!(matches!(s, LawSpec::DruckerPrager { coupling: CouplingNorm::Deviatoric, .. }));
        assert!(LawSpec::from_json(r#"{"law":"coulomb","mu":0.5,"nu":1}"#).is_err());
        assert!(LawSpec::from_json(r#"{"law":"mohr","mu":0.5}"#).is_err());
    }

    #[test]
    fn every_law_graph_closes_its_gap() {
        let specs = [
            LawSpec::Coulomb { mu: 0.5 },
            LawSpec::DruckerPrager {
                phi_deg: 30.0,
                c: 1.0,
                theta_deg: 10.0,
                coupling: CouplingNorm::Deviatoric,
            },
            LawSpec::Cauchy { dim: 3 },
            LawSpec::Hill { k: 3 },
            LawSpec::Vonmises { c: 2.0 },
        ];
        for spec in specs {
            let b = spec.bipotential().unwrap();
            let g = spec.graph(&Sampling::default()).unwrap();
            assert!(!g.is_empty());
            for (x, y) in g.pairs() {
                let gap = b.gap(x, y).unwrap();
                assert!(gap.is_finite() && gap.get().abs() <= 1e-8, "{}: gap {gap:?}", spec.name());
            }
        }
    }

    #[test]
    fn vonmises_graph_is_cyclically_monotone() {
        let g = vonmises_operator(2.0, Sampling::default()).unwrap().graph().unwrap();
        let (ok, w) = check_cyclically_monotone(&g, 3).unwrap();
        assert!(ok, "{w:?}");
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(LawSpec::Coulomb { mu: -1.0 }.bipotential().is_err());
        assert!(LawSpec::Cauchy { dim: 0 }.graph(&Sampling::default()).is_err());
        assert!(LawSpec::DruckerPrager {
            phi_deg: 30.0,
            c: 1.0,
            theta_deg: 40.0,
            coupling: CouplingNorm::Deviatoric
        }
        .bipotential()
        .is_err());
    }
}
