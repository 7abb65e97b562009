//! The bipotential abstraction: functions `b(x, y) ≥ ⟨x, y⟩`, convex in each
//! slot, whose equality set is the graph of the law they represent.

mod axioms;
mod graph;
mod maxsep;
mod monotone;
mod sample;
mod separable;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::ereal::ExtReal;
use crate::error::Result;
use crate::point::{check_dim, dot, Point, Space};

pub use axioms::{check_axioms, check_strong, AxiomReport, CheckOutcome, ProbeGrid, SliceResult, SliceStatus, Witness};
pub use graph::{bm_from_graph, graph_of, graph_of_grid, GraphIndicator};
pub use maxsep::{infconv_subdiff_check, max_of_separable, ConditionCheck, ConditionReport, ConditionStatus, InfConvReport, LambdaCondition};
pub use monotone::{check_cyclically_monotone, check_monotone, cyclic_sum, CycleWitness, MonotoneWitness};
pub use sample::GraphSample;
pub use separable::{separable, subgradient_select, Conjugation, Separable};

/// Default absolute tolerance for `b(x, y) = ⟨x, y⟩`.
pub const TOL_EQUALITY: f64 = 1e-8;
/// Slack allowed below the pairing before `b` is rejected.
pub const TOL_INEQUALITY: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Separable,
    Cauchy,
    Hill,
    Coulomb,
    DruckerPrager,
    GraphIndicator,
    CoverInf,
    FitzpatrickRestricted,
    MaxCombination,
    /// User-supplied closure, used for counterexamples and CLI expressions.
    Custom,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("unit variant");
        write!(f, "{}", s.as_str().unwrap_or("?"))
    }
}

pub trait Bipotential: Send + Sync {
    fn primal_space(&self) -> Space;
    fn dual_space(&self) -> Space;
    fn kind(&self) -> Kind;

    /// `b(x, y)` on raw coordinates of matching dimensions. Never `−∞`.
    fn eval_coords(&self, x: &[f64], y: &[f64]) -> ExtReal;

    fn eval(&self, x: &Point, y: &Point) -> Result<ExtReal> {
        check_dim(x, self.primal_space())?;
        check_dim(y, self.dual_space())?;
        Ok(self.eval_coords(x.coords(), y.coords()))
    }

    /// `b(x, y) − ⟨x, y⟩`.
    fn gap_coords(&self, x: &[f64], y: &[f64]) -> ExtReal {
        self.eval_coords(x, y) + (-dot(x, y))
    }

    fn gap(&self, x: &Point, y: &Point) -> Result<ExtReal> {
        Ok(self.eval(x, y)? + (-x.dot(y)))
    }

    /// Closed-form selection of `y` with `b(x, y) = ⟨x, y⟩`, the one nearest
    /// `warm` when the image is a set. `None` when unavailable or empty.
    fn resolve_dual_closed(&self, _x: &[f64], _warm: &[f64]) -> Option<Vec<f64>> {
        None
    }

    /// Mirror of [`Bipotential::resolve_dual_closed`] in the first slot.
    fn resolve_primal_closed(&self, _y: &[f64], _warm: &[f64]) -> Option<Vec<f64>> {
        None
    }
}

impl<B: Bipotential + ?Sized> Bipotential for Arc<B> {
    fn primal_space(&self) -> Space {
        (**self).primal_space()
    }
    fn dual_space(&self) -> Space {
        (**self).dual_space()
    }
    fn kind(&self) -> Kind {
        (**self).kind()
    }
    fn eval_coords(&self, x: &[f64], y: &[f64]) -> ExtReal {
        (**self).eval_coords(x, y)
    }
    fn resolve_dual_closed(&self, x: &[f64], warm: &[f64]) -> Option<Vec<f64>> {
        (**self).resolve_dual_closed(x, warm)
    }
    fn resolve_primal_closed(&self, y: &[f64], warm: &[f64]) -> Option<Vec<f64>> {
        (**self).resolve_primal_closed(y, warm)
    }
}

impl<B: Bipotential + ?Sized> Bipotential for Box<B> {
    fn primal_space(&self) -> Space {
        (**self).primal_space()
    }
    fn dual_space(&self) -> Space {
        (**self).dual_space()
    }
    fn kind(&self) -> Kind {
        (**self).kind()
    }
    fn eval_coords(&self, x: &[f64], y: &[f64]) -> ExtReal {
        (**self).eval_coords(x, y)
    }
    fn resolve_dual_closed(&self, x: &[f64], warm: &[f64]) -> Option<Vec<f64>> {
        (**self).resolve_dual_closed(x, warm)
    }
    fn resolve_primal_closed(&self, y: &[f64], warm: &[f64]) -> Option<Vec<f64>> {
        (**self).resolve_primal_closed(y, warm)
    }
}

type EvalFn = dyn Fn(&[f64], &[f64]) -> ExtReal + Send + Sync;

/// A bipotential candidate given by a closure.
#[derive(Clone)]
pub struct FnBipotential {
    primal: Space,
    dual: Space,
    f: Arc<EvalFn>,
}

impl FnBipotential {
    pub fn new(primal: Space, dual: Space, f: impl Fn(&[f64], &[f64]) -> ExtReal + Send + Sync + 'static) -> Self {
        FnBipotential {
            primal,
            dual,
            f: Arc::new(f),
        }
    }
}

impl fmt::Debug for FnBipotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnBipotential")
            .field("primal", &self.primal)
            .field("dual", &self.dual)
            .finish_non_exhaustive()
    }
}

impl Bipotential for FnBipotential {
    fn primal_space(&self) -> Space {
        self.primal
    }
    fn dual_space(&self) -> Space {
        self.dual
    }
    fn kind(&self) -> Kind {
        Kind::Custom
    }
    fn eval_coords(&self, x: &[f64], y: &[f64]) -> ExtReal {
        (self.f)(x, y)
    }
}

/// Pointwise maximum of bipotentials on common spaces.
#[derive(Clone)]
pub struct MaxCombination {
    parts: Vec<Arc<dyn Bipotential>>,
}

impl MaxCombination {
    pub fn new(parts: Vec<Arc<dyn Bipotential>>) -> Result<Self> {
        let Some(first) = parts.first() else {
            return Err(crate::Error::InvalidParameter("empty maximum".into()));
        };
        for p in &parts[1..] {
            if !p.primal_space().compatible(first.primal_space()) || !p.dual_space().compatible(first.dual_space()) {
                return Err(crate::Error::Dimension {
                    expected: first.primal_space().dim(),
                    got: p.primal_space().dim(),
                });
            }
        }
        Ok(MaxCombination { parts })
    }

    pub fn parts(&self) -> &[Arc<dyn Bipotential>] {
        &self.parts
    }
}

impl Bipotential for MaxCombination {
    fn primal_space(&self) -> Space {
        self.parts[0].primal_space()
    }
    fn dual_space(&self) -> Space {
        self.parts[0].dual_space()
    }
    fn kind(&self) -> Kind {
        Kind::MaxCombination
    }
    fn eval_coords(&self, x: &[f64], y: &[f64]) -> ExtReal {
        self.parts
            .iter()
            .map(|b| b.eval_coords(x, y))
            .max()
            .expect("non-empty by construction")
    }
}

/// `b(x, y) = x² + y²` on the line: convex, above the pairing, but not a
/// bipotential (the gap over `x` at `y = 1` has minimum 3/4).
pub fn sum_of_squares() -> FnBipotential {
    FnBipotential::new(Space::Euclidean(1), Space::Euclidean(1), |x, y| {
        ExtReal::finite(x[0] * x[0] + y[0] * y[0])
    })
}
