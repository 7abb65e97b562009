//! Cauchy and Hill bipotentials: the isotropic and coaxial non-monotone laws.

use crate::bipotential::{Bipotential, Kind};
use crate::ereal::ExtReal;
use crate::point::{dot, norm, Point, Space};
use crate::symmat::{eigenvalues, SymMatrix};

/// `b(x, y) = ‖x‖‖y‖`. Equality with the pairing holds iff `y = λx` with
/// `λ ≥ 0` or one of `x`, `y` vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cauchy {
    dim: usize,
}

pub fn cauchy_bipotential(dim: usize) -> Cauchy {
    Cauchy { dim }
}

fn ray_select(x: &[f64], warm: &[f64]) -> Vec<f64> {
    let nx2 = dot(x, x);
    if nx2 == 0.0 {
        return warm.to_vec();
    }
    let lambda = (dot(warm, x) / nx2).max(0.0);
    x.iter().map(|v| lambda * v).collect()
}

impl Bipotential for Cauchy {
    fn primal_space(&self) -> Space {
        Space::Euclidean(self.dim)
    }
    fn dual_space(&self) -> Space {
        Space::Euclidean(self.dim)
    }
    fn kind(&self) -> Kind {
        Kind::Cauchy
    }
    fn eval_coords(&self, x: &[f64], y: &[f64]) -> ExtReal {
        ExtReal::finite(norm(x) * norm(y))
    }
    fn resolve_dual_closed(&self, x: &[f64], warm: &[f64]) -> Option<Vec<f64>> {
        Some(ray_select(x, warm))
    }
    fn resolve_primal_closed(&self, y: &[f64], warm: &[f64]) -> Option<Vec<f64>> {
        Some(ray_select(y, warm))
    }
}

/// `b(X, Y) = Σ λᵢ(X) λᵢ(Y)` with both spectra in descending order.
/// Equality with `tr(XY)` iff `X` and `Y` are coaxial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Hill {
    k: usize,
}

pub fn hill_bipotential(k: usize) -> Hill {
    Hill { k }
}

impl Hill {
    fn matrix(&self, c: &[f64]) -> SymMatrix {
        SymMatrix::from_point(&Point::new(Space::Symmetric(self.k), c.to_vec()).expect("finite"))
            .expect("matrix space")
    }

    pub fn value(&self, x: &SymMatrix, y: &SymMatrix) -> f64 {
        let lx = eigenvalues(x).expect("symmetric input");
        let ly = eigenvalues(y).expect("symmetric input");
        dot(&lx, &ly)
    }
}

impl Bipotential for Hill {
    fn primal_space(&self) -> Space {
        Space::Symmetric(self.k)
    }
    fn dual_space(&self) -> Space {
        Space::Symmetric(self.k)
    }
    fn kind(&self) -> Kind {
        Kind::Hill
    }
    fn eval_coords(&self, x: &[f64], y: &[f64]) -> ExtReal {
        ExtReal::finite(self.value(&self.matrix(x), &self.matrix(y)))
    }
}

/// Whether `X` and `Y` share eigenvectors with the order of eigenvalues
/// preserved, read off the Hill gap `|b(X, Y) − tr(XY)| ≤ tol`.
pub fn coaxial_check(x: &SymMatrix, y: &SymMatrix, tol: f64) -> bool {
    assert_eq!(x.order(), y.order(), "matrices of different order");
    let h = Hill { k: x.order() };
    (h.value(x, y) - x.inner(y)).abs() <= tol
}
