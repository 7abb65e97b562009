//! Points of the finite-dimensional spaces the laws live in.
//!
//! Every space is stored in orthonormal coordinates so that the duality
//! pairing is the plain dot product of coordinate vectors. Symmetric
//! matrices use the Mandel packing (diagonal first, off-diagonal entries
//! scaled by √2), so `⟨X, Y⟩ = tr(XY)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tag describing how a coordinate vector is interpreted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "size")]
pub enum Space {
    /// Plain `R^n`.
    Euclidean(usize),
    /// `R × R²`: normal component first, then the tangential plane.
    ContactSplit,
    /// Symmetric `k × k` matrices, Mandel-packed.
    Symmetric(usize),
    /// Traceless symmetric `k × k` matrices, Mandel-packed.
    Traceless(usize),
}

impl Space {
    pub fn dim(self) -> usize {
        match self {
            Space::Euclidean(n) => n,
            Space::ContactSplit => 3,
            Space::Symmetric(k) | Space::Traceless(k) => k * (k + 1) / 2,
        }
    }

    /// Matrix order for the matrix spaces.
    pub fn matrix_order(self) -> Option<usize> {
        match self {
            Space::Symmetric(k) | Space::Traceless(k) => Some(k),
            _ => None,
        }
    }

    /// Two spaces are compatible when they share the coordinate layout.
    pub fn compatible(self, other: Space) -> bool {
        match (self.matrix_order(), other.matrix_order()) {
            (Some(a), Some(b)) => a == b,
            _ => self.dim() == other.dim(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point {
    space: Space,
    coords: Vec<f64>,
}

impl Point {
    pub fn new(space: Space, coords: Vec<f64>) -> Result<Self> {
        if coords.len() != space.dim() {
            return Err(Error::Dimension {
                expected: space.dim(),
                got: coords.len(),
            });
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("point coordinates must be finite".into()));
        }
        if let Space::Traceless(k) = space {
            let tr: f64 = coords[..k].iter().sum();
            let scale = coords.iter().fold(1.0_f64, |m, c| m.max(c.abs()));
            if tr.abs() > 1e-9 * scale {
                return Err(Error::InvalidParameter(format!(
                    "traceless point has trace {tr:e}"
                )));
            }
        }
        Ok(Point { space, coords })
    }

    pub fn euclid(coords: Vec<f64>) -> Self {
        let n = coords.len();
        Point::new(Space::Euclidean(n), coords).expect("finite coordinates")
    }

    pub fn scalar(v: f64) -> Self {
        Point::euclid(vec![v])
    }

    /// Contact point `(normal, tangential)`.
    pub fn contact(normal: f64, tangential: [f64; 2]) -> Self {
        Point::new(Space::ContactSplit, vec![normal, tangential[0], tangential[1]])
            .expect("finite coordinates")
    }

    pub fn zeros(space: Space) -> Self {
        Point {
            space,
            coords: vec![0.0; space.dim()],
        }
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    /// Re-tag the coordinates with a compatible space.
    pub fn with_space(self, space: Space) -> Result<Self> {
        Point::new(space, self.coords)
    }

    /// The duality pairing `⟨self, other⟩`.
    #[inline]
    pub fn dot(&self, other: &Point) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        dot(&self.coords, &other.coords)
    }

    pub fn norm(&self) -> f64 {
        norm(&self.coords)
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.coords.iter().all(|c| c.abs() <= tol)
    }

    pub fn scaled(&self, s: f64) -> Point {
        self.map(|c| s * c)
    }

    pub fn add(&self, other: &Point) -> Point {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Point) -> Point {
        self.zip(other, |a, b| a - b)
    }

    /// `self + s·other`.
    pub fn axpy(&self, s: f64, other: &Point) -> Point {
        self.zip(other, |a, b| a + s * b)
    }

    pub fn distance(&self, other: &Point) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// Coordinate-wise closeness, the membership test used by graph samples.
    pub fn approx_eq(&self, other: &Point, tol: f64) -> bool {
        self.coords.len() == other.coords.len()
            && self
                .coords
                .iter()
                .zip(&other.coords)
                .all(|(a, b)| (a - b).abs() <= tol)
    }

    /// Normal component of a contact point.
    pub fn normal(&self) -> f64 {
        debug_assert_eq!(self.space, Space::ContactSplit);
        self.coords[0]
    }

    /// Tangential components of a contact point.
    pub fn tangential(&self) -> [f64; 2] {
        debug_assert_eq!(self.space, Space::ContactSplit);
        [self.coords[1], self.coords[2]]
    }

    fn map(&self, f: impl Fn(f64) -> f64) -> Point {
        Point {
            space: self.space,
            coords: self.coords.iter().map(|&c| f(c)).collect(),
        }
    }

    fn zip(&self, other: &Point, f: impl Fn(f64, f64) -> f64) -> Point {
        debug_assert_eq!(self.dim(), other.dim());
        Point {
            space: self.space,
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn check_dim(p: &Point, space: Space) -> Result<()> {
    if p.space().compatible(space) {
        Ok(())
    } else {
        Err(Error::Dimension {
            expected: space.dim(),
            got: p.dim(),
        })
    }
}
