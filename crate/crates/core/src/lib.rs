//! Bipotentials, convex conjugation and implicit constitutive laws.

pub mod bipotential;
pub mod cone;
pub mod convex;
pub mod covers;
pub mod ereal;
pub mod error;
pub mod fitzpatrick;
pub mod grid;
pub mod laws;
pub mod point;
pub mod search;
pub mod solver;
pub mod symmat;

pub use cone::{Cone, DpCone};
pub use convex::{ConvexFn, ConjugateResult};
pub use ereal::ExtReal;
pub use error::{Error, Result};
pub use grid::{Grid, GridFn};
pub use point::{Point, Space};
pub use symmat::SymMatrix;
pub use bipotential::{Bipotential, GraphSample, Kind};
