use rayon::prelude::*;

use super::{Bipotential, GraphSample, Kind, TOL_INEQUALITY};
use crate::ereal::ExtReal;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::point::{dot, Point, Space};

/// The pairs of `candidates` with `b(x, y) − ⟨x, y⟩ ≤ tol`. A gap below
/// `−1e−9` means `b` is not above the pairing and is reported as an error.
pub fn graph_of<B: Bipotential + ?Sized>(b: &B, candidates: &GraphSample, tol: f64) -> Result<GraphSample> {
    let gaps: Vec<ExtReal> = candidates
        .pairs()
        .par_iter()
        .map(|(x, y)| b.gap_coords(x.coords(), y.coords()))
        .collect();
    let mut out = GraphSample::new(b.primal_space(), b.dual_space(), format!("graph of {}", b.kind()));
    for (i, g) in gaps.iter().enumerate() {
        let (x, y) = &candidates.pairs()[i];
        if g.get() < -TOL_INEQUALITY {
            return Err(Error::AxiomViolation(format!(
                "inequality: b - <x,y> = {:e} at x={:?}, y={:?}",
                g.get(),
                x.coords(),
                y.coords()
            )));
        }
        if g.get() <= tol {
            out.push_labeled(x.clone(), y.clone(), candidates.label(i))?;
        }
    }
    Ok(out)
}

/// [`graph_of`] over the product of two grids.
pub fn graph_of_grid<B: Bipotential + ?Sized>(b: &B, gx: &Grid, gy: &Grid, tol: f64) -> Result<GraphSample> {
    let xs = gx.points();
    let ys = gy.points();
    let hits: Vec<Result<Vec<(usize, usize)>>> = xs
        .par_iter()
        .enumerate()
        .map(|(i, x)| {
            let mut row = Vec::new();
            for (j, y) in ys.iter().enumerate() {
                let g = b.gap_coords(x, y).get();
                if g < -TOL_INEQUALITY {
                    return Err(Error::AxiomViolation(format!(
                        "inequality: b - <x,y> = {g:e} at x={x:?}, y={y:?}"
                    )));
                }
                if g <= tol {
                    row.push((i, j));
                }
            }
            Ok(row)
        })
        .collect();
    let mut out = GraphSample::new(b.primal_space(), b.dual_space(), format!("graph of {}", b.kind()));
    for row in hits {
        for (i, j) in row? {
            out.push(Point::new(b.primal_space(), xs[i].clone())?, Point::new(b.dual_space(), ys[j].clone())?)?;
        }
    }
    Ok(out)
}

/// `b_M(x, y) = ⟨x, y⟩ + χ_M(x, y)`, the greatest bipotential with graph `M`.
#[derive(Debug, Clone)]
pub struct GraphIndicator {
    graph: GraphSample,
}

pub fn bm_from_graph(m: GraphSample) -> Result<GraphIndicator> {
    if m.is_empty() {
        return Err(Error::DomainEmpty("b_M needs a non-empty graph".into()));
    }
    Ok(GraphIndicator { graph: m })
}

impl GraphIndicator {
    pub fn graph(&self) -> &GraphSample {
        &self.graph
    }
}

impl Bipotential for GraphIndicator {
    fn primal_space(&self) -> Space {
        self.graph.primal_space()
    }
    fn dual_space(&self) -> Space {
        self.graph.dual_space()
    }
    fn kind(&self) -> Kind {
        Kind::GraphIndicator
    }
    fn eval_coords(&self, x: &[f64], y: &[f64]) -> ExtReal {
        if self.graph.contains(x, y) {
            ExtReal::finite(dot(x, y))
        } else {
            ExtReal::INFINITY
        }
    }
    fn gap_coords(&self, x: &[f64], y: &[f64]) -> ExtReal {
        ExtReal::indicator(self.graph.contains(x, y))
    }
    fn resolve_dual_closed(&self, x: &[f64], warm: &[f64]) -> Option<Vec<f64>> {
        nearest(self.graph.pairs().iter().filter(|(a, _)| close(a.coords(), x)).map(|(_, b)| b), warm)
    }
    fn resolve_primal_closed(&self, y: &[f64], warm: &[f64]) -> Option<Vec<f64>> {
        nearest(self.graph.pairs().iter().filter(|(_, b)| close(b.coords(), y)).map(|(a, _)| a), warm)
    }
}

fn close(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(p, q)| (p - q).abs() <= super::sample::TOL_PAIR)
}

fn nearest<'a>(it: impl Iterator<Item = &'a Point>, warm: &[f64]) -> Option<Vec<f64>> {
    it.min_by(|a, b| {
        let da: f64 = a.coords().iter().zip(warm).map(|(p, q)| (p - q).powi(2)).sum();
        let db: f64 = b.coords().iter().zip(warm).map(|(p, q)| (p - q).powi(2)).sum();
        da.total_cmp(&db)
    })
    .map(|p| p.coords().to_vec())
}

#[cfg(test)]
mod tests {
    use super::super::{separable, sum_of_squares, Conjugation};
    use super::*;
    use crate::convex::ConvexFn;

    #[test]
    fn bm_examples() {
        let b = bm_from_graph(GraphSample::scalar_pairs("t", &[(0.0, 0.0)])).unwrap();
        assert_eq!(b.eval_coords(&[0.0], &[0.0]), 0.0);
        assert!(b.eval_coords(&[1.0], &[0.0]).is_infinite());
        let b = bm_from_graph(GraphSample::scalar_pairs("t", &[(1.0, 2.0), (3.0, 4.0)])).unwrap();
        assert_eq!(b.eval_coords(&[3.0], &[4.0]), 12.0);
        let empty = GraphSample::new(Space::Euclidean(1), Space::Euclidean(1), "t");
        assert!(matches!(bm_from_graph(empty), Err(Error::DomainEmpty(_))));
    }

    #[test]
    fn bm_reproduces_its_graph_among_decoys() {
        let m = GraphSample::scalar_pairs("t", &[(1.0, 2.0), (3.0, 4.0), (-1.0, 0.5)]);
        let b = bm_from_graph(m.clone()).unwrap();
        let mut cands = m.clone();
        cands.extend(&GraphSample::scalar_pairs("decoys", &[(1.0, 2.1), (0.0, 0.0), (3.0, -4.0)])).unwrap();
        assert_eq!(graph_of(&b, &cands, 1e-8).unwrap().pairs(), m.pairs());
    }

    #[test]
    fn separable_graph_is_the_diagonal() {
        let b = separable(Space::Euclidean(1), ConvexFn::half_square(1), Conjugation::Given(ConvexFn::half_square(1))).unwrap();
        let g = Grid::uniform(-2.0, 2.0, 41).unwrap();
        let m = graph_of_grid(&b, &g, &g, 1e-8).unwrap();
        assert_eq!(m.len(), 41);
        for (x, y) in m.pairs() {
            assert!((x.coords()[0] - y.coords()[0]).abs() < 1e-12);
        }
    }

    #[test]
    fn negative_gap_is_rejected() {
        let bad = super::super::FnBipotential::new(Space::Euclidean(1), Space::Euclidean(1), |_, _| ExtReal::finite(0.0));
        let cands = GraphSample::scalar_pairs("t", &[(1.0, 1.0)]);
        assert!(matches!(graph_of(&bad, &cands, 1e-8), Err(Error::AxiomViolation(_))));
        // x^2 + y^2 stays above the pairing
        assert!(graph_of(&sum_of_squares(), &cands, 1e-8).unwrap().is_empty());
    }
}
