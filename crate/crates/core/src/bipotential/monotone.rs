use serde::{Deserialize, Serialize};

use super::{GraphSample, TOL_INEQUALITY};
use crate::error::{Error, Result};
use crate::point::dot;

/// Largest sample accepted by the cycle search.
pub const MAX_CYCLIC_SAMPLE: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotoneWitness {
    pub i: usize,
    pub j: usize,
    /// `⟨x_i − x_j, y_i − y_j⟩`, negative.
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleWitness {
    /// Indices `a_0, …, a_m` of the couples; the cycle closes back to `a_0`.
    pub indices: Vec<usize>,
    /// The cyclic sum, positive.
    pub value: f64,
}

/// Exhaustive pairwise test of `⟨x − x′, y − y′⟩ ≥ 0`; returns the first
/// violating pair in index order.
pub fn check_monotone(m: &GraphSample) -> (bool, Option<MonotoneWitness>) {
    let p = m.pairs();
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            let dx: Vec<f64> = p[i].0.coords().iter().zip(p[j].0.coords()).map(|(a, b)| a - b).collect();
            let dy: Vec<f64> = p[i].1.coords().iter().zip(p[j].1.coords()).map(|(a, b)| a - b).collect();
            let v = dot(&dx, &dy);
            if v < -TOL_INEQUALITY {
                return (false, Some(MonotoneWitness { i, j, value: v }));
            }
        }
    }
    (true, None)
}

/// Exhaustive test of the cyclic sums
/// `⟨x_0 − x_m, y_m⟩ + Σ_k ⟨x_k − x_{k−1}, y_{k−1}⟩ ≤ 0` over all families
/// of at most `m_max + 1` couples.
///
/// With `P[a][b] = ⟨x_b − x_a, y_a⟩` a cyclic sum is the weight of a
/// closed walk, and self-loops weigh 0, so the maximum over closed walks of
/// exactly `m_max + 1` steps (a max-plus matrix power) covers every shorter
/// cycle as well.
pub fn check_cyclically_monotone(m: &GraphSample, m_max: usize) -> Result<(bool, Option<CycleWitness>)> {
    if !(1..=4).contains(&m_max) {
        return Err(Error::InvalidParameter(format!("m_max = {m_max} must lie in 1..=4")));
    }
    let n = m.len();
    if n > MAX_CYCLIC_SAMPLE {
        return Err(Error::Size {
            len: n,
            limit: MAX_CYCLIC_SAMPLE,
        });
    }
    let p = m.pairs();
    let w: Vec<Vec<f64>> = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| {
                    let d: Vec<f64> = p[b].0.coords().iter().zip(p[a].0.coords()).map(|(u, v)| u - v).collect();
                    dot(&d, p[a].1.coords())
                })
                .collect()
        })
        .collect();
    let steps = m_max + 1;
    for s in 0..n {
        // best[k][v]: heaviest walk s → v with k steps; pred for reconstruction
        let mut best = vec![vec![f64::NEG_INFINITY; n]; steps + 1];
        let mut pred = vec![vec![usize::MAX; n]; steps + 1];
        best[0][s] = 0.0;
        for k in 1..=steps {
            for u in 0..n {
                let bu = best[k - 1][u];
                if bu == f64::NEG_INFINITY {
                    continue;
                }
                for v in 0..n {
                    let cand = bu + w[u][v];
                    if cand > best[k][v] {
                        best[k][v] = cand;
                        pred[k][v] = u;
                    }
                }
            }
        }
        if best[steps][s] > TOL_INEQUALITY {
            let mut walk = vec![s];
            let mut v = s;
            for k in (1..=steps).rev() {
                v = pred[k][v];
                walk.push(v);
            }
            walk.reverse();
            walk.pop();
            walk.dedup();
            if walk.len() > 1 && walk.first() == walk.last() {
                walk.pop();
            }
            return Ok((
                false,
                Some(CycleWitness {
                    indices: walk,
                    value: best[steps][s],
                }),
            ));
        }
    }
    Ok((true, None))
}

/// Cyclic sum of the family `indices` (closing back to the first).
pub fn cyclic_sum(m: &GraphSample, indices: &[usize]) -> f64 {
    let p = m.pairs();
    let k = indices.len();
    (0..k)
        .map(|t| {
            let a = indices[t];
            let b = indices[(t + 1) % k];
            let d: Vec<f64> = p[b].0.coords().iter().zip(p[a].0.coords()).map(|(u, v)| u - v).collect();
            dot(&d, p[a].1.coords())
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point::{Point, Space};
    use proptest::prelude::*;

    fn diagonal() -> GraphSample {
        let pts: Vec<(f64, f64)> = (0..21).map(|i| (-2.0 + 0.2 * i as f64, -2.0 + 0.2 * i as f64)).collect();
        GraphSample::scalar_pairs("diag", &pts)
    }

    #[test]
    fn diagonal_is_cyclically_monotone() {
        assert!(check_monotone(&diagonal()).0);
        for m in 1..=4 {
            assert!(check_cyclically_monotone(&diagonal(), m).unwrap().0);
        }
    }

    #[test]
    fn cauchy_pairs_violate_monotonicity() {
        let m = GraphSample::from_pairs(
            Space::Euclidean(2),
            Space::Euclidean(2),
            "cauchy",
            vec![(vec![1.0, 0.0], vec![10.0, 0.0]), (vec![2.0, 0.0], vec![0.2, 0.0])],
        )
        .unwrap();
        let (ok, w) = check_monotone(&m);
        assert!(!ok);
        assert!((w.unwrap().value + 9.8).abs() < 1e-12);
        let (ok, c) = check_cyclically_monotone(&m, 1).unwrap();
        assert!(!ok);
        let c = c.unwrap();
        assert_eq!(c.indices.len(), 2);
        assert!((c.value - 9.8).abs() < 1e-12);
        assert!((cyclic_sum(&m, &c.indices) - c.value).abs() < 1e-12);
    }

    #[test]
    fn singleton_and_limits() {
        let one = GraphSample::scalar_pairs("one", &[(1.0, 5.0)]);
        assert!(check_cyclically_monotone(&one, 4).unwrap().0);
        assert!(check_cyclically_monotone(&one, 5).is_err());
        let big: Vec<(f64, f64)> = (0..201).map(|i| (i as f64, i as f64)).collect();
        assert!(matches!(
            check_cyclically_monotone(&GraphSample::scalar_pairs("big", &big), 2),
            Err(Error::Size { len: 201, limit: 200 })
        ));
    }

    #[test]
    fn monotone_but_not_cyclically_monotone() {
        // rotation by 90 degrees: monotone (⟨d, Rd⟩ = 0), with positive 3-cycles
        let pts = [[1.0, 0.0], [0.0, 1.0], [-1.0, -1.0]];
        let mut m = GraphSample::new(Space::Euclidean(2), Space::Euclidean(2), "rot");
        for p in pts {
            m.push(Point::euclid(p.to_vec()), Point::euclid(vec![-p[1], p[0]])).unwrap();
        }
        assert!(check_monotone(&m).0);
        assert!(check_cyclically_monotone(&m, 1).unwrap().0);
        let (ok, w) = check_cyclically_monotone(&m, 2).unwrap();
        assert!(!ok);
        let w = w.unwrap();
        assert!((cyclic_sum(&m, &w.indices) - w.value).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn m1_agrees_with_pairwise(pts in prop::collection::vec((-3.0..3.0f64, -3.0..3.0f64), 1..12)) {
            let m = GraphSample::scalar_pairs("p", &pts);
            prop_assert_eq!(check_monotone(&m).0, check_cyclically_monotone(&m, 1).unwrap().0);
        }

        #[test]
        fn monotonicity_ignores_order(pts in prop::collection::vec((-3.0..3.0f64, -3.0..3.0f64), 1..12)) {
            let m = GraphSample::scalar_pairs("p", &pts);
            let mut rev = pts.clone();
            rev.reverse();
            let r = GraphSample::scalar_pairs("p", &rev);
            prop_assert_eq!(check_monotone(&m).0, check_monotone(&r).0);
        }
    }
}
