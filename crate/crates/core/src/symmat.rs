//! Symmetric matrices, the deviatoric/spheric split and a cyclic Jacobi
//! eigensolver.

use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::{Point, Space};

/// Symmetric `k × k` matrix in Mandel packing: the `k` diagonal entries,
/// then `√2·m[i][j]` for `i < j` in row-major order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymMatrix {
    order: usize,
    packed: Vec<f64>,
}

fn packed_len(k: usize) -> usize {
    k * (k + 1) / 2
}

fn offdiag_index(k: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < k);
    // pairs (a, b), a < b, enumerated row-major
    let before: usize = (0..i).map(|a| k - 1 - a).sum();
    k + before + (j - i - 1)
}

impl SymMatrix {
    pub fn zeros(order: usize) -> Self {
        SymMatrix {
            order,
            packed: vec![0.0; packed_len(order)],
        }
    }

    pub fn identity(order: usize) -> Self {
        Self::diag(&vec![1.0; order])
    }

    pub fn diag(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len());
        m.packed[..d.len()].copy_from_slice(d);
        m
    }

    /// Build from a full row-major matrix; asymmetric input is rejected.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let k = rows.len();
        if rows.iter().any(|r| r.len() != k) {
            return Err(Error::Dimension {
                expected: k,
                got: rows.iter().map(|r| r.len()).find(|&l| l != k).unwrap_or(0),
            });
        }
        let scale = rows
            .iter()
            .flatten()
            .fold(1.0_f64, |m, v| m.max(v.abs()));
        let mut m = Self::zeros(k);
        for i in 0..k {
            m.packed[i] = rows[i][i];
            for j in i + 1..k {
                if (rows[i][j] - rows[j][i]).abs() > 1e-12 * scale {
                    return Err(Error::InvalidParameter(format!(
                        "matrix is not symmetric at ({i},{j})"
                    )));
                }
                m.packed[offdiag_index(k, i, j)] = SQRT_2 * 0.5 * (rows[i][j] + rows[j][i]);
            }
        }
        Ok(m)
    }

    pub fn from_point(p: &Point) -> Result<Self> {
        let k = p.space().matrix_order().ok_or(Error::Dimension {
            expected: 6,
            got: p.dim(),
        })?;
        Ok(SymMatrix {
            order: k,
            packed: p.coords().to_vec(),
        })
    }

    pub fn to_point(&self) -> Point {
        Point::new(Space::Symmetric(self.order), self.packed.clone()).expect("finite entries")
    }

    /// Tag as a traceless point; fails if the trace is not zero.
    pub fn to_traceless_point(&self) -> Result<Point> {
        Point::new(Space::Traceless(self.order), self.packed.clone())
    }

    /// Spectral synthesis `Q·diag(values)·Qᵀ`, `vectors` holding the columns of `Q`.
    pub fn from_spectral(values: &[f64], vectors: &[Vec<f64>]) -> Self {
        let k = values.len();
        let mut rows = vec![vec![0.0; k]; k];
        for (l, v) in values.iter().zip(vectors) {
            for i in 0..k {
                for j in 0..k {
                    rows[i][j] += l * v[i] * v[j];
                }
            }
        }
        // exact symmetry by construction of the packing
        let mut m = Self::zeros(k);
        for i in 0..k {
            m.packed[i] = rows[i][i];
            for j in i + 1..k {
                m.packed[offdiag_index(k, i, j)] = SQRT_2 * 0.5 * (rows[i][j] + rows[j][i]);
            }
        }
        m
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn packed(&self) -> &[f64] {
        &self.packed
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => self.packed[i],
            std::cmp::Ordering::Less => self.packed[offdiag_index(self.order, i, j)] / SQRT_2,
            std::cmp::Ordering::Greater => self.packed[offdiag_index(self.order, j, i)] / SQRT_2,
        }
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        let k = self.order;
        (0..k).map(|i| (0..k).map(|j| self.get(i, j)).collect()).collect()
    }

    pub fn trace(&self) -> f64 {
        self.packed[..self.order].iter().sum()
    }

    /// `tr(self · other)`.
    pub fn inner(&self, other: &SymMatrix) -> f64 {
        crate::point::dot(&self.packed, &other.packed)
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).sqrt()
    }

    pub fn scaled(&self, s: f64) -> SymMatrix {
        SymMatrix {
            order: self.order,
            packed: self.packed.iter().map(|v| s * v).collect(),
        }
    }

    pub fn add(&self, other: &SymMatrix) -> SymMatrix {
        SymMatrix {
            order: self.order,
            packed: self.packed.iter().zip(&other.packed).map(|(a, b)| a + b).collect(),
        }
    }

    /// Traceless part `x − (tr x / k)·I`.
    pub fn deviatoric(&self) -> SymMatrix {
        let mean = self.trace() / self.order as f64;
        let mut d = self.clone();
        for v in &mut d.packed[..self.order] {
            *v -= mean;
        }
        d
    }

    /// Strain-type split `x = x_d + (1/k)·x_h·I` with `x_h = tr x`.
    pub fn strain_split(&self) -> (SymMatrix, f64) {
        (self.deviatoric(), self.trace())
    }

    /// Stress-type split `y = y_d + y_h·I` with `y_h = tr y / k`.
    pub fn stress_split(&self) -> (SymMatrix, f64) {
        (self.deviatoric(), self.trace() / self.order as f64)
    }

    /// Full matrix product, returned row-major (not symmetric in general).
    pub fn matmul(&self, other: &SymMatrix) -> Vec<Vec<f64>> {
        let a = self.to_rows();
        let b = other.to_rows();
        let k = self.order;
        (0..k)
            .map(|i| (0..k).map(|j| (0..k).map(|l| a[i][l] * b[l][j]).sum()).collect())
            .collect()
    }
}

/// Result of [`eig_sym`]: eigenvalues in descending order and the matching
/// orthonormal eigenvectors (as columns).
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

const JACOBI_THRESHOLD: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 50;

/// Eigen-decomposition by cyclic Jacobi rotations.
///
/// Sweeps stop once the off-diagonal Frobenius norm drops below
/// `1e-13·‖m‖`. Each eigenvector is sign-normalized so that its first
/// nonzero component is positive.
pub fn eig_sym(m: &SymMatrix) -> Result<SymEigen> {
    let k = m.order();
    let mut a = m.to_rows();
    let mut v: Vec<Vec<f64>> = (0..k)
        .map(|i| (0..k).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let total = m.norm();
    let threshold = JACOBI_THRESHOLD * total.max(f64::MIN_POSITIVE);

    let off = |a: &Vec<Vec<f64>>| -> f64 {
        let mut s = 0.0;
        for i in 0..k {
            for j in i + 1..k {
                s += 2.0 * a[i][j] * a[i][j];
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    while off(&a) > threshold {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::Convergence(format!(
                "Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps"
            )));
        }
        sweeps += 1;
        for p in 0..k {
            for q in p + 1..k {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for r in 0..k {
                    let arp = a[r][p];
                    let arq = a[r][q];
                    a[r][p] = c * arp - s * arq;
                    a[r][q] = s * arp + c * arq;
                }
                for r in 0..k {
                    let apr = a[p][r];
                    let aqr = a[q][r];
                    a[p][r] = c * apr - s * aqr;
                    a[q][r] = s * apr + c * aqr;
                }
                for row in v.iter_mut() {
                    let vp = row[p];
                    let vq = row[q];
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }

    let mut pairs: Vec<(f64, Vec<f64>)> = (0..k)
        .map(|j| {
            let mut col: Vec<f64> = (0..k).map(|i| v[i][j]).collect();
            if let Some(first) = col.iter().find(|c| c.abs() > 1e-14).copied() {
                if first < 0.0 {
                    col.iter_mut().for_each(|c| *c = -*c);
                }
            }
            (a[j][j], col)
        })
        .collect();
    pairs.sort_by(|x, y| y.0.total_cmp(&x.0));
    let (values, vectors) = pairs.into_iter().unzip();
    Ok(SymEigen { values, vectors })
}

/// Eigenvalues only, descending.
pub fn eigenvalues(m: &SymMatrix) -> Result<Vec<f64>> {
    Ok(eig_sym(m)?.values)
}
