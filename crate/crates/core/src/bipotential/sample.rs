use crate::error::{Error, Result};
use crate::point::{Point, Space};

/// Coordinate tolerance under which two pairs are the same pair.
pub const TOL_PAIR: f64 = 1e-12;

/// A finite sample of a graph `{(x, y) : y ∈ T(x)}`, free of duplicates.
/// Pairs may carry a branch label.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphSample {
    primal: Space,
    dual: Space,
    pairs: Vec<(Point, Point)>,
    labels: Vec<Option<String>>,
    provenance: String,
}

impl GraphSample {
    pub fn new(primal: Space, dual: Space, provenance: impl Into<String>) -> Self {
        GraphSample {
            primal,
            dual,
            pairs: Vec::new(),
            labels: Vec::new(),
            provenance: provenance.into(),
        }
    }

    /// Build from raw pairs; duplicates are dropped.
    pub fn from_pairs(primal: Space, dual: Space, provenance: &str, pairs: Vec<(Vec<f64>, Vec<f64>)>) -> Result<Self> {
        let mut s = GraphSample::new(primal, dual, provenance);
        for (x, y) in pairs {
            s.push(Point::new(primal, x)?, Point::new(dual, y)?)?;
        }
        Ok(s)
    }

    /// Pairs on the line.
    pub fn scalar_pairs(provenance: &str, pairs: &[(f64, f64)]) -> Self {
        let mut s = GraphSample::new(Space::Euclidean(1), Space::Euclidean(1), provenance);
        for &(x, y) in pairs {
            s.push(Point::scalar(x), Point::scalar(y)).expect("scalar pair");
        }
        s
    }

    pub fn primal_space(&self) -> Space {
        self.primal
    }

    pub fn dual_space(&self) -> Space {
        self.dual
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(Point, Point)] {
        &self.pairs
    }

    pub fn label(&self, i: usize) -> Option<&str> {
        self.labels[i].as_deref()
    }

    /// Index of a stored pair within [`TOL_PAIR`] of `(x, y)`.
    pub fn find(&self, x: &[f64], y: &[f64]) -> Option<usize> {
        self.pairs.iter().position(|(a, b)| close(a.coords(), x) && close(b.coords(), y))
    }

    pub fn contains(&self, x: &[f64], y: &[f64]) -> bool {
        self.find(x, y).is_some()
    }

    /// Insert a pair; returns `false` when it duplicates a stored pair.
    pub fn push(&mut self, x: Point, y: Point) -> Result<bool> {
        self.push_labeled(x, y, None)
    }

    pub fn push_labeled(&mut self, x: Point, y: Point, label: Option<&str>) -> Result<bool> {
        if !x.space().compatible(self.primal) || !y.space().compatible(self.dual) {
            return Err(Error::Dimension {
                expected: self.primal.dim() + self.dual.dim(),
                got: x.dim() + y.dim(),
            });
        }
        if self.contains(x.coords(), y.coords()) {
            return Ok(false);
        }
        self.pairs.push((x, y));
        self.labels.push(label.map(str::to_owned));
        Ok(true)
    }

    /// Union with another sample on the same spaces.
    pub fn extend(&mut self, other: &GraphSample) -> Result<()> {
        for (i, (x, y)) in other.pairs.iter().enumerate() {
            self.push_labeled(x.clone(), y.clone(), other.label(i))?;
        }
        Ok(())
    }

    /// Every `stride`-th pair, for searches with size limits.
    pub fn subsample(&self, stride: usize) -> GraphSample {
        let mut s = GraphSample::new(self.primal, self.dual, self.provenance.clone());
        for i in (0..self.len()).step_by(stride.max(1)) {
            s.pairs.push(self.pairs[i].clone());
            s.labels.push(self.labels[i].clone());
        }
        s
    }

    /// CSV with header `x_1,...,x_n,y_1,...,y_m`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let header: Vec<String> = (1..=self.primal.dim())
            .map(|i| format!("x_{i}"))
            .chain((1..=self.dual.dim()).map(|i| format!("y_{i}")))
            .collect();
        w.write_record(&header)?;
        for (x, y) in &self.pairs {
            let row: Vec<String> = x.coords().iter().chain(y.coords()).map(|v| format!("{v:?}")).collect();
            w.write_record(&row)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Parse the CSV layout of [`GraphSample::to_csv`]. The header fixes the
    /// dimensions; both slots are read as Euclidean unless spaces are given.
    pub fn from_csv(text: &str, spaces: Option<(Space, Space)>, provenance: &str) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
        let header = r.headers()?.clone();
        let nx = header.iter().filter(|h| h.starts_with("x_")).count();
        let ny = header.iter().filter(|h| h.starts_with("y_")).count();
        let expected: Vec<String> = (1..=nx)
            .map(|i| format!("x_{i}"))
            .chain((1..=ny).map(|i| format!("y_{i}")))
            .collect();
        if nx == 0 || ny == 0 || header.iter().ne(expected.iter().map(String::as_str)) {
            return Err(Error::Parse(format!(
                "graph CSV header must read x_1,...,x_n,y_1,...,y_m; got {:?}",
                header.iter().collect::<Vec<_>>()
            )));
        }
        let (primal, dual) = spaces.unwrap_or((Space::Euclidean(nx), Space::Euclidean(ny)));
        if primal.dim() != nx || dual.dim() != ny {
            return Err(Error::Dimension {
                expected: primal.dim() + dual.dim(),
                got: nx + ny,
            });
        }
        let mut s = GraphSample::new(primal, dual, provenance);
        for rec in r.records() {
            let rec = rec?;
            let vals = rec
                .iter()
                .map(|v| v.parse::<f64>().map_err(|e| Error::Parse(format!("{v:?}: {e}"))))
                .collect::<Result<Vec<f64>>>()?;
            s.push(Point::new(primal, vals[..nx].to_vec())?, Point::new(dual, vals[nx..].to_vec())?)?;
        }
        Ok(s)
    }
}

fn close(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(p, q)| (p - q).abs() <= TOL_PAIR)
}
