//! Metric spaces and locations.
//!
//! Two kinds of metric are supported: an explicit finite point table with a
//! symmetric distance matrix, and the Euclidean plane. Explicit matrices are
//! stored as a condensed upper triangle, either of plain values or, for
//! metrics with few distinct distances, of 16-bit codes into a value table.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerance::le_rel;

/// A point of the metric space: an index into an explicit point table, or a
/// coordinate pair in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Location {
    Point(usize),
    Coord(f64, f64),
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Point(i) => write!(f, "{i}"),
            Location::Coord(x, y) => write!(f, "({x}, {y})"),
        }
    }
}

/// Explicit finite metric over named points.
#[derive(Debug, Clone)]
pub struct ExplicitMetric {
    names: Vec<String>,
    tri: Storage,
}

#[derive(Debug, Clone)]
enum Storage {
    /// Row-major strict upper triangle.
    Values(Vec<f64>),
    /// Same layout as `Values`, holding indices into `values`.
    Palette { values: Vec<f64>, codes: Vec<u16> },
}

/// Borrowed view of the condensed storage for tight loops.
pub(crate) enum Access<'a> {
    Values(&'a [f64]),
    Palette(&'a [f64], &'a [u16]),
}

/// Equal when the point names and all distances agree, regardless of storage.
impl PartialEq for ExplicitMetric {
    fn eq(&self, other: &Self) -> bool {
        let n = self.len();
        self.names == other.names && (0..n).all(|i| (i + 1..n).all(|j| self.get(i, j) == other.get(i, j)))
    }
}

impl ExplicitMetric {
    /// Builds the metric from a full matrix, checking symmetry, zero diagonal,
    /// non-negativity and the triangle inequality.
    pub fn new(names: Vec<String>, dist: &[Vec<f64>]) -> Result<Self> {
        let n = names.len();
        if n == 0 {
            return Err(Error::InvalidMetric("explicit metric has no points".into()));
        }
        if dist.len() != n || dist.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidMetric(format!(
                "distance matrix must be {n}x{n} to match the point table"
            )));
        }
        for (i, row) in dist.iter().enumerate() {
            if row[i] != 0.0 {
                return Err(Error::InvalidMetric(format!("dist[{i}][{i}] = {} is not zero", row[i])));
            }
            for (j, &d) in row.iter().enumerate() {
                if !d.is_finite() || d < 0.0 {
                    return Err(Error::InvalidMetric(format!(
                        "dist[{i}][{j}] = {d} is not a non-negative finite number"
                    )));
                }
                if d != dist[j][i] {
                    return Err(Error::InvalidMetric(format!(
                        "matrix is not symmetric at ({i}, {j}): {d} vs {}",
                        dist[j][i]
                    )));
                }
            }
        }
        let metric = Self::from_fn(names, |i, j| dist[i][j]);
        metric.check_triangle_inequality()?;
        Ok(metric)
    }

    /// Builds the metric from a distance function over pairs `i < j` without
    /// validation. Callers guarantee the metric axioms.
    pub(crate) fn from_fn(names: Vec<String>, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let n = names.len();
        let mut tri = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                tri.push(f(i, j));
            }
        }
        Self {
            names,
            tri: Storage::Values(tri),
        }
    }

    /// Like [`from_fn`](Self::from_fn) for metrics with at most 65536
    /// distinct distances: `code(i, j)` for `i < j` indexes into `values`.
    /// `fill(i, codes)` appends the palette codes of `(i, j)` for `j > i`.
    pub(crate) fn from_palette(names: Vec<String>, values: Vec<f64>, mut fill: impl FnMut(usize, &mut Vec<u16>)) -> Self {
        assert!(values.len() <= 1 << 16, "palette holds at most 65536 values");
        let n = names.len();
        let mut codes = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            let before = codes.len();
            fill(i, &mut codes);
            debug_assert_eq!(codes.len() - before, n - i - 1);
        }
        Self {
            names,
            tri: Storage::Palette { values, codes },
        }
    }

    /// Offsets such that `off[i] + j` (wrapping) is the condensed index of
    /// `(i, j)` for `i < j`.
    pub(crate) fn row_offsets(&self) -> Vec<usize> {
        let n = self.len();
        (0..n).map(|i| (i * (2 * n - i - 1) / 2).wrapping_sub(i + 1)).collect()
    }

    pub(crate) fn storage(&self) -> Access<'_> {
        match &self.tri {
            Storage::Values(v) => Access::Values(v),
            Storage::Palette { values, codes } => Access::Palette(values, codes),
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Index of the point with the given name.
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        use std::cmp::Ordering;
        let n = self.names.len();
        let k = match i.cmp(&j) {
            Ordering::Equal => return 0.0,
            Ordering::Less => i * (2 * n - i - 1) / 2 + (j - i - 1),
            Ordering::Greater => j * (2 * n - j - 1) / 2 + (i - j - 1),
        };
        match &self.tri {
            Storage::Values(v) => v[k],
            Storage::Palette { values, codes } => values[codes[k] as usize],
        }
    }

    pub fn to_matrix(&self) -> Vec<Vec<f64>> {
        let n = self.len();
        (0..n).map(|i| (0..n).map(|j| self.get(i, j)).collect()).collect()
    }

    /// Checks `d(i,k) <= d(i,j) + d(j,k)` for all triples at relative tolerance.
    pub fn check_triangle_inequality(&self) -> Result<()> {
        let n = self.len();
        for i in 0..n {
            for k in i + 1..n {
                let direct = self.get(i, k);
                for j in 0..n {
                    let via = self.get(i, j) + self.get(j, k);
                    if !le_rel(direct, via) {
                        return Err(Error::TriangleInequality { i, j, k, direct, via });
                    }
                }
            }
        }
        Ok(())
    }
}

/// The metric space `(M, c)` of an instance.
#[derive(Debug, Clone, PartialEq)]
pub enum Metric {
    Explicit(ExplicitMetric),
    Euclidean2D,
}

impl Metric {
    /// Returns an error unless `loc` names a point of this metric.
    pub fn check_location(&self, loc: &Location) -> Result<()> {
        let ok = match (self, loc) {
            (Metric::Explicit(m), Location::Point(i)) => *i < m.len(),
            (Metric::Euclidean2D, Location::Coord(x, y)) => x.is_finite() && y.is_finite(),
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidLocation(loc.to_string()))
        }
    }

    /// Distance between two locations of this metric.
    pub fn distance(&self, a: &Location, b: &Location) -> Result<f64> {
        self.check_location(a)?;
        self.check_location(b)?;
        Ok(self.dist(a, b))
    }

    /// Distance without location checks; mismatched locations yield NaN.
    #[inline]
    pub(crate) fn dist(&self, a: &Location, b: &Location) -> f64 {
        match (self, a, b) {
            (Metric::Explicit(m), Location::Point(i), Location::Point(j)) if *i < m.len() && *j < m.len() => {
                m.get(*i, *j)
            }
            (Metric::Euclidean2D, Location::Coord(x1, y1), Location::Coord(x2, y2)) => (x1 - x2).hypot(y1 - y2),
            _ => f64::NAN,
        }
    }

    pub fn as_explicit(&self) -> Option<&ExplicitMetric> {
        match self {
            Metric::Explicit(m) => Some(m),
            Metric::Euclidean2D => None,
        }
    }

    /// Human-readable name of a location: the point name for explicit
    /// metrics, the coordinates otherwise.
    pub fn label(&self, loc: &Location) -> String {
        match (self, loc) {
            (Metric::Explicit(m), Location::Point(i)) if *i < m.len() => m.names[*i].clone(),
            _ => loc.to_string(),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub(crate) enum MetricJson {
    Explicit { points: Vec<String>, dist: Vec<Vec<f64>> },
    #[serde(rename = "euclidean2d")]
    Euclidean2D,
}

impl TryFrom<MetricJson> for Metric {
    type Error = Error;

    fn try_from(json: MetricJson) -> Result<Self> {
        match json {
            MetricJson::Explicit { points, dist } => Ok(Metric::Explicit(ExplicitMetric::new(points, &dist)?)),
            MetricJson::Euclidean2D => Ok(Metric::Euclidean2D),
        }
    }
}

impl From<&Metric> for MetricJson {
    fn from(metric: &Metric) -> Self {
        match metric {
            Metric::Explicit(m) => MetricJson::Explicit {
                points: m.names.clone(),
                dist: m.to_matrix(),
            },
            Metric::Euclidean2D => MetricJson::Euclidean2D,
        }
    }
}

/// Shortest-path closure of an undirected edge-weighted graph on `n` vertices
/// (Floyd-Warshall). Unreachable pairs are reported as an error.
pub fn shortest_path_closure(n: usize, edges: &[(usize, usize, f64)]) -> Result<Vec<Vec<f64>>> {
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for &(u, v, w) in edges {
        if u >= n || v >= n || !(w >= 0.0) {
            return Err(Error::InvalidParams(format!("bad edge ({u}, {v}, {w})")));
        }
        if w < d[u][v] {
            d[u][v] = w;
            d[v][u] = w;
        }
    }
    for k in 0..n {
        for i in 0..n {
            let dik = d[i][k];
            if dik.is_infinite() {
                continue;
            }
            for j in 0..n {
                let via = dik + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    if d.iter().flatten().any(|x| x.is_infinite()) {
        return Err(Error::InvalidParams("graph is not connected".into()));
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("v{i}")).collect()
    }

    #[test]
    fn explicit_lookup() {
        let m = Metric::Explicit(ExplicitMetric::new(names(2), &[vec![0.0, 5.0], vec![5.0, 0.0]]).unwrap());
        assert_eq!(m.distance(&Location::Point(0), &Location::Point(1)).unwrap(), 5.0);
        assert_eq!(m.distance(&Location::Point(1), &Location::Point(0)).unwrap(), 5.0);
        assert_eq!(m.distance(&Location::Point(1), &Location::Point(1)).unwrap(), 0.0);
    }

    #[test]
    fn euclidean_345() {
        let m = Metric::Euclidean2D;
        let d = m.distance(&Location::Coord(0.0, 0.0), &Location::Coord(3.0, 4.0)).unwrap();
        assert_eq!(d, 5.0);
        assert_eq!(m.distance(&Location::Coord(1.5, -2.0), &Location::Coord(1.5, -2.0)).unwrap(), 0.0);
    }

    #[test]
    fn out_of_range_and_mismatched_locations() {
        let m = Metric::Explicit(ExplicitMetric::new(names(2), &[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap());
        assert!(matches!(
            m.distance(&Location::Point(0), &Location::Point(2)),
            Err(Error::InvalidLocation(_))
        ));
        assert!(m.distance(&Location::Point(0), &Location::Coord(0.0, 0.0)).is_err());
        assert!(Metric::Euclidean2D
            .distance(&Location::Point(0), &Location::Coord(0.0, 0.0))
            .is_err());
        assert!(Metric::Euclidean2D
            .distance(&Location::Coord(f64::NAN, 0.0), &Location::Coord(0.0, 0.0))
            .is_err());
    }

    #[test]
    fn rejects_bad_matrices() {
        let asym = ExplicitMetric::new(names(2), &[vec![0.0, 1.0], vec![2.0, 0.0]]);
        assert!(matches!(asym, Err(Error::InvalidMetric(_))));
        let diag = ExplicitMetric::new(names(2), &[vec![1.0, 1.0], vec![1.0, 0.0]]);
        assert!(matches!(diag, Err(Error::InvalidMetric(_))));
        let neg = ExplicitMetric::new(names(2), &[vec![0.0, -1.0], vec![-1.0, 0.0]]);
        assert!(matches!(neg, Err(Error::InvalidMetric(_))));
        let shape = ExplicitMetric::new(names(3), &[vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert!(matches!(shape, Err(Error::InvalidMetric(_))));
        let tri = ExplicitMetric::new(
            names(3),
            &[vec![0.0, 1.0, 5.0], vec![1.0, 0.0, 1.0], vec![5.0, 1.0, 0.0]],
        );
        assert!(matches!(tri, Err(Error::TriangleInequality { .. })));
    }

    #[test]
    fn condensed_storage_matches_matrix() {
        let full: Vec<Vec<f64>> = (0..5)
            .map(|i| (0..5).map(|j| (i as f64 - j as f64).abs()).collect())
            .collect();
        let m = ExplicitMetric::new(names(5), &full).unwrap();
        assert_eq!(m.to_matrix(), full);
    }

    #[test]
    fn closure_of_path_graph() {
        let d = shortest_path_closure(3, &[(0, 1, 1.0), (1, 2, 2.0)]).unwrap();
        assert_eq!(d[0][2], 3.0);
        assert_eq!(d[2][0], 3.0);
        assert!(shortest_path_closure(3, &[(0, 1, 1.0)]).is_err());
    }

    #[test]
    fn json_shape() {
        let json = r#"{"type":"explicit","points":["a","b"],"dist":[[0.0,2.0],[2.0,0.0]]}"#;
        let parsed: MetricJson = serde_json::from_str(json).unwrap();
        let metric = Metric::try_from(parsed).unwrap();
        assert_eq!(serde_json::to_string(&MetricJson::from(&metric)).unwrap(), json);
        let e: MetricJson = serde_json::from_str(r#"{"type":"euclidean2d"}"#).unwrap();
        assert!(matches!(Metric::try_from(e).unwrap(), Metric::Euclidean2D));
    }
}
