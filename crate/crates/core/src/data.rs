//! Dataset and projection ingestion, and the exact k-nearest-neighbor index.
//!
//! A [`Dataset`] is an `n x M` matrix of finite reals with optional integer
//! ground-truth labels. A [`Projection`] is the row-aligned `n x 2` layout the
//! user brushes. Both load from CSV (header row required) or JSON.

use std::cmp::Ordering;
use std::fs;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Point;

/// Column name that carries ground-truth labels in dataset CSV files.
pub const LABEL_COLUMN: &str = "label";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataFormat {
    Csv,
    Json,
}

impl DataFormat {
    /// Guess the format from a file extension; anything but `.json` is CSV.
    pub fn from_path(path: &Path) -> DataFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => DataFormat::Json,
            _ => DataFormat::Csv,
        }
    }
}

/// Multidimensional data, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    columns: Vec<String>,
    values: Vec<f64>,
    n: usize,
    dim: usize,
    labels: Option<Vec<i64>>,
}

#[derive(Serialize, Deserialize)]
struct DatasetJson {
    values: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<i64>>,
}

impl Dataset {
    /// Build a dataset from rows, validating shape and finiteness.
    pub fn from_rows(rows: Vec<Vec<f64>>, labels: Option<Vec<i64>>) -> Result<Dataset> {
        let dim = rows.first().map_or(0, Vec::len);
        let columns = (0..dim).map(|j| format!("f{j}")).collect();
        Self::from_parts(columns, rows, labels)
    }

    fn from_parts(
        columns: Vec<String>,
        rows: Vec<Vec<f64>>,
        labels: Option<Vec<i64>>,
    ) -> Result<Dataset> {
        let n = rows.len();
        if n < 2 {
            return Err(Error::Validation(format!(
                "need at least 2 points, got {n}"
            )));
        }
        let dim = rows[0].len();
        if dim == 0 {
            return Err(Error::Validation("dataset has no feature columns".into()));
        }
        let mut values = Vec::with_capacity(n * dim);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != dim {
                return Err(Error::Dimension(format!(
                    "row {i} has {} values, expected {dim}",
                    row.len()
                )));
            }
            if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                return Err(Error::Validation(format!(
                    "non-finite value at row {i}, column {j}"
                )));
            }
            values.extend(row);
        }
        if let Some(l) = &labels {
            if l.len() != n {
                return Err(Error::Validation(format!(
                    "{} labels for {n} points",
                    l.len()
                )));
            }
        }
        Ok(Dataset {
            columns,
            values,
            n,
            dim,
            labels,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.dim)
    }

    pub fn labels(&self) -> Option<&[i64]> {
        self.labels.as_deref()
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    /// Squared Euclidean distance between rows `i` and `j`.
    pub fn dist_sq(&self, i: usize, j: usize) -> f64 {
        sq_dist(self.row(i), self.row(j))
    }

    /// First two coordinates of every row; an orthogonal projection.
    pub fn orthogonal_projection(&self) -> Projection {
        let positions = self
            .rows()
            .map(|r| Point::new(r[0], r.get(1).copied().unwrap_or(0.0)))
            .collect();
        Projection { positions }
    }

    pub fn load(path: &Path, format: DataFormat) -> Result<Dataset> {
        let text = fs::read_to_string(path)?;
        match format {
            DataFormat::Csv => Self::parse_csv(&text),
            DataFormat::Json => Self::parse_json(&text),
        }
    }

    pub fn parse_json(text: &str) -> Result<Dataset> {
        let raw: DatasetJson = serde_json::from_str(text)?;
        Self::from_rows(raw.values, raw.labels)
    }

    pub fn parse_csv(text: &str) -> Result<Dataset> {
        let mut reader = csv::ReaderBuilder::new()
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let header: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
        let label_col = header.iter().position(|h| h == LABEL_COLUMN);
        let columns: Vec<String> = header
            .iter()
            .enumerate()
            .filter(|&(j, _)| Some(j) != label_col)
            .map(|(_, h)| h.clone())
            .collect();

        let mut rows = Vec::new();
        let mut labels = label_col.map(|_| Vec::new());
        for (i, record) in reader.records().enumerate() {
            let record = record?;
            if record.len() != header.len() {
                return Err(Error::Dimension(format!(
                    "row {i} has {} fields, header has {}",
                    record.len(),
                    header.len()
                )));
            }
            let mut row = Vec::with_capacity(columns.len());
            for (j, field) in record.iter().enumerate() {
                if Some(j) == label_col {
                    let label = field.parse::<i64>().map_err(|_| {
                        Error::Parse(format!("row {i}: label {field:?} is not an integer"))
                    })?;
                    labels.as_mut().expect("label column present").push(label);
                } else {
                    row.push(parse_number(field, i, j)?);
                }
            }
            rows.push(row);
        }
        Self::from_parts(columns, rows, labels)
    }

    /// Serialize as CSV; the label column, if any, comes last.
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        if self.labels.is_some() {
            out.push(',');
            out.push_str(LABEL_COLUMN);
        }
        out.push('\n');
        for (i, row) in self.rows().enumerate() {
            let fields: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            out.push_str(&fields.join(","));
            if let Some(l) = &self.labels {
                out.push(',');
                out.push_str(&l[i].to_string());
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let raw = DatasetJson {
            values: self.rows().map(<[f64]>::to_vec).collect(),
            labels: self.labels.clone(),
        };
        serde_json::to_string(&raw).expect("finite values serialize")
    }
}

fn parse_number(field: &str, row: usize, col: usize) -> Result<f64> {
    let v: f64 = field.parse().map_err(|_| {
        Error::Parse(format!(
            "row {row}, column {col}: {field:?} is not a number"
        ))
    })?;
    if !v.is_finite() {
        return Err(Error::Validation(format!(
            "non-finite value at row {row}, column {col}"
        )));
    }
    Ok(v)
}

pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Load a dataset, dispatching on `format`.
pub fn load_dataset(path: &Path, format: DataFormat) -> Result<Dataset> {
    Dataset::load(path, format)
}

/// A 2D layout aligned row-by-row with a [`Dataset`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Projection {
    pub positions: Vec<Point>,
}

impl Projection {
    pub fn new(positions: Vec<Point>) -> Result<Projection> {
        if let Some(i) = positions.iter().position(|p| !p.is_finite()) {
            return Err(Error::Validation(format!("non-finite position at row {i}")));
        }
        Ok(Projection { positions })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Diagonal of the axis-aligned bounding box.
    pub fn extent(&self) -> f64 {
        bbox_diagonal(&self.positions)
    }

    pub fn load(path: &Path) -> Result<Projection> {
        Self::parse_csv(&fs::read_to_string(path)?)
    }

    /// Parse `x,y` CSV. The header row is required; its names are not checked
    /// beyond there being exactly two columns.
    pub fn parse_csv(text: &str) -> Result<Projection> {
        let mut reader = csv::ReaderBuilder::new()
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let width = reader.headers()?.len();
        if width != 2 {
            return Err(Error::Dimension(format!(
                "projection needs 2 columns, got {width}"
            )));
        }
        let mut positions = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let record = record?;
            if record.len() != 2 {
                return Err(Error::Dimension(format!(
                    "row {i} has {} fields, expected 2",
                    record.len()
                )));
            }
            positions.push(Point::new(
                parse_number(&record[0], i, 0)?,
                parse_number(&record[1], i, 1)?,
            ));
        }
        Projection::new(positions)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y\n");
        for p in &self.positions {
            out.push_str(&format!("{},{}\n", p.x, p.y));
        }
        out
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut f = fs::File::create(path)?;
        f.write_all(self.to_csv().as_bytes())?;
        Ok(())
    }
}

pub(crate) fn bbox_diagonal(points: &[Point]) -> f64 {
    let Some(first) = points.first() else {
        return 0.0;
    };
    let (mut lo, mut hi) = (*first, *first);
    for p in points {
        lo.x = lo.x.min(p.x);
        lo.y = lo.y.min(p.y);
        hi.x = hi.x.max(p.x);
        hi.y = hi.y.max(p.y);
    }
    lo.dist(hi)
}

/// Exact k-nearest-neighbor lists in the multidimensional space.
///
/// Row `i` holds the `k` nearest other points of `i`, sorted by ascending
/// Euclidean distance with ties broken by ascending index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnIndex {
    k: usize,
    n: usize,
    neighbors: Vec<usize>,
}

impl KnnIndex {
    /// Wrap precomputed neighbor lists, checking the structural invariants
    /// (no self, no duplicates, indices in range). Distance order is not
    /// re-checked.
    pub fn from_lists(k: usize, lists: Vec<Vec<usize>>) -> Result<KnnIndex> {
        let n = lists.len();
        if k == 0 || k >= n {
            return Err(Error::Parameter(format!(
                "k = {k} must lie in 1..={}",
                n.saturating_sub(1)
            )));
        }
        let mut neighbors = Vec::with_capacity(n * k);
        for (i, row) in lists.into_iter().enumerate() {
            if row.len() != k {
                return Err(Error::Dimension(format!(
                    "row {i} has {} neighbors, expected {k}",
                    row.len()
                )));
            }
            let mut seen = row.clone();
            seen.sort_unstable();
            seen.dedup();
            if seen.len() != k || row.contains(&i) || row.iter().any(|&j| j >= n) {
                return Err(Error::Validation(format!(
                    "row {i} is not a valid neighbor list"
                )));
            }
            neighbors.extend(row);
        }
        Ok(KnnIndex { k, n, neighbors })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Neighbors of `i`, nearest first.
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i * self.k..(i + 1) * self.k]
    }
}

/// Build the exact kNN index by full pairwise distance evaluation.
pub fn build_knn(dataset: &Dataset, k: usize) -> Result<KnnIndex> {
    let n = dataset.len();
    if k == 0 || k >= n {
        return Err(Error::Parameter(format!(
            "k = {k} must lie in 1..={}",
            n - 1
        )));
    }
    let rows: Vec<Vec<usize>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut cand: Vec<(f64, usize)> = (0..n)
                .filter(|&j| j != i)
                .map(|j| (dataset.dist_sq(i, j), j))
                .collect();
            let by_dist = |a: &(f64, usize), b: &(f64, usize)| -> Ordering {
                a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
            };
            if k < cand.len() {
                cand.select_nth_unstable_by(k - 1, by_dist);
                cand.truncate(k);
            }
            cand.sort_unstable_by(by_dist);
            cand.into_iter().map(|(_, j)| j).collect()
        })
        .collect();
    Ok(KnnIndex {
        k,
        n,
        neighbors: rows.into_iter().flatten().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_without_labels() {
        let ds = Dataset::parse_csv("a,b\n1,2\n3,4\n5,6\n").unwrap();
        assert_eq!((ds.len(), ds.dim()), (3, 2));
        assert!(ds.labels().is_none());
        assert_eq!(ds.row(2), &[5.0, 6.0]);
    }

    #[test]
    fn csv_label_column_is_extracted() {
        let ds = Dataset::parse_csv("a,b,label,c,d\n1,2,0,3,4\n5,6,1,7,8\n").unwrap();
        assert_eq!(ds.dim(), 4);
        assert_eq!(ds.labels(), Some(&[0, 1][..]));
        assert_eq!(ds.row(1), &[5.0, 6.0, 7.0, 8.0]);
    }

    #[test]
    fn csv_nan_is_rejected() {
        let err = Dataset::parse_csv("a,b\n1,NaN\n3,4\n").unwrap_err();
        assert!(matches!(err, Error::Validation(_)), "{err}");
        let err = Dataset::parse_csv("a,b\n1,inf\n3,4\n").unwrap_err();
        assert!(matches!(err, Error::Validation(_)), "{err}");
    }

    #[test]
    fn csv_errors() {
        assert!(matches!(
            Dataset::parse_csv("a,b\n1,2\n3\n"),
            Err(Error::Dimension(_))
        ));
        assert!(matches!(
            Dataset::parse_csv("a,b\n1,x\n3,4\n"),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            Dataset::parse_csv("a,b\n1,2\n"),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn json_round_trip() {
        let ds =
            Dataset::parse_json(r#"{"values": [[0.1, 2.5], [3, 4]], "labels": [1, 2]}"#).unwrap();
        assert_eq!(Dataset::parse_json(&ds.to_json()).unwrap(), ds);
        assert!(matches!(
            Dataset::parse_json(r#"{"values": [[0.1], [3, 4]]}"#),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn projection_csv() {
        let p = Projection::parse_csv("x,y\n0,1\n2.5,-3\n").unwrap();
        assert_eq!(p.positions[1], Point::new(2.5, -3.0));
        assert_eq!(Projection::parse_csv(&p.to_csv()).unwrap(), p);
        assert!(Projection::parse_csv("x,y,z\n0,1,2\n").is_err());
    }

    #[test]
    fn knn_collinear() {
        let ds = Dataset::from_rows(vec![vec![0.0], vec![1.0], vec![10.0]], None).unwrap();
        let idx = build_knn(&ds, 1).unwrap();
        assert_eq!(idx.neighbors(0), &[1]);
        assert_eq!(idx.neighbors(1), &[0]);
        assert_eq!(idx.neighbors(2), &[1]);
    }

    #[test]
    fn knn_ties_break_by_index() {
        // 1 is equidistant from 0 and 2.
        let ds = Dataset::from_rows(vec![vec![0.0], vec![1.0], vec![2.0]], None).unwrap();
        let idx = build_knn(&ds, 2).unwrap();
        assert_eq!(idx.neighbors(1), &[0, 2]);
    }

    #[test]
    fn knn_full_neighborhood_is_permutation() {
        let rows = (0..7)
            .map(|i| vec![(i * i) as f64, (i % 3) as f64])
            .collect();
        let ds = Dataset::from_rows(rows, None).unwrap();
        let idx = build_knn(&ds, 6).unwrap();
        for i in 0..7 {
            let mut row = idx.neighbors(i).to_vec();
            row.sort_unstable();
            let expect: Vec<usize> = (0..7).filter(|&j| j != i).collect();
            assert_eq!(row, expect);
        }
    }

    #[test]
    fn knn_k_out_of_range() {
        let ds = Dataset::from_rows(vec![vec![0.0], vec![1.0], vec![2.0]], None).unwrap();
        assert!(matches!(build_knn(&ds, 0), Err(Error::Parameter(_))));
        assert!(matches!(build_knn(&ds, 3), Err(Error::Parameter(_))));
    }
}
