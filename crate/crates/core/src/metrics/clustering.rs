use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Denominator used by the adjusted mutual information.
pub const AMI_NORMALIZATION: &str = "max";

/// Agreement between brushed labels and ground truth, over brushed points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ClusteringScores {
    pub ami: f64,
    pub arand: f64,
    pub vmeasure: f64,
    /// Silhouette of the predicted labels, when the caller has the data.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub silhouette: Option<f64>,
    /// Fraction of points left unbrushed (label -1) and excluded above.
    pub unassigned_fraction: f64,
    pub ami_normalization: String,
}

/// Contingency table between two labelings over the same points.
struct Table {
    n: usize,
    /// Row sums (first labeling), column sums (second labeling), nonzero cells.
    rows: Vec<usize>,
    cols: Vec<usize>,
    cells: Vec<(usize, usize, usize)>,
}

impl Table {
    fn new(a: &[i64], b: &[i64]) -> Table {
        let ids = |v: &[i64]| {
            let mut m = BTreeMap::new();
            for &x in v {
                let next = m.len();
                m.entry(x).or_insert(next);
            }
            m
        };
        let (ia, ib) = (ids(a), ids(b));
        let mut rows = vec![0; ia.len()];
        let mut cols = vec![0; ib.len()];
        let mut cell: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for (x, y) in a.iter().zip(b) {
            let (r, c) = (ia[x], ib[y]);
            rows[r] += 1;
            cols[c] += 1;
            *cell.entry((r, c)).or_default() += 1;
        }
        let cells = cell.into_iter().map(|((r, c), v)| (r, c, v)).collect();
        Table {
            n: a.len(),
            rows,
            cols,
            cells,
        }
    }

    /// Every cluster of one side maps to exactly one cluster of the other.
    fn is_bijective(&self) -> bool {
        self.cells.len() == self.rows.len() && self.rows.len() == self.cols.len()
    }

    fn mutual_info(&self) -> f64 {
        let n = self.n as f64;
        self.cells
            .iter()
            .map(|&(r, c, v)| {
                let v = v as f64;
                v / n * (n * v / (self.rows[r] as f64 * self.cols[c] as f64)).ln()
            })
            .sum()
    }

    fn conditional_entropy_rows_given_cols(&self) -> f64 {
        let n = self.n as f64;
        self.cells
            .iter()
            .map(|&(_, c, v)| {
                let v = v as f64;
                -v / n * (v / self.cols[c] as f64).ln()
            })
            .sum()
    }

    fn conditional_entropy_cols_given_rows(&self) -> f64 {
        let n = self.n as f64;
        self.cells
            .iter()
            .map(|&(r, _, v)| {
                let v = v as f64;
                -v / n * (v / self.rows[r] as f64).ln()
            })
            .sum()
    }
}

fn entropy(counts: &[usize]) -> f64 {
    let n: usize = counts.iter().sum();
    let n = n as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// `ln(i!)` for `i` in `0..=n`.
fn log_factorials(n: usize) -> Vec<f64> {
    let mut t = vec![0.0; n + 1];
    for i in 1..=n {
        t[i] = t[i - 1] + (i as f64).ln();
    }
    t
}

/// Mutual information expected under the hypergeometric model of random
/// labelings with the same marginals.
fn expected_mutual_info(table: &Table) -> f64 {
    let n = table.n;
    let lf = log_factorials(n);
    let nf = n as f64;
    let mut emi = 0.0;
    for &a in &table.rows {
        for &b in &table.cols {
            let lo = (a + b).saturating_sub(n).max(1);
            let hi = a.min(b);
            for nij in lo..=hi {
                let v = nij as f64;
                let term = v / nf * (nf * v / (a as f64 * b as f64)).ln();
                let log_p = lf[a] + lf[b] + lf[n - a] + lf[n - b]
                    - lf[n]
                    - lf[nij]
                    - lf[a - nij]
                    - lf[b - nij]
                    - lf[n + nij - a - b];
                emi += term * log_p.exp();
            }
        }
    }
    emi
}

/// Adjusted mutual information with the `max(H(U), H(V))` denominator.
pub fn adjusted_mutual_info(a: &[i64], b: &[i64]) -> f64 {
    let t = Table::new(a, b);
    if t.is_bijective() {
        return 1.0;
    }
    let mi = t.mutual_info();
    let emi = expected_mutual_info(&t);
    let norm = entropy(&t.rows).max(entropy(&t.cols));
    let mut denom = norm - emi;
    if denom.abs() < f64::EPSILON {
        denom = f64::EPSILON.copysign(denom);
    }
    (mi - emi) / denom
}

fn pairs(x: usize) -> f64 {
    let x = x as f64;
    x * (x - 1.0) / 2.0
}

/// Adjusted Rand index.
pub fn adjusted_rand(a: &[i64], b: &[i64]) -> f64 {
    let t = Table::new(a, b);
    if t.is_bijective() {
        return 1.0;
    }
    let index: f64 = t.cells.iter().map(|&(_, _, v)| pairs(v)).sum();
    let sum_a: f64 = t.rows.iter().map(|&v| pairs(v)).sum();
    let sum_b: f64 = t.cols.iter().map(|&v| pairs(v)).sum();
    let expected = sum_a * sum_b / pairs(t.n);
    let max_index = (sum_a + sum_b) / 2.0;
    if max_index == expected {
        return 0.0;
    }
    (index - expected) / (max_index - expected)
}

/// V-measure with equal weight on homogeneity and completeness; `truth` is
/// the class labeling, `pred` the cluster labeling.
pub fn v_measure(pred: &[i64], truth: &[i64]) -> f64 {
    let t = Table::new(truth, pred);
    let (h_class, h_cluster) = (entropy(&t.rows), entropy(&t.cols));
    let homogeneity = if h_class == 0.0 {
        1.0
    } else {
        1.0 - t.conditional_entropy_rows_given_cols() / h_class
    };
    let completeness = if h_cluster == 0.0 {
        1.0
    } else {
        1.0 - t.conditional_entropy_cols_given_rows() / h_cluster
    };
    if homogeneity + completeness == 0.0 {
        0.0
    } else {
        2.0 * homogeneity * completeness / (homogeneity + completeness)
    }
}

/// Scores of `predicted` against `truth` over the points with a predicted
/// label other than -1. With no such point every score is 0.
pub fn clustering_scores(predicted: &[i64], truth: &[i64]) -> Result<ClusteringScores> {
    if predicted.len() != truth.len() {
        return Err(Error::Validation(format!(
            "{} predicted labels for {} truth labels",
            predicted.len(),
            truth.len()
        )));
    }
    let mut classes = truth.to_vec();
    classes.sort_unstable();
    classes.dedup();
    if classes.len() < 2 {
        return Err(Error::Validation("truth needs at least two classes".into()));
    }
    let (p, t): (Vec<i64>, Vec<i64>) = predicted
        .iter()
        .zip(truth)
        .filter(|(&p, _)| p != -1)
        .map(|(&p, &t)| (p, t))
        .unzip();
    let unassigned_fraction = 1.0 - p.len() as f64 / predicted.len() as f64;
    let (ami, arand, vmeasure) = if p.is_empty() {
        (0.0, 0.0, 0.0)
    } else {
        (
            adjusted_mutual_info(&p, &t),
            adjusted_rand(&p, &t),
            v_measure(&p, &t),
        )
    };
    Ok(ClusteringScores {
        ami,
        arand,
        vmeasure,
        silhouette: None,
        unassigned_fraction,
        ami_normalization: AMI_NORMALIZATION.into(),
    })
}
