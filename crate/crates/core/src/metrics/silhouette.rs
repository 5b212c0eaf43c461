use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::geom::Point;

/// Mean silhouette over `n` points under an arbitrary distance. Points alone
/// in their class score 0.
pub fn silhouette_with(labels: &[i64], dist: impl Fn(usize, usize) -> f64 + Sync) -> Result<f64> {
    let n = labels.len();
    let mut sizes: BTreeMap<i64, usize> = BTreeMap::new();
    for &l in labels {
        *sizes.entry(l).or_default() += 1;
    }
    if sizes.len() < 2 {
        return Err(Error::Validation(
            "silhouette needs at least two classes".into(),
        ));
    }
    let total: f64 = (0..n)
        .into_par_iter()
        .map(|i| {
            let own = labels[i];
            if sizes[&own] == 1 {
                return 0.0;
            }
            let mut sums: BTreeMap<i64, f64> = BTreeMap::new();
            for j in (0..n).filter(|&j| j != i) {
                *sums.entry(labels[j]).or_default() += dist(i, j);
            }
            let a = sums.get(&own).copied().unwrap_or(0.0) / (sizes[&own] - 1) as f64;
            let b = sums
                .iter()
                .filter(|(&l, _)| l != own)
                .map(|(l, &s)| s / sizes[l] as f64)
                .fold(f64::INFINITY, f64::min);
            let m = a.max(b);
            if m == 0.0 {
                0.0
            } else {
                (b - a) / m
            }
        })
        .collect::<Vec<f64>>()
        .iter()
        .sum();
    Ok(total / n as f64)
}

/// Silhouette of `labels` in the multidimensional space.
pub fn silhouette(dataset: &Dataset, labels: &[i64]) -> Result<f64> {
    if labels.len() != dataset.len() {
        return Err(Error::Validation(format!(
            "{} labels for {} points",
            labels.len(),
            dataset.len()
        )));
    }
    silhouette_with(labels, |i, j| dataset.dist_sq(i, j).sqrt())
}

/// Silhouette of `labels` in a 2D layout.
pub fn silhouette_positions(positions: &[Point], labels: &[i64]) -> Result<f64> {
    if labels.len() != positions.len() {
        return Err(Error::Validation(format!(
            "{} labels for {} points",
            labels.len(),
            positions.len()
        )));
    }
    silhouette_with(labels, |i, j| positions[i].dist(positions[j]))
}
