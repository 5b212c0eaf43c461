//! Shared-nearest-neighbor similarity and the density derived from it.
//!
//! Two points are similar when their kNN lists share members, and more so
//! when the shared members sit at high ranks in both lists. For a shared
//! neighbor at 1-based rank `m` in `p`'s list and rank `n` in `q`'s list the
//! pair contributes `(k + 1 - m) * (k + 1 - n)`. The largest attainable score,
//! reached by identical lists, is `k(k+1)(2k+1)/6`.
//!
//! The density of a point is the sum of its similarities to every other point.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::KnnIndex;
use crate::error::{Error, Result};

/// Maximum raw SNN score for neighborhood size `k`.
pub fn sim_max(k: usize) -> u64 {
    let k = k as u64;
    k * (k + 1) * (2 * k + 1) / 6
}

/// Raw SNN similarity between `p` and `q` from their neighbor lists.
pub fn snn_similarity(index: &KnnIndex, p: usize, q: usize) -> Result<u64> {
    let n = index.len();
    for i in [p, q] {
        if i >= n {
            return Err(Error::Index { index: i, len: n });
        }
    }
    if p == q {
        return Err(Error::Parameter(
            "similarity of a point with itself is undefined".into(),
        ));
    }
    let k = index.k() as u64;
    let qn = index.neighbors(q);
    let mut total = 0;
    for (m, a) in index.neighbors(p).iter().enumerate() {
        if let Some(rank_q) = qn.iter().position(|b| b == a) {
            total += (k - m as u64) * (k - rank_q as u64);
        }
    }
    Ok(total)
}

/// Sparse symmetric SNN similarity matrix with per-point density.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnnModel {
    k: usize,
    sim_max: u64,
    /// Row `p` lists `(q, sim)` for every `q != p` with positive similarity,
    /// sorted by `q`.
    rows: Vec<Vec<(usize, u64)>>,
    density: Vec<f64>,
    density_norm: Vec<f64>,
}

impl SnnModel {
    pub fn build(index: &KnnIndex) -> SnnModel {
        let n = index.len();
        let k = index.k();

        // inverted[x] = every (p, rank) with x at 0-based `rank` in p's list
        let mut inverted: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for p in 0..n {
            for (rank, &x) in index.neighbors(p).iter().enumerate() {
                inverted[x].push((p, rank));
            }
        }

        let weight = |rank: usize| (k - rank) as u64;
        let rows: Vec<Vec<(usize, u64)>> = (0..n)
            .into_par_iter()
            .map_init(
                || (vec![0u64; n], Vec::new()),
                |(acc, touched), p| {
                    for (m, &x) in index.neighbors(p).iter().enumerate() {
                        for &(q, rank_q) in &inverted[x] {
                            if q == p {
                                continue;
                            }
                            if acc[q] == 0 {
                                touched.push(q);
                            }
                            acc[q] += weight(m) * weight(rank_q);
                        }
                    }
                    touched.sort_unstable();
                    let row = touched.iter().map(|&q| (q, acc[q])).collect();
                    for &q in touched.iter() {
                        acc[q] = 0;
                    }
                    touched.clear();
                    row
                },
            )
            .collect();

        let density: Vec<f64> = rows
            .iter()
            .map(|r| r.iter().map(|&(_, s)| s).sum::<u64>() as f64)
            .collect();
        let density_norm = min_max(&density);
        SnnModel {
            k,
            sim_max: sim_max(k),
            rows,
            density,
            density_norm,
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn sim_max(&self) -> u64 {
        self.sim_max
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Raw similarity; zero for pairs sharing no neighbor and for `p == q`.
    pub fn sim(&self, p: usize, q: usize) -> u64 {
        let row = &self.rows[p];
        row.binary_search_by_key(&q, |&(j, _)| j)
            .map_or(0, |i| row[i].1)
    }

    /// Positive-similarity entries of row `p`, sorted by column.
    pub fn row(&self, p: usize) -> &[(usize, u64)] {
        &self.rows[p]
    }

    /// Similarity scaled into `[0, 1]` by the maximum attainable score.
    pub fn normalized_sim(&self, p: usize, q: usize) -> Result<f64> {
        let n = self.len();
        for i in [p, q] {
            if i >= n {
                return Err(Error::Index { index: i, len: n });
            }
        }
        if p == q {
            return Err(Error::Parameter(
                "similarity of a point with itself is undefined".into(),
            ));
        }
        Ok(self.normalize(self.sim(p, q)))
    }

    pub(crate) fn normalize(&self, raw: u64) -> f64 {
        raw as f64 / self.sim_max as f64
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    /// Min-max normalized density; all-equal densities map to 1.
    pub fn density_norm(&self) -> &[f64] {
        &self.density_norm
    }
}

fn min_max(v: &[f64]) -> Vec<f64> {
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi > lo {
        v.iter().map(|x| (x - lo) / (hi - lo)).collect()
    } else {
        vec![1.0; v.len()]
    }
}

/// Build the full model from a kNN index.
pub fn build_snn_model(index: &KnnIndex) -> SnnModel {
    SnnModel::build(index)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{build_knn, Dataset};

    fn index(k: usize, lists: Vec<Vec<usize>>) -> KnnIndex {
        KnnIndex::from_lists(k, lists).unwrap()
    }

    #[test]
    fn sim_max_closed_form() {
        assert_eq!(sim_max(1), 1);
        assert_eq!(sim_max(3), 14);
        assert_eq!(sim_max(20), 2870);
    }

    #[test]
    fn shared_pairs_enumeration() {
        // p = 0 -> [a=2, b=3, c=4], q = 1 -> [b=3, a=2, d=5]
        // shared (m, n) = (1, 2) and (2, 1): 3*2 + 2*3 = 12
        let idx = index(
            3,
            vec![
                vec![2, 3, 4],
                vec![3, 2, 5],
                vec![0, 1, 3],
                vec![0, 1, 2],
                vec![0, 1, 2],
                vec![0, 1, 2],
            ],
        );
        assert_eq!(snn_similarity(&idx, 0, 1).unwrap(), 12);
        assert_eq!(snn_similarity(&idx, 1, 0).unwrap(), 12);
        let model = SnnModel::build(&idx);
        assert_eq!(model.sim(0, 1), 12);
        assert!((model.normalized_sim(0, 1).unwrap() - 12.0 / 14.0).abs() < 1e-15);
    }

    #[test]
    fn identical_and_disjoint_lists() {
        let idx = index(
            2,
            vec![
                vec![2, 3],
                vec![2, 3],
                vec![0, 1],
                vec![0, 1],
                vec![5, 6],
                vec![4, 6],
                vec![4, 5],
                vec![4, 5],
            ],
        );
        assert_eq!(snn_similarity(&idx, 0, 1).unwrap(), sim_max(2));
        assert_eq!(snn_similarity(&idx, 0, 5).unwrap(), 0);
        let model = SnnModel::build(&idx);
        assert_eq!(model.normalized_sim(0, 1).unwrap(), 1.0);
        assert_eq!(model.normalized_sim(0, 5).unwrap(), 0.0);
    }

    #[test]
    fn errors() {
        let idx = index(1, vec![vec![1], vec![0]]);
        assert!(matches!(
            snn_similarity(&idx, 0, 0),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            snn_similarity(&idx, 0, 2),
            Err(Error::Index { .. })
        ));
        let model = SnnModel::build(&idx);
        assert!(matches!(
            model.normalized_sim(1, 1),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn duplicated_pair_has_zero_similarity() {
        let ds = Dataset::from_rows(vec![vec![1.0, 1.0], vec![1.0, 1.0]], None).unwrap();
        let model = SnnModel::build(&build_knn(&ds, 1).unwrap());
        assert_eq!(model.sim(0, 1), 0);
        assert_eq!(model.density(), &[0.0, 0.0]);
        assert_eq!(model.density_norm(), &[1.0, 1.0]);
    }

    #[test]
    fn density_is_row_sum() {
        let rows = (0..30)
            .map(|i| vec![(i as f64 * 0.7).sin(), (i as f64 * 1.3).cos()])
            .collect();
        let ds = Dataset::from_rows(rows, None).unwrap();
        let model = SnnModel::build(&build_knn(&ds, 5).unwrap());
        for p in 0..30 {
            let sum: u64 = (0..30).filter(|&q| q != p).map(|q| model.sim(p, q)).sum();
            assert_eq!(model.density()[p], sum as f64);
        }
        assert!(model.density_norm().iter().all(|v| (0.0..=1.0).contains(v)));
    }
}
