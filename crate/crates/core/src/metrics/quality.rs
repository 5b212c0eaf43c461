use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::geom::Point;

pub const DEFAULT_K_EVAL: usize = 20;

/// Trustworthiness and continuity of a layout at one neighborhood size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct QualityScores {
    pub trustworthiness: f64,
    pub continuity: f64,
    pub k_eval: usize,
}

/// 1-based rank of every other point seen from `i`, ordered by distance then
/// index. `rank[i]` is 0.
fn ranks_from(n: usize, i: usize, dist: impl Fn(usize) -> f64) -> Vec<usize> {
    let mut order: Vec<(f64, usize)> = (0..n).filter(|&j| j != i).map(|j| (dist(j), j)).collect();
    order.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut rank = vec![0; n];
    for (r, &(_, j)) in order.iter().enumerate() {
        rank[j] = r + 1;
    }
    rank
}

/// Largest attainable per-point penalty: the `k` intruders sit at the
/// farthest ranks, each contributing its excess over `k`.
fn max_penalty(n: usize, k: usize) -> u64 {
    let lo = (k + 1).max(n - k);
    (lo..n).map(|r| (r - k) as u64).sum()
}

/// Rank-penalty trustworthiness (layout neighbors missing from the data
/// neighborhood) and continuity (data neighbors missing from the layout
/// neighborhood).
pub fn trust_continuity(
    dataset: &Dataset,
    positions: &[Point],
    k_eval: usize,
) -> Result<QualityScores> {
    let n = dataset.len();
    if positions.len() != n {
        return Err(Error::Alignment {
            dataset: n,
            projection: positions.len(),
        });
    }
    if k_eval == 0 || k_eval >= n {
        return Err(Error::Parameter(format!(
            "k_eval = {k_eval} must lie in 1..={}",
            n - 1
        )));
    }
    let k = k_eval;
    let (trust, cont) = (0..n)
        .into_par_iter()
        .map(|i| {
            let high = ranks_from(n, i, |j| dataset.dist_sq(i, j));
            let low = ranks_from(n, i, |j| positions[i].dist_sq(positions[j]));
            let mut t = 0u64;
            let mut c = 0u64;
            for j in (0..n).filter(|&j| j != i) {
                if low[j] <= k && high[j] > k {
                    t += (high[j] - k) as u64;
                }
                if high[j] <= k && low[j] > k {
                    c += (low[j] - k) as u64;
                }
            }
            (t, c)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));

    let worst = n as u64 * max_penalty(n, k);
    let score = |penalty: u64| {
        if worst == 0 {
            1.0
        } else {
            1.0 - penalty as f64 / worst as f64
        }
    };
    Ok(QualityScores {
        trustworthiness: score(trust),
        continuity: score(cont),
        k_eval,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn max_penalty_matches_closed_form_below_half() {
        for (n, k) in [(10, 2), (100, 20), (7, 3)] {
            let closed = k * (2 * n - 3 * k - 1) / 2;
            assert_eq!(max_penalty(n, k), closed as u64, "n={n} k={k}");
        }
    }

    #[test]
    fn identity_layout_is_perfect() {
        let rows: Vec<Vec<f64>> = (0..40)
            .map(|i| vec![(i as f64 * 0.37).sin() * 3.0, (i as f64 * 0.91).cos()])
            .collect();
        let ds = Dataset::from_rows(rows, None).unwrap();
        let pos = ds.orthogonal_projection().positions;
        let q = trust_continuity(&ds, &pos, 5).unwrap();
        assert_eq!((q.trustworthiness, q.continuity), (1.0, 1.0));
    }

    #[test]
    fn reversed_line_is_penalized() {
        // data on a line, layout folds the line back on itself
        let rows: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64]).collect();
        let ds = Dataset::from_rows(rows, None).unwrap();
        let pos: Vec<Point> = (0..20)
            .map(|i| Point::new(((i * 7) % 20) as f64, 0.0))
            .collect();
        let q = trust_continuity(&ds, &pos, 3).unwrap();
        assert!(q.trustworthiness < 1.0 && q.trustworthiness >= 0.0);
        assert!(q.continuity < 1.0 && q.continuity >= 0.0);
    }

    #[test]
    fn rejects_bad_k() {
        let ds = Dataset::from_rows(vec![vec![0.0], vec![1.0], vec![2.0]], None).unwrap();
        let pos = ds.orthogonal_projection().positions;
        assert!(matches!(
            trust_continuity(&ds, &pos, 0),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            trust_continuity(&ds, &pos, 3),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            trust_continuity(&ds, &pos[..2], 1),
            Err(Error::Alignment { .. })
        ));
    }
}
