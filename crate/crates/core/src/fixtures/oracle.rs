//! Brute-force references. Each function follows its definition literally,
//! with its own distance and ranking code, and refuses inputs above
//! [`ORACLE_LIMIT`] points.

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::geom::Point;

pub const ORACLE_LIMIT: usize = 500;

fn check_size(n: usize) -> Result<()> {
    if n > ORACLE_LIMIT {
        return Err(Error::Size {
            n,
            limit: ORACLE_LIMIT,
        });
    }
    Ok(())
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..a.len() {
        s += (a[i] - b[i]) * (a[i] - b[i]);
    }
    s.sqrt()
}

/// Whether `(da, a)` precedes `(db, b)` in (distance, index) order.
fn before(da: f64, a: usize, db: f64, b: usize) -> bool {
    da < db || (da == db && a < b)
}

/// 1-based rank of `j` among the other points seen from `i`.
fn rank(dist: &dyn Fn(usize, usize) -> f64, n: usize, i: usize, j: usize) -> usize {
    let dj = dist(i, j);
    1 + (0..n)
        .filter(|&l| l != i && l != j && before(dist(i, l), l, dj, j))
        .count()
}

/// The `k` nearest neighbors of `i`, nearest first.
pub fn oracle_neighbors(dataset: &Dataset, k: usize, i: usize) -> Result<Vec<usize>> {
    let n = dataset.len();
    check_size(n)?;
    if k == 0 || k >= n {
        return Err(Error::Parameter(format!("k = {k} out of range")));
    }
    let dist = |a: usize, b: usize| euclid(dataset.row(a), dataset.row(b));
    let mut out = vec![usize::MAX; k];
    for j in (0..n).filter(|&j| j != i) {
        let r = rank(&dist, n, i, j);
        if r <= k {
            out[r - 1] = j;
        }
    }
    Ok(out)
}

/// Raw SNN similarity: the sum of `(k+1-m)(k+1-n)` over every pair of
/// 1-based ranks `(m, n)` holding the same neighbor in both lists.
pub fn oracle_snn(dataset: &Dataset, k: usize, p: usize, q: usize) -> Result<u64> {
    let np = oracle_neighbors(dataset, k, p)?;
    let nq = oracle_neighbors(dataset, k, q)?;
    let mut total = 0u64;
    for m in 1..=k {
        for nn in 1..=k {
            if np[m - 1] == nq[nn - 1] {
                total += ((k + 1 - m) * (k + 1 - nn)) as u64;
            }
        }
    }
    Ok(total)
}

/// Full raw similarity matrix with a zero diagonal.
pub fn oracle_snn_matrix(dataset: &Dataset, k: usize) -> Result<Vec<Vec<u64>>> {
    let n = dataset.len();
    check_size(n)?;
    let lists: Vec<Vec<usize>> = (0..n)
        .map(|i| oracle_neighbors(dataset, k, i))
        .collect::<Result<_>>()?;
    let mut sim = vec![vec![0u64; n]; n];
    for p in 0..n {
        for q in 0..n {
            if p == q {
                continue;
            }
            for m in 1..=k {
                for nn in 1..=k {
                    if lists[p][m - 1] == lists[q][nn - 1] {
                        sim[p][q] += ((k + 1 - m) * (k + 1 - nn)) as u64;
                    }
                }
            }
        }
    }
    Ok(sim)
}

/// Closeness of `p` to `cluster` straight from the definition: members get
/// 1; otherwise the mean normalized similarity over the members strictly
/// above `theta_in`, divided by the mean over all positively similar points,
/// capped at 1. Means are compared as exact fractions of raw scores.
pub fn oracle_closeness(
    dataset: &Dataset,
    k: usize,
    theta_in: f64,
    p: usize,
    cluster: &[usize],
) -> Result<f64> {
    let n = dataset.len();
    check_size(n)?;
    if cluster.contains(&p) {
        return Ok(1.0);
    }
    let sim_max = (k * (k + 1) * (2 * k + 1) / 6) as u64;
    let (mut cut_sum, mut cut_count) = (0u128, 0u128);
    let (mut all_sum, mut all_count) = (0u128, 0u128);
    for q in 0..n {
        if q == p {
            continue;
        }
        let s = oracle_snn(dataset, k, p, q)?;
        if s > 0 {
            all_sum += s as u128;
            all_count += 1;
        }
        if cluster.contains(&q) && s as f64 / sim_max as f64 > theta_in {
            cut_sum += s as u128;
            cut_count += 1;
        }
    }
    if cut_count == 0 {
        return Ok(0.0);
    }
    let num = cut_sum * all_count;
    let den = all_sum * cut_count;
    Ok(if num >= den {
        1.0
    } else {
        num as f64 / den as f64
    })
}

/// Trustworthiness and continuity by explicit rank counting, normalized by
/// the worst penalty found by enumerating every rank.
pub fn oracle_ranks(dataset: &Dataset, positions: &[Point], k: usize) -> Result<(f64, f64)> {
    let n = dataset.len();
    check_size(n)?;
    if positions.len() != n || k == 0 || k >= n {
        return Err(Error::Parameter("bad oracle input".into()));
    }
    let high = |a: usize, b: usize| euclid(dataset.row(a), dataset.row(b));
    let low = |a: usize, b: usize| {
        let (pa, pb) = (positions[a], positions[b]);
        ((pa.x - pb.x) * (pa.x - pb.x) + (pa.y - pb.y) * (pa.y - pb.y)).sqrt()
    };
    let (mut t, mut c) = (0usize, 0usize);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let rh = rank(&high, n, i, j);
            let rl = rank(&low, n, i, j);
            if rl <= k && rh > k {
                t += rh - k;
            }
            if rh <= k && rl > k {
                c += rl - k;
            }
        }
    }
    let mut excess: Vec<usize> = (1..n).map(|r| r.saturating_sub(k)).collect();
    excess.sort_unstable_by(|a, b| b.cmp(a));
    let worst: usize = n * excess[..k].iter().sum::<usize>();
    if worst == 0 {
        return Ok((1.0, 1.0));
    }
    Ok((1.0 - t as f64 / worst as f64, 1.0 - c as f64 / worst as f64))
}
