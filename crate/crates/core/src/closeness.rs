//! Closeness of a datum to a cluster and the neighbor classes derived from it.
//!
//! For a cutoff `theta_in` the cut `C(theta_in, p)` keeps the members of `C`
//! whose normalized similarity to `p` is strictly above the cutoff. The
//! closeness of `p` is the average similarity over that cut divided by the
//! average similarity of `p` over every positively similar point, clamped
//! to 1. A closeness of exactly 1 marks a true neighbor, exactly 0 a
//! non-neighbor, anything in between is uncertain.
//!
//! The ratio is evaluated on raw integer scores, so the clamp to 1 is exact
//! and does not depend on floating-point summation order.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::snn::SnnModel;

pub const DEFAULT_THETA_IN: f64 = 0.35;
pub const DEFAULT_THETA_OUT: f64 = 0.5;

/// Similarity cutoff and attraction threshold, both slider-controlled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ClosenessParams {
    pub theta_in: f64,
    pub theta_out: f64,
}

impl Default for ClosenessParams {
    fn default() -> Self {
        ClosenessParams {
            theta_in: DEFAULT_THETA_IN,
            theta_out: DEFAULT_THETA_OUT,
        }
    }
}

impl ClosenessParams {
    pub fn new(theta_in: f64, theta_out: f64) -> Result<Self> {
        let p = ClosenessParams {
            theta_in,
            theta_out,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.theta_in) {
            return Err(Error::Parameter(format!(
                "theta_in = {} not in [0, 1)",
                self.theta_in
            )));
        }
        if !(0.0..=1.0).contains(&self.theta_out) {
            return Err(Error::Parameter(format!(
                "theta_out = {} not in [0, 1]",
                self.theta_out
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NeighborClass {
    TrueNeighbor,
    Uncertain,
    NonNeighbor,
    Member,
}

impl NeighborClass {
    pub fn of(value: f64) -> NeighborClass {
        if value >= 1.0 {
            NeighborClass::TrueNeighbor
        } else if value <= 0.0 {
            NeighborClass::NonNeighbor
        } else {
            NeighborClass::Uncertain
        }
    }
}

/// Closeness of every point to one cluster.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosenessResult {
    pub values: Vec<f64>,
    pub classes: Vec<NeighborClass>,
}

impl ClosenessResult {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

struct Membership(Vec<bool>);

impl Membership {
    fn new(model: &SnnModel, cluster: &[usize]) -> Result<Membership> {
        if cluster.is_empty() {
            return Err(Error::Parameter("cluster is empty".into()));
        }
        let n = model.len();
        let mut mask = vec![false; n];
        for &q in cluster {
            *mask.get_mut(q).ok_or(Error::Index { index: q, len: n })? = true;
        }
        Ok(Membership(mask))
    }

    fn contains(&self, q: usize) -> bool {
        self.0[q]
    }
}

fn check_point(model: &SnnModel, p: usize) -> Result<()> {
    if p >= model.len() {
        return Err(Error::Index {
            index: p,
            len: model.len(),
        });
    }
    Ok(())
}

/// Raw-score sum and count over the cut; `p` itself never enters.
fn cut_stats(model: &SnnModel, theta_in: f64, p: usize, members: &Membership) -> (u64, u64) {
    model
        .row(p)
        .iter()
        .filter(|&&(q, s)| members.contains(q) && model.normalize(s) > theta_in)
        .fold((0, 0), |(sum, count), &(_, s)| (sum + s, count + 1))
}

fn closeness_from_stats(model: &SnnModel, p: usize, cut: (u64, u64)) -> f64 {
    let (cut_sum, cut_count) = cut;
    if cut_count == 0 {
        return 0.0;
    }
    let row = model.row(p);
    let all_sum: u64 = row.iter().map(|&(_, s)| s).sum();
    let all_count = row.len() as u64;
    // cut_sum / cut_count  vs  all_sum / all_count, cross-multiplied
    let num = cut_sum as u128 * all_count as u128;
    let den = all_sum as u128 * cut_count as u128;
    if num >= den {
        1.0
    } else {
        num as f64 / den as f64
    }
}

/// Members of `cluster` whose normalized similarity to `p` exceeds `theta_in`.
pub fn cluster_cut(
    model: &SnnModel,
    params: &ClosenessParams,
    p: usize,
    cluster: &[usize],
) -> Result<Vec<usize>> {
    check_point(model, p)?;
    let members = Membership::new(model, cluster)?;
    Ok(model
        .row(p)
        .iter()
        .filter(|&&(q, s)| members.contains(q) && model.normalize(s) > params.theta_in)
        .map(|&(q, _)| q)
        .collect())
}

/// Mean normalized similarity of `p` over the cut, or 0 when the cut is empty.
pub fn avg_similarity(
    model: &SnnModel,
    params: &ClosenessParams,
    p: usize,
    cluster: &[usize],
) -> Result<f64> {
    check_point(model, p)?;
    let members = Membership::new(model, cluster)?;
    let (sum, count) = cut_stats(model, params.theta_in, p, &members);
    Ok(if count == 0 {
        0.0
    } else {
        model.normalize(sum) / count as f64
    })
}

/// Closeness of `p` to `cluster`, in `[0, 1]`. Members have closeness 1.
pub fn closeness(
    model: &SnnModel,
    params: &ClosenessParams,
    p: usize,
    cluster: &[usize],
) -> Result<f64> {
    check_point(model, p)?;
    let members = Membership::new(model, cluster)?;
    if members.contains(p) {
        return Ok(1.0);
    }
    let cut = cut_stats(model, params.theta_in, p, &members);
    Ok(closeness_from_stats(model, p, cut))
}

/// Closeness and neighbor class of every point with respect to `cluster`.
pub fn classify(
    model: &SnnModel,
    params: &ClosenessParams,
    cluster: &[usize],
) -> Result<ClosenessResult> {
    let members = Membership::new(model, cluster)?;
    let n = model.len();
    let mut values = Vec::with_capacity(n);
    let mut classes = Vec::with_capacity(n);
    for p in 0..n {
        if members.contains(p) {
            values.push(1.0);
            classes.push(NeighborClass::Member);
        } else {
            let v = closeness_from_stats(model, p, cut_stats(model, params.theta_in, p, &members));
            values.push(v);
            classes.push(NeighborClass::of(v));
        }
    }
    Ok(ClosenessResult { values, classes })
}
