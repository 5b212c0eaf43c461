//! Painter coverage and seed selection.
//!
//! The seed set is anchored on the densest covered datum and keeps only the
//! covered data whose similarity to that anchor clears `theta_in`, so a
//! painter straddling two clusters in the layout still yields seeds from a
//! single multidimensional cluster.

use serde::{Deserialize, Serialize};

use crate::closeness::ClosenessParams;
use crate::error::{Error, Result};
use crate::geom::Point;
use crate::snn::SnnModel;

/// The disc that follows the pointer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Painter {
    pub center: Point,
    pub radius: f64,
}

impl Painter {
    pub fn new(center: Point, radius: f64) -> Result<Painter> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Parameter(format!(
                "painter radius {radius} must be positive"
            )));
        }
        Ok(Painter { center, radius })
    }

    pub fn covers(&self, p: Point) -> bool {
        p.dist_sq(self.center) <= self.radius * self.radius
    }
}

/// Indices whose live position lies in the painter disc (boundary included).
pub fn covered_points(live: &[Point], painter: &Painter) -> Vec<usize> {
    live.iter()
        .enumerate()
        .filter(|(_, &p)| painter.covers(p))
        .map(|(i, _)| i)
        .collect()
}

/// Densest datum among `covered`; ties go to the lowest index.
pub fn density_center(model: &SnnModel, covered: &[usize]) -> Option<usize> {
    let density = model.density();
    covered.iter().copied().fold(None, |best, i| match best {
        Some(b) if density[b] > density[i] || (density[b] == density[i] && b < i) => Some(b),
        _ => Some(i),
    })
}

/// Seed set: the density center plus the covered data similar enough to it.
/// Returned sorted ascending.
pub fn select_seeds(
    model: &SnnModel,
    params: &ClosenessParams,
    covered: &[usize],
) -> Result<Vec<usize>> {
    let center = density_center(model, covered).ok_or(Error::EmptyCover)?;
    let n = model.len();
    if let Some(&bad) = covered.iter().find(|&&i| i >= n) {
        return Err(Error::Index { index: bad, len: n });
    }
    let mut seeds: Vec<usize> = covered
        .iter()
        .copied()
        .filter(|&q| q != center && model.normalize(model.sim(center, q)) > params.theta_in)
        .chain(std::iter::once(center))
        .collect();
    seeds.sort_unstable();
    seeds.dedup();
    Ok(seeds)
}
