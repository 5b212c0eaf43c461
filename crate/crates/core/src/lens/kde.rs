use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Point;

/// Square sampling grid of a 2D density field.
///
/// Sample `(ix, iy)` sits at `origin + (ix, iy) * cell_size`; values are
/// stored row-major with `iy` as the row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityGrid {
    pub resolution: usize,
    pub origin: Point,
    pub cell_size: f64,
    pub values: Vec<f64>,
}

impl DensityGrid {
    pub const MIN_RESOLUTION: usize = 8;

    pub fn value(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.resolution + ix]
    }

    pub fn position(&self, ix: usize, iy: usize) -> Point {
        self.origin + Point::new(ix as f64, iy as f64) * self.cell_size
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Grid sample with the largest value; first in row-major order on ties.
    pub fn argmax(&self) -> (usize, usize) {
        let mut best = 0;
        for (i, &v) in self.values.iter().enumerate() {
            if v > self.values[best] {
                best = i;
            }
        }
        (best % self.resolution, best / self.resolution)
    }
}

/// Isotropic Gaussian KDE sampled on a `resolution x resolution` grid that
/// covers the bounding box of `points` padded by three bandwidths.
///
/// The kernel is left unnormalized (peak 1 per point); only level ratios
/// matter downstream.
pub fn kde_grid(points: &[Point], resolution: usize, bandwidth: f64) -> Result<DensityGrid> {
    if !(bandwidth > 0.0 && bandwidth.is_finite()) {
        return Err(Error::Parameter(format!(
            "bandwidth {bandwidth} must be positive"
        )));
    }
    if resolution < DensityGrid::MIN_RESOLUTION {
        return Err(Error::Parameter(format!(
            "grid resolution {resolution} below minimum {}",
            DensityGrid::MIN_RESOLUTION
        )));
    }
    if points.is_empty() {
        return Err(Error::Parameter("density of an empty point set".into()));
    }

    let (mut lo, mut hi) = (points[0], points[0]);
    for p in points {
        lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    let pad = 3.0 * bandwidth;
    let side = (hi.x - lo.x).max(hi.y - lo.y) + 2.0 * pad;
    let mid = (lo + hi) * 0.5;
    let origin = mid - Point::new(side, side) * 0.5;
    let cell_size = side / (resolution - 1) as f64;

    // exp(-(dx^2 + dy^2) / 2h^2) factors into an x part and a y part
    let inv = 1.0 / (2.0 * bandwidth * bandwidth);
    let mut values = vec![0.0; resolution * resolution];
    let mut fx = vec![0.0; resolution];
    let mut fy = vec![0.0; resolution];
    for p in points {
        for i in 0..resolution {
            let dx = origin.x + i as f64 * cell_size - p.x;
            let dy = origin.y + i as f64 * cell_size - p.y;
            fx[i] = (-dx * dx * inv).exp();
            fy[i] = (-dy * dy * inv).exp();
        }
        for (iy, &wy) in fy.iter().enumerate() {
            let row = &mut values[iy * resolution..(iy + 1) * resolution];
            for (v, &wx) in row.iter_mut().zip(&fx) {
                *v += wx * wy;
            }
        }
    }
    Ok(DensityGrid {
        resolution,
        origin,
        cell_size,
        values,
    })
}
