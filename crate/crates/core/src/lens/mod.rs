//! The two-boundary lens around a brush and the point relocation it drives.
//!
//! The inner boundary is the convex hull of one iso-contour of the brushed
//! points' 2D kernel density. The outer boundary offsets every inner corner
//! by the margin along the outward bisector of its exterior angle, so
//! corner-to-corner the annulus has exactly the margin width and along an
//! edge it narrows by the cosine of the half exterior angle.
//!
//! A point is relocated along a ray whose start lies where its radial line
//! (from the inner centroid) crosses the inner boundary and whose direction
//! interpolates, by angle, between the bisectors of the two corners that
//! enclose it. At a corner the ray is that corner's bisector and meets the
//! outer boundary at the offset corner.

mod contour;
mod kde;
mod plan;
pub mod polygon;

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

pub use contour::marching_squares;
pub use kde::{kde_grid, DensityGrid};
pub use plan::{build_plan, PlanClass, RelocationPlan, Trace};
pub use polygon::convex_hull;

use crate::data::bbox_diagonal;
use crate::error::{Error, Result};
use crate::geom::Point;

/// Vertex count of the fallback polygon used when a brush is too small to
/// contour.
pub const FALLBACK_SIDES: usize = 12;

/// Tunable constants of lens construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct LensConfig {
    /// Contour level as a fraction of the density grid maximum.
    pub alpha_fraction: f64,
    pub grid_resolution: usize,
    /// KDE bandwidth as a fraction of the brush bounding-box diagonal.
    pub bandwidth_factor: f64,
    /// Lower bound on the bandwidth as a fraction of the projection extent.
    pub bandwidth_floor: f64,
    /// Outer margin as a fraction of the inner polygon diameter.
    pub margin_fraction: f64,
}

impl Default for LensConfig {
    fn default() -> Self {
        LensConfig {
            alpha_fraction: 0.15,
            grid_resolution: 64,
            bandwidth_factor: 0.25,
            bandwidth_floor: 0.01,
            margin_fraction: 0.2,
        }
    }
}

impl LensConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha_fraction > 0.0 && self.alpha_fraction <= 1.0) {
            return Err(Error::Parameter(format!(
                "alpha fraction {} not in (0, 1]",
                self.alpha_fraction
            )));
        }
        if self.grid_resolution < DensityGrid::MIN_RESOLUTION {
            return Err(Error::Parameter(format!(
                "grid resolution {} below {}",
                self.grid_resolution,
                DensityGrid::MIN_RESOLUTION
            )));
        }
        for (name, v) in [
            ("bandwidth factor", self.bandwidth_factor),
            ("bandwidth floor", self.bandwidth_floor),
            ("margin fraction", self.margin_fraction),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Parameter(format!("{name} {v} must be positive")));
            }
        }
        Ok(())
    }

    /// KDE bandwidth for a brush, floored relative to the projection extent.
    pub fn bandwidth(&self, brush: &[Point], projection_extent: f64) -> f64 {
        (self.bandwidth_factor * bbox_diagonal(brush)).max(self.bandwidth_floor * projection_extent)
    }
}

/// Inner boundary and the brush points it leaves outside.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerBoundary {
    pub polygon: Vec<Point>,
    /// Indices into the input slice of points lying outside `polygon`.
    pub outliers: Vec<usize>,
}

/// Convex hull of the `alpha`-level density contour of `brush`.
///
/// With several contour loops, the one enclosing `anchor` is used, or the
/// largest if none does. Brushes of fewer than three points get a regular
/// polygon of radius `bandwidth` around their mean.
pub fn build_inner(
    brush: &[Point],
    alpha_fraction: f64,
    resolution: usize,
    bandwidth: f64,
    anchor: Option<Point>,
) -> Result<InnerBoundary> {
    if brush.is_empty() {
        return Err(Error::Parameter("inner boundary of an empty brush".into()));
    }
    if !(bandwidth > 0.0 && bandwidth.is_finite()) {
        return Err(Error::Parameter(format!(
            "bandwidth {bandwidth} must be positive"
        )));
    }
    let mean = brush.iter().fold(Point::default(), |s, &p| s + p) * (1.0 / brush.len() as f64);
    let fallback = || polygon::regular_polygon(mean, bandwidth, FALLBACK_SIDES);

    let polygon = if brush.len() < 3 {
        fallback()
    } else {
        let grid = kde_grid(brush, resolution, bandwidth)?;
        let loops = marching_squares(&grid, alpha_fraction * grid.max())?;
        let chosen = anchor
            .and_then(|a| loops.iter().find(|l| polygon::winding_contains(l, a)))
            .or_else(|| loops.iter().max_by(|a, b| polygon::cmp_area(a, b)))
            .expect("marching squares returns at least one loop");
        match convex_hull(chosen) {
            Ok(hull) if polygon::is_convex(&hull) => hull,
            _ => fallback(),
        }
    };
    let outliers = brush
        .iter()
        .enumerate()
        .filter(|(_, &p)| polygon::signed_margin(&polygon, p) < 0.0)
        .map(|(i, _)| i)
        .collect();
    Ok(InnerBoundary { polygon, outliers })
}

/// Offset every corner of `inner` by `margin` along its outward bisector.
/// Returns the outer polygon and the unit bisectors.
pub fn build_outer(inner: &[Point], margin: f64) -> Result<(Vec<Point>, Vec<Point>)> {
    if !(margin > 0.0 && margin.is_finite()) {
        return Err(Error::Parameter(format!(
            "margin {margin} must be positive"
        )));
    }
    if !polygon::is_convex(inner) {
        return Err(Error::Geometry(
            "inner boundary is not a convex counterclockwise polygon".into(),
        ));
    }
    let n = inner.len();
    let bisectors: Vec<Point> = (0..n)
        .map(|j| {
            let prev = polygon::edge_normal(inner, (j + n - 1) % n);
            let next = polygon::edge_normal(inner, j);
            (prev + next)
                .normalized()
                .expect("convex corners have a bisector")
        })
        .collect();
    let outer: Vec<Point> = inner
        .iter()
        .zip(&bisectors)
        .map(|(&v, &b)| v + b * margin)
        .collect();
    if !polygon::is_convex(&outer) {
        return Err(Error::Geometry(
            "offset corners produced a non-convex outer boundary".into(),
        ));
    }
    Ok((outer, bisectors))
}

/// Where and in which direction a point is relocated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RelocationRay {
    /// Unit relocation direction.
    pub direction: Point,
    /// Crossing of the point's radial line with the inner boundary.
    pub inner_hit: Point,
    /// Crossing of the relocation ray with the outer boundary.
    pub outer_hit: Point,
}

/// Inner and outer boundaries with the geometry needed for relocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lens {
    pub inner: Vec<Point>,
    pub outer: Vec<Point>,
    pub margin: f64,
    pub bisectors: Vec<Point>,
    pub centroid: Point,
    /// Inner polygon diameter.
    pub diameter: f64,
    /// Angles of the inner vertices about the centroid, relative to vertex 0,
    /// in `[0, 2pi)` and increasing.
    #[serde(skip)]
    corner_angles: Vec<f64>,
}

impl Lens {
    pub fn new(inner: Vec<Point>, margin: f64) -> Result<Lens> {
        let (outer, bisectors) = build_outer(&inner, margin)?;
        let centroid = polygon::centroid(&inner);
        if polygon::signed_margin(&inner, centroid) <= 0.0 {
            return Err(Error::Geometry(
                "centroid outside the inner boundary".into(),
            ));
        }
        let base = (inner[0] - centroid).angle();
        let corner_angles: Vec<f64> = inner
            .iter()
            .map(|&v| ((v - centroid).angle() - base).rem_euclid(TAU))
            .collect();
        if corner_angles.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Geometry(
                "inner corners are not angularly ordered".into(),
            ));
        }
        let diameter = polygon::diameter(&inner);
        Ok(Lens {
            inner,
            outer,
            margin,
            bisectors,
            centroid,
            diameter,
            corner_angles,
        })
    }

    /// Build a lens around brushed positions with the configured constants.
    /// `min_margin` bounds the margin from below (the painter radius).
    pub fn around(
        brush: &[Point],
        anchor: Option<Point>,
        projection_extent: f64,
        min_margin: f64,
        config: &LensConfig,
    ) -> Result<(Lens, Vec<usize>)> {
        let mut bandwidth = config.bandwidth(brush, projection_extent);
        if bandwidth <= 0.0 {
            bandwidth = min_margin;
        }
        let inner = build_inner(
            brush,
            config.alpha_fraction,
            config.grid_resolution,
            bandwidth,
            anchor,
        )?;
        let margin = (config.margin_fraction * polygon::diameter(&inner.polygon)).max(min_margin);
        Ok((Lens::new(inner.polygon, margin)?, inner.outliers))
    }

    pub fn len(&self) -> usize {
        self.inner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inner.is_empty()
    }

    fn ensure_angles(&self) -> std::borrow::Cow<'_, [f64]> {
        if self.corner_angles.len() == self.inner.len() {
            return std::borrow::Cow::Borrowed(&self.corner_angles);
        }
        // deserialized lenses do not carry the cached angles
        let base = (self.inner[0] - self.centroid).angle();
        std::borrow::Cow::Owned(
            self.inner
                .iter()
                .map(|&v| ((v - self.centroid).angle() - base).rem_euclid(TAU))
                .collect(),
        )
    }

    /// Relocation ray for the radial line at angle `theta` about the centroid.
    pub fn ray_at_angle(&self, theta: f64) -> RelocationRay {
        let angles = self.ensure_angles();
        let n = self.inner.len();
        let base = (self.inner[0] - self.centroid).angle();
        let rel = (theta - base).rem_euclid(TAU);
        // sector j spans corners j and j+1
        let j = angles.partition_point(|&a| a <= rel) - 1;
        let j1 = (j + 1) % n;
        let end = if j1 == 0 { TAU } else { angles[j1] };
        let span = end - angles[j];
        let t = ((rel - angles[j]) / span).clamp(0.0, 1.0);

        let b0 = self.bisectors[j].angle();
        let turn = (self.bisectors[j1].angle() - b0).rem_euclid(TAU);
        let direction = Point::from_angle(b0 + t * turn);

        let radial = Point::from_angle(theta);
        let inner_hit =
            self.centroid + radial * polygon::ray_exit(&self.inner, self.centroid, radial);
        let outer_hit =
            inner_hit + direction * polygon::ray_exit(&self.outer, inner_hit, direction);
        RelocationRay {
            direction,
            inner_hit,
            outer_hit,
        }
    }

    /// Relocation ray through `p`; a point at the centroid uses the +x radial.
    pub fn ray_toward(&self, p: Point) -> RelocationRay {
        let d = p - self.centroid;
        let theta = if d.x == 0.0 && d.y == 0.0 {
            0.0
        } else {
            d.angle()
        };
        self.ray_at_angle(theta)
    }

    /// Relocation ray through `p`.
    pub fn relocation_ray(&self, p: Point) -> Result<RelocationRay> {
        if p == self.centroid {
            return Err(Error::Degenerate(
                "point at the lens centroid has no radial line".into(),
            ));
        }
        Ok(self.ray_toward(p))
    }

    /// The same lens shifted by `delta`.
    pub fn translated(&self, delta: Point) -> Lens {
        let shift = |poly: &[Point]| poly.iter().map(|&v| v + delta).collect();
        Lens {
            inner: shift(&self.inner),
            outer: shift(&self.outer),
            centroid: self.centroid + delta,
            ..self.clone()
        }
    }

    pub fn inner_margin(&self, p: Point) -> f64 {
        polygon::signed_margin(&self.inner, p)
    }

    pub fn outer_margin(&self, p: Point) -> f64 {
        polygon::signed_margin(&self.outer, p)
    }
}
