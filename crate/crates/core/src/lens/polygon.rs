//! Convex polygon helpers. Polygons are vertex lists without a repeated
//! closing vertex; convex ones are counterclockwise.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::geom::Point;

/// Signed area, positive for counterclockwise loops.
pub fn area(poly: &[Point]) -> f64 {
    let n = poly.len();
    (0..n)
        .map(|i| poly[i].cross(poly[(i + 1) % n]))
        .sum::<f64>()
        / 2.0
}

/// Area centroid; falls back to the vertex mean for zero-area input.
pub fn centroid(poly: &[Point]) -> Point {
    let n = poly.len();
    let a = area(poly);
    if a.abs() < f64::EPSILON * diameter(poly).powi(2) || n < 3 {
        let sum = poly.iter().fold(Point::default(), |s, &p| s + p);
        return sum * (1.0 / n.max(1) as f64);
    }
    let mut c = Point::default();
    for i in 0..n {
        let (p, q) = (poly[i], poly[(i + 1) % n]);
        c = c + (p + q) * p.cross(q);
    }
    c * (1.0 / (6.0 * a))
}

/// Largest vertex-to-vertex distance.
pub fn diameter(poly: &[Point]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, &p) in poly.iter().enumerate() {
        for &q in &poly[i + 1..] {
            d = d.max(p.dist(q));
        }
    }
    d
}

/// Outward unit normal of edge `i -> i+1` of a counterclockwise polygon.
pub fn edge_normal(poly: &[Point], i: usize) -> Point {
    let e = poly[(i + 1) % poly.len()] - poly[i];
    Point::new(e.y, -e.x).normalized().unwrap_or_default()
}

/// Distance from `p` to the nearest edge line of a convex counterclockwise
/// polygon: positive inside, zero on the boundary, negative outside.
pub fn signed_margin(poly: &[Point], p: Point) -> f64 {
    (0..poly.len())
        .map(|i| (poly[i] - p).dot(edge_normal(poly, i)))
        .fold(f64::INFINITY, f64::min)
}

/// Whether `p` lies in the closed convex polygon.
pub fn contains(poly: &[Point], p: Point) -> bool {
    signed_margin(poly, p) >= 0.0
}

/// Whether the loop is convex, counterclockwise, simple and free of
/// collinear vertices.
pub fn is_convex(poly: &[Point]) -> bool {
    let n = poly.len();
    if n < 3 {
        return false;
    }
    let mut turning = 0.0;
    for i in 0..n {
        let e0 = poly[(i + 1) % n] - poly[i];
        let e1 = poly[(i + 2) % n] - poly[(i + 1) % n];
        if e0.cross(e1) <= 0.0 {
            return false;
        }
        turning += e0.cross(e1).atan2(e0.dot(e1));
    }
    // a convex loop winds exactly once
    (turning - std::f64::consts::TAU).abs() < 1e-6
}

/// Point-in-polygon by ray casting; works for non-convex simple loops.
pub fn winding_contains(poly: &[Point], p: Point) -> bool {
    let n = poly.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (poly[i], poly[j]);
        if (a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x {
            inside = !inside;
        }
        j = i;
    }
    inside
}

/// Distance along `dir` from `origin` (inside the convex polygon) to its
/// boundary.
pub fn ray_exit(poly: &[Point], origin: Point, dir: Point) -> f64 {
    (0..poly.len())
        .filter_map(|i| {
            let nrm = edge_normal(poly, i);
            let along = dir.dot(nrm);
            (along > 0.0).then(|| ((poly[i] - origin).dot(nrm)).max(0.0) / along)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Andrew's monotone chain. Counterclockwise, starting from the lowest-x
/// (then lowest-y) point, without collinear vertices.
pub fn convex_hull(points: &[Point]) -> Result<Vec<Point>> {
    if points.len() < 3 {
        return Err(Error::Degenerate(format!(
            "hull of {} points",
            points.len()
        )));
    }
    let mut pts: Vec<Point> = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();

    let turn = |o: Point, a: Point, b: Point| (a - o).cross(b - o);
    let mut lower: Vec<Point> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && turn(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Point> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && turn(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() < 3 {
        return Err(Error::Degenerate("all points collinear".into()));
    }
    Ok(lower)
}

/// Regular polygon with `sides` vertices, counterclockwise from angle 0.
pub fn regular_polygon(center: Point, radius: f64, sides: usize) -> Vec<Point> {
    (0..sides)
        .map(|i| {
            center + Point::from_angle(std::f64::consts::TAU * i as f64 / sides as f64) * radius
        })
        .collect()
}

pub(crate) fn cmp_area(a: &[Point], b: &[Point]) -> Ordering {
    area(a).abs().total_cmp(&area(b).abs())
}
