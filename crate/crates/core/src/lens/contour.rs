//! Marching squares iso-contours on a [`DensityGrid`].
//!
//! The grid is treated as surrounded by a ring of zero samples, so every
//! contour at a positive level closes into a loop. Saddle cells are resolved
//! by the average of their four corners.

use std::collections::HashMap;

use super::kde::DensityGrid;
use crate::error::{Error, Result};
use crate::geom::Point;

#[derive(Clone, Copy)]
enum Side {
    Bottom,
    Right,
    Top,
    Left,
}

use Side::*;

/// Segment table indexed by corner mask (bl = 1, br = 2, tr = 4, tl = 8).
/// Saddles (5, 10) are listed for the "center outside" resolution.
const SEGMENTS: [&[(Side, Side)]; 16] = [
    &[],
    &[(Left, Bottom)],
    &[(Bottom, Right)],
    &[(Left, Right)],
    &[(Right, Top)],
    &[(Left, Bottom), (Right, Top)],
    &[(Bottom, Top)],
    &[(Left, Top)],
    &[(Left, Top)],
    &[(Bottom, Top)],
    &[(Bottom, Right), (Left, Top)],
    &[(Right, Top)],
    &[(Left, Right)],
    &[(Bottom, Right)],
    &[(Left, Bottom)],
    &[],
];

const SADDLE_5_CENTER_INSIDE: &[(Side, Side)] = &[(Bottom, Right), (Left, Top)];
const SADDLE_10_CENTER_INSIDE: &[(Side, Side)] = &[(Left, Bottom), (Right, Top)];

/// Zero-padded view of the grid: padded index `i` maps to grid index `i - 1`.
struct Padded<'a> {
    grid: &'a DensityGrid,
    w: usize,
}

impl Padded<'_> {
    fn value(&self, ix: usize, iy: usize) -> f64 {
        let g = self.grid.resolution;
        if ix == 0 || iy == 0 || ix > g || iy > g {
            0.0
        } else {
            self.grid.value(ix - 1, iy - 1)
        }
    }

    fn position(&self, ix: usize, iy: usize) -> Point {
        self.grid.origin + Point::new(ix as f64 - 1.0, iy as f64 - 1.0) * self.grid.cell_size
    }

    /// Unique id of a grid edge and the crossing point on it.
    fn crossing(&self, cx: usize, cy: usize, side: Side, level: f64) -> (usize, Point) {
        let (a, b, id) = match side {
            Bottom => ((cx, cy), (cx + 1, cy), 2 * (cy * self.w + cx)),
            Top => ((cx, cy + 1), (cx + 1, cy + 1), 2 * ((cy + 1) * self.w + cx)),
            Left => ((cx, cy), (cx, cy + 1), 2 * (cy * self.w + cx) + 1),
            Right => (
                (cx + 1, cy),
                (cx + 1, cy + 1),
                2 * (cy * self.w + cx + 1) + 1,
            ),
        };
        let (va, vb) = (self.value(a.0, a.1), self.value(b.0, b.1));
        let t = if vb == va {
            0.5
        } else {
            ((level - va) / (vb - va)).clamp(0.0, 1.0)
        };
        (id, self.position(a.0, a.1).lerp(self.position(b.0, b.1), t))
    }
}

/// Closed iso-contour loops of `grid` at `level`, in a deterministic order.
/// Loops do not repeat their first vertex.
pub fn marching_squares(grid: &DensityGrid, level: f64) -> Result<Vec<Vec<Point>>> {
    if !(level > 0.0 && level.is_finite()) {
        return Err(Error::Parameter(format!(
            "contour level {level} must be positive"
        )));
    }
    let max = grid.max();
    if level > max {
        return Err(Error::EmptyContour { level, max });
    }

    let w = grid.resolution + 2;
    let padded = Padded { grid, w };
    let inside = |ix: usize, iy: usize| padded.value(ix, iy) >= level;

    // (edge id, point) pairs, one per segment end
    let mut segments: Vec<[(usize, Point); 2]> = Vec::new();
    for cy in 0..w - 1 {
        for cx in 0..w - 1 {
            let mask = inside(cx, cy) as usize
                | (inside(cx + 1, cy) as usize) << 1
                | (inside(cx + 1, cy + 1) as usize) << 2
                | (inside(cx, cy + 1) as usize) << 3;
            let mut table = SEGMENTS[mask];
            if mask == 5 || mask == 10 {
                let center = (padded.value(cx, cy)
                    + padded.value(cx + 1, cy)
                    + padded.value(cx + 1, cy + 1)
                    + padded.value(cx, cy + 1))
                    / 4.0;
                if center >= level {
                    table = if mask == 5 {
                        SADDLE_5_CENTER_INSIDE
                    } else {
                        SADDLE_10_CENTER_INSIDE
                    };
                }
            }
            for &(s0, s1) in table {
                segments.push([
                    padded.crossing(cx, cy, s0, level),
                    padded.crossing(cx, cy, s1, level),
                ]);
            }
        }
    }
    if segments.is_empty() {
        return Err(Error::EmptyContour { level, max });
    }

    let mut by_edge: HashMap<usize, Vec<usize>> = HashMap::new();
    for (s, seg) in segments.iter().enumerate() {
        for end in seg {
            by_edge.entry(end.0).or_default().push(s);
        }
    }

    let mut used = vec![false; segments.len()];
    let mut loops = Vec::new();
    for start in 0..segments.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        let mut ring = vec![segments[start][0].1];
        let first_edge = segments[start][0].0;
        let mut edge = segments[start][1].0;
        let mut point = segments[start][1].1;
        while edge != first_edge {
            ring.push(point);
            let Some(&next) = by_edge[&edge].iter().find(|&&s| !used[s]) else {
                break;
            };
            used[next] = true;
            let [a, b] = segments[next];
            (edge, point) = if a.0 == edge { (b.0, b.1) } else { (a.0, a.1) };
        }
        if ring.len() >= 3 {
            loops.push(ring);
        }
    }
    if loops.is_empty() {
        return Err(Error::EmptyContour { level, max });
    }
    Ok(loops)
}

#[cfg(test)]
mod tests {
    use super::super::kde::kde_grid;
    use super::super::polygon;
    use super::*;

    #[test]
    fn zero_grid_has_no_contour() {
        let g = DensityGrid {
            resolution: 8,
            origin: Point::default(),
            cell_size: 1.0,
            values: vec![0.0; 64],
        };
        assert!(matches!(
            marching_squares(&g, 0.1),
            Err(Error::EmptyContour { .. })
        ));
    }

    #[test]
    fn level_above_max_is_empty() {
        let g = kde_grid(&[Point::default()], 32, 1.0).unwrap();
        let max = g.max();
        assert!(matches!(
            marching_squares(&g, max + 1e-9),
            Err(Error::EmptyContour { .. })
        ));
    }

    #[test]
    fn single_gaussian_gives_one_round_loop() {
        let c = Point::new(2.0, -1.0);
        let g = kde_grid(&[c], 64, 1.0).unwrap();
        let loops = marching_squares(&g, 0.3 * g.max()).unwrap();
        assert_eq!(loops.len(), 1);
        let d: Vec<f64> = loops[0].iter().map(|p| p.dist(c)).collect();
        let mean = d.iter().sum::<f64>() / d.len() as f64;
        let spread = d.iter().map(|x| (x - mean).abs()).fold(0.0, f64::max);
        assert!(spread < 0.1 * mean, "spread {spread} mean {mean}");
        // exp(-r^2/2) = 0.3  =>  r = sqrt(-2 ln 0.3)
        let expect = (-2.0 * 0.3f64.ln()).sqrt();
        assert!((mean - expect).abs() < 0.05, "{mean} vs {expect}");
    }

    #[test]
    fn two_far_blobs_give_two_loops() {
        let g = kde_grid(&[Point::new(0.0, 0.0), Point::new(20.0, 0.0)], 64, 1.0).unwrap();
        let loops = marching_squares(&g, 0.5).unwrap();
        assert_eq!(loops.len(), 2);
        for l in &loops {
            assert!(polygon::area(l).abs() > 0.5);
        }
    }
}
