use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::geom::Point;

/// Per-axis standard deviation of the resampling Gaussian centered in the
/// unit square; 99.74% of its mass falls inside `[0, 1]` per axis.
pub const DISTORTION_SIGMA: f64 = 0.166;

/// Translate and uniformly scale `positions` so the larger bounding-box side
/// spans `[0, 1]`. The aspect ratio is kept.
pub fn normalize_unit_square(positions: &[Point]) -> Vec<Point> {
    if positions.is_empty() {
        return Vec::new();
    }
    let (mut lo, mut hi) = (positions[0], positions[0]);
    for p in positions {
        lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    let range = (hi.x - lo.x).max(hi.y - lo.y);
    let scale = if range > 0.0 { 1.0 / range } else { 1.0 };
    positions.iter().map(|&p| (p - lo) * scale).collect()
}

/// Number of rows resampled for `proportion` of `n` points.
pub fn resampled_count(n: usize, proportion: f64) -> usize {
    // the tolerance absorbs products like 0.6 * 5 = 3.0000000000000004
    ((proportion * n as f64 - 1e-9).ceil().max(0.0) as usize).min(n)
}

/// Normalize into the unit square, then move a uniformly chosen
/// `ceil(proportion * n)` points to positions drawn from an isotropic
/// Gaussian centered at `(0.5, 0.5)`.
pub fn distort_projection(positions: &[Point], proportion: f64, seed: u64) -> Result<Vec<Point>> {
    if !(0.0..=1.0).contains(&proportion) {
        return Err(Error::Parameter(format!(
            "proportion {proportion} not in [0, 1]"
        )));
    }
    let mut out = normalize_unit_square(positions);
    let n = out.len();
    let count = resampled_count(n, proportion);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.5, DISTORTION_SIGMA).expect("valid sigma");
    let mut chosen = index::sample(&mut rng, n, count).into_vec();
    chosen.sort_unstable();
    for i in chosen {
        out[i] = Point::new(normal.sample(&mut rng), normal.sample(&mut rng));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn layout(n: usize) -> Vec<Point> {
        (0..n)
            .map(|i| Point::new(i as f64 * 2.0 + 3.0, (i as f64).sin() - 5.0))
            .collect()
    }

    #[test]
    fn zero_proportion_only_normalizes() {
        let pos = layout(30);
        assert_eq!(
            distort_projection(&pos, 0.0, 1).unwrap(),
            normalize_unit_square(&pos)
        );
    }

    #[test]
    fn normalization_fits_unit_square() {
        let norm = normalize_unit_square(&layout(30));
        assert!(norm
            .iter()
            .all(|p| (0.0..=1.0).contains(&p.x) && (0.0..=1.0).contains(&p.y)));
        assert_eq!(norm[0].x, 0.0);
        assert_eq!(norm[29].x, 1.0);
    }

    #[test]
    fn count_rounds_up() {
        assert_eq!(resampled_count(5, 0.6), 3);
        assert_eq!(resampled_count(7, 0.5), 4);
        assert_eq!(resampled_count(10, 0.0), 0);
        assert_eq!(resampled_count(10, 1.0), 10);
    }

    #[test]
    fn full_resample_matches_gaussian_mass() {
        // P(0 < X < 1) = erf(0.5 / (0.166 * sqrt 2)) = 0.997405 per axis
        let out = distort_projection(&layout(20000), 1.0, 3).unwrap();
        let inside = out
            .iter()
            .flat_map(|p| [p.x, p.y])
            .filter(|v| (0.0..=1.0).contains(v))
            .count();
        let frac = inside as f64 / 40000.0;
        assert!((frac - 0.997405).abs() < 0.0015, "{frac}");
    }

    #[test]
    fn seeded_and_range_checked() {
        let pos = layout(50);
        assert_eq!(
            distort_projection(&pos, 0.3, 9).unwrap(),
            distort_projection(&pos, 0.3, 9).unwrap()
        );
        assert!(distort_projection(&pos, 1.2, 9).is_err());
        assert!(distort_projection(&pos, f64::NAN, 9).is_err());
    }
}
