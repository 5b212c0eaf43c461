//! Seeded synthetic datasets with known cluster structure, and brute-force
//! reference implementations used to check the fast paths.
//!
//! Blob and shell clusters sit on a line in the multidimensional space. Their
//! centers are only slightly apart in the first two coordinates and far apart
//! along the third, so the orthogonal projection (the first two coordinates)
//! shows touching, partly overlapping clusters that are well separated in the
//! data space.

pub mod oracle;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Projection};
use crate::error::{Error, Result};
use crate::metrics::silhouette;

/// Minimum multidimensional silhouette of generated blob and shell fixtures.
pub const MIN_SILHOUETTE: f64 = 0.5;

/// Cluster radius scale. Blob points have this root-mean-square distance to
/// their center and shell points lie exactly at it; separations are in the
/// same unit, so a separation of 10 puts centers ten blob diameters apart.
pub const CLUSTER_RADIUS: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum FixtureKind {
    TwoBlobs,
    ThreeBlobs,
    HypersphereShells,
    GridLattice,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FixtureSpec {
    pub kind: FixtureKind,
    /// Points per cluster; the total for a lattice.
    pub n_per_cluster: usize,
    /// Dimensionality `M`.
    pub dim: usize,
    /// Distance between neighboring cluster centers, or the lattice spacing.
    pub separation: f64,
    pub seed: u64,
}

impl FixtureSpec {
    pub fn two_blobs(n_per_cluster: usize, seed: u64) -> FixtureSpec {
        FixtureSpec {
            kind: FixtureKind::TwoBlobs,
            n_per_cluster,
            dim: 10,
            separation: 10.0,
            seed,
        }
    }

    pub fn three_blobs(n_per_cluster: usize, seed: u64) -> FixtureSpec {
        FixtureSpec {
            kind: FixtureKind::ThreeBlobs,
            n_per_cluster,
            dim: 10,
            separation: 10.0,
            seed,
        }
    }

    pub fn clusters(&self) -> usize {
        match self.kind {
            FixtureKind::TwoBlobs => 2,
            FixtureKind::ThreeBlobs | FixtureKind::HypersphereShells => 3,
            FixtureKind::GridLattice => 1,
        }
    }

    /// Per-axis standard deviation of blob points.
    pub fn axis_sigma(&self) -> f64 {
        CLUSTER_RADIUS / (self.dim as f64).sqrt()
    }

    /// Offset between neighboring centers in the first coordinate.
    pub fn visible_offset(&self) -> f64 {
        3.0 * self.axis_sigma()
    }

    fn validate(&self) -> Result<()> {
        if !(self.separation > 0.0 && self.separation.is_finite()) {
            return Err(Error::Parameter(format!(
                "separation {} must be positive",
                self.separation
            )));
        }
        if self.kind == FixtureKind::GridLattice {
            if self.n_per_cluster < 2 || self.dim < 2 {
                return Err(Error::Parameter(
                    "lattice needs at least 2 points in 2 dimensions".into(),
                ));
            }
            return Ok(());
        }
        if self.n_per_cluster < 2 {
            return Err(Error::Parameter("clusters need at least 2 points".into()));
        }
        if self.dim < 3 {
            return Err(Error::Parameter(format!("dimension {} below 3", self.dim)));
        }
        if self.separation <= self.visible_offset() {
            return Err(Error::Parameter(format!(
                "separation {} not above the projected offset {}",
                self.separation,
                self.visible_offset()
            )));
        }
        Ok(())
    }

    /// Center of cluster `c`.
    pub fn center(&self, c: usize) -> Vec<f64> {
        let v = self.visible_offset();
        let hidden = (self.separation * self.separation - v * v).sqrt();
        let mut center = vec![0.0; self.dim];
        center[0] = c as f64 * v;
        center[2] = c as f64 * hidden;
        center
    }
}

/// A generated dataset with its orthogonal projection and ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct Fixture {
    pub dataset: Dataset,
    pub projection: Projection,
    pub labels: Vec<i64>,
}

/// Generate the fixture described by `spec`. Blob and shell fixtures must
/// reach [`MIN_SILHOUETTE`] in the data space.
pub fn generate(spec: &FixtureSpec) -> Result<Fixture> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut gauss = move || -> f64 { StandardNormal.sample(&mut rng) };
    let mut rows = Vec::new();
    let mut labels = Vec::new();

    match spec.kind {
        FixtureKind::GridLattice => {
            let side = (spec.n_per_cluster as f64).sqrt().ceil() as usize;
            for i in 0..spec.n_per_cluster {
                let mut row = vec![0.0; spec.dim];
                row[0] = (i % side) as f64 * spec.separation;
                row[1] = (i / side) as f64 * spec.separation;
                rows.push(row);
                labels.push(0);
            }
        }
        FixtureKind::TwoBlobs | FixtureKind::ThreeBlobs | FixtureKind::HypersphereShells => {
            let sigma = spec.axis_sigma();
            for c in 0..spec.clusters() {
                let center = spec.center(c);
                for _ in 0..spec.n_per_cluster {
                    let noise: Vec<f64> = (0..spec.dim).map(|_| gauss()).collect();
                    let scale = if spec.kind == FixtureKind::HypersphereShells {
                        let norm = noise.iter().map(|v| v * v).sum::<f64>().sqrt();
                        CLUSTER_RADIUS / norm
                    } else {
                        sigma
                    };
                    rows.push(
                        center
                            .iter()
                            .zip(&noise)
                            .map(|(m, z)| m + z * scale)
                            .collect(),
                    );
                    labels.push(c as i64);
                }
            }
        }
    }

    let dataset = Dataset::from_rows(rows, Some(labels.clone()))?;
    if spec.kind != FixtureKind::GridLattice {
        let s = silhouette(&dataset, &labels)?;
        if s < MIN_SILHOUETTE {
            return Err(Error::Parameter(format!(
                "silhouette {s:.3} below the separability floor {MIN_SILHOUETTE}"
            )));
        }
    }
    let projection = dataset.orthogonal_projection();
    Ok(Fixture {
        dataset,
        projection,
        labels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_blobs_are_separated() {
        let spec = FixtureSpec::two_blobs(50, 1);
        let f = generate(&spec).unwrap();
        assert_eq!(f.dataset.len(), 100);
        assert!(silhouette(&f.dataset, &f.labels).unwrap() > 0.9);
        // the projection does not separate them nearly as well
        let s2 = crate::metrics::silhouette_positions(&f.projection.positions, &f.labels).unwrap();
        assert!(s2 < 0.9, "{s2}");
    }

    #[test]
    fn shells_have_fixed_radius() {
        let spec = FixtureSpec {
            kind: FixtureKind::HypersphereShells,
            n_per_cluster: 40,
            dim: 10,
            separation: 10.0,
            seed: 4,
        };
        let f = generate(&spec).unwrap();
        for (i, row) in f.dataset.rows().enumerate() {
            let c = spec.center(f.labels[i] as usize);
            let r = row
                .iter()
                .zip(&c)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            assert!((r - CLUSTER_RADIUS).abs() < 1e-12);
        }
    }

    #[test]
    fn lattice_shape() {
        let spec = FixtureSpec {
            kind: FixtureKind::GridLattice,
            n_per_cluster: 10,
            dim: 3,
            separation: 2.0,
            seed: 0,
        };
        let f = generate(&spec).unwrap();
        assert_eq!(f.projection.positions[5], crate::geom::Point::new(2.0, 2.0));
    }

    #[test]
    fn deterministic() {
        let spec = FixtureSpec::three_blobs(20, 11);
        let a = generate(&spec).unwrap();
        let b = generate(&spec).unwrap();
        assert_eq!(a.dataset.to_csv(), b.dataset.to_csv());
    }

    #[test]
    fn inseparable_blobs_are_rejected() {
        let mut spec = FixtureSpec::two_blobs(30, 2);
        spec.separation = 0.6;
        assert!(matches!(generate(&spec), Err(Error::Parameter(_))));
        spec.dim = 2;
        assert!(generate(&spec).is_err());
    }
}
