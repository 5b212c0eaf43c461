//! Projection-quality and clustering-accuracy measures, plus the synthetic
//! position-randomization used to probe robustness against distortion.

mod clustering;
mod distort;
mod quality;
mod silhouette;

pub use clustering::{
    adjusted_mutual_info, adjusted_rand, clustering_scores, v_measure, ClusteringScores,
    AMI_NORMALIZATION,
};
pub use distort::{distort_projection, normalize_unit_square, resampled_count, DISTORTION_SIGMA};
pub use quality::{trust_continuity, QualityScores, DEFAULT_K_EVAL};
pub use silhouette::{silhouette, silhouette_positions, silhouette_with};
