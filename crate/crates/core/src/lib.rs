//! Distortion-aware brushing for 2D projections of multidimensional data.
//!
//! Membership is decided by shared-nearest-neighbor similarity in the data
//! ([`snn`], [`closeness`]). While a brush is painted ([`seeds`],
//! [`engine`]), a lens ([`lens`]) relocates points so the layout around the
//! brush reflects those data neighborhoods. [`metrics`] scores layouts and
//! labelings, [`fixtures`] builds seeded test data with brute-force oracles,
//! and [`agent`] scripts a labeling user.

pub mod agent;
pub mod closeness;
pub mod data;
pub mod engine;
pub mod error;
pub mod fixtures;
pub mod geom;
pub mod lens;
pub mod metrics;
pub mod seeds;
pub mod snn;

#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
mod readme {}

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/similarity.md")]
    mod similarity {}
    #[doc = include_str!("../../../book/src/closeness.md")]
    mod closeness {}
    #[doc = include_str!("../../../book/src/seeds.md")]
    mod seeds {}
    #[doc = include_str!("../../../book/src/lens.md")]
    mod lens {}
    #[doc = include_str!("../../../book/src/session.md")]
    mod session {}
    #[doc = include_str!("../../../book/src/evaluation.md")]
    mod evaluation {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
