//! Label fixtures with the scripted agent and print the resulting scores.

use std::sync::Arc;

use distbrush::agent::{author, AgentConfig};
use distbrush::data::build_knn;
use distbrush::engine::{Session, SessionConfig};
use distbrush::fixtures::{generate, FixtureSpec};
use distbrush::metrics::clustering_scores;
use distbrush::snn::build_snn_model;

fn main() {
    let k: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(15);
    let seed: u64 = std::env::args()
        .nth(2)
        .and_then(|s| s.parse().ok())
        .unwrap_or(7);
    for (spec, clusters) in [
        (FixtureSpec::two_blobs(100, seed), 2),
        (FixtureSpec::three_blobs(100, seed), 3),
    ] {
        let fx = generate(&spec).unwrap();
        let model = Arc::new(build_snn_model(&build_knn(&fx.dataset, k).unwrap()));
        let mut session = Session::new(&fx.projection, model, SessionConfig::default()).unwrap();
        let cfg = AgentConfig {
            clusters,
            ..AgentConfig::default()
        };
        let traj = author(&mut session, &cfg).unwrap();
        let scores = clustering_scores(&session.export_labels(), &fx.labels).unwrap();
        println!(
            "k={k} clusters={clusters} events={} {:?}",
            traj.events.len(),
            scores
        );
    }
}
