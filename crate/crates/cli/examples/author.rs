//! Record the golden trajectories with the scripted agent.
//!
//! Each fixture is written to CSV and read back so the session sees exactly
//! the bytes `replay` will load. Run from the workspace root:
//! `cargo run -p distbrush-cli --example author`.

use std::path::Path;
use std::sync::Arc;

use distbrush::agent::{author, AgentConfig};
use distbrush::data::{build_knn, Dataset};
use distbrush::engine::Session;
use distbrush::fixtures::generate;
use distbrush::metrics::clustering_scores;
use distbrush::snn::build_snn_model;
use distbrush_cli::{golden_fixtures, write_atomic, RunConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let config = RunConfig::default();
    for (stem, spec) in golden_fixtures() {
        let fx = generate(&spec)?;
        let dataset = Dataset::parse_csv(&fx.dataset.to_csv())?;
        let projection = dataset.orthogonal_projection();
        let model = build_snn_model(&build_knn(&dataset, config.k)?);
        let mut session = Session::new(&projection, Arc::new(model), config.session_config()?)?;
        let agent = AgentConfig {
            clusters: spec.clusters(),
            ..AgentConfig::default()
        };
        let trajectory = author(&mut session, &agent)?;
        let scores = clustering_scores(&session.export_labels(), &fx.labels)?;
        println!(
            "{stem}: {} events, ami {:.4} arand {:.4} vmeasure {:.4}",
            trajectory.events.len(),
            scores.ami,
            scores.arand,
            scores.vmeasure
        );
        let mut json = trajectory.to_json();
        json.push('\n');
        write_atomic(&dir.join(format!("{stem}.json")), json.as_bytes())?;
    }
    Ok(())
}
