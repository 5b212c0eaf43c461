//! Headless command surface over the distbrush engine: precompute the
//! similarity model, replay recorded trajectories, distort projections and
//! score labelings.
//!
//! Every command is deterministic given its configuration. Outputs are
//! written atomically (temporary file, then rename) into the run directory.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::json;
use sha2::{Digest, Sha256};

use distbrush::closeness::ClosenessParams;
use distbrush::data::{build_knn, DataFormat, Dataset, KnnIndex, Projection};
use distbrush::engine::{Session, SessionConfig, Trajectory};
use distbrush::lens::LensConfig;
use distbrush::metrics::{
    clustering_scores, distort_projection, silhouette_with, trust_continuity, ClusteringScores,
    QualityScores,
};
use distbrush::snn::{build_snn_model, SnnModel};

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

/// Command failure with the process exit code it maps to.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flags, unreadable or invalid inputs, illegal trajectories.
    #[error("{0}")]
    Usage(String),
    /// Failures while computing or writing results.
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }

    fn input(context: impl std::fmt::Display, e: impl std::fmt::Display) -> CliError {
        CliError::Usage(format!("{context}: {e}"))
    }
}

impl From<distbrush::error::Error> for CliError {
    fn from(e: distbrush::error::Error) -> Self {
        use distbrush::error::Error as E;
        match e {
            E::Io(_) | E::Degenerate(_) | E::Geometry(_) | E::EmptyContour { .. } => {
                CliError::Runtime(e.to_string())
            }
            _ => CliError::Usage(e.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Every tunable of a run. Loaded from TOML; absent keys take defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default, deny_unknown_fields)]
pub struct RunConfig {
    pub dataset: Option<PathBuf>,
    /// Layout CSV; the first two dataset columns when absent.
    pub projection: Option<PathBuf>,
    pub k: usize,
    pub theta_in: f64,
    pub theta_out: f64,
    pub margin_fraction: f64,
    pub alpha_fraction: f64,
    pub grid_resolution: usize,
    pub bandwidth_factor: f64,
    pub bandwidth_floor: f64,
    /// Painter radius as a fraction of the layout's bounding-box diagonal.
    pub painter_radius: f64,
    pub pause_threshold_ms: u64,
    pub seed: u64,
    pub k_eval: usize,
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        let session = SessionConfig::default();
        let lens = LensConfig::default();
        RunConfig {
            dataset: None,
            projection: None,
            k: DEFAULT_K,
            theta_in: session.params.theta_in,
            theta_out: session.params.theta_out,
            margin_fraction: lens.margin_fraction,
            alpha_fraction: lens.alpha_fraction,
            grid_resolution: lens.grid_resolution,
            bandwidth_factor: lens.bandwidth_factor,
            bandwidth_floor: lens.bandwidth_floor,
            painter_radius: session.painter_radius,
            pause_threshold_ms: session.pause_threshold_ms,
            seed: 0,
            k_eval: distbrush::metrics::DEFAULT_K_EVAL,
            out_dir: PathBuf::from("run"),
        }
    }
}

/// Neighborhood size used when the configuration does not set one.
pub const DEFAULT_K: usize = 15;

impl RunConfig {
    /// Parse a TOML file. Relative paths inside it resolve against the
    /// file's directory.
    pub fn load(path: &Path) -> CliResult<RunConfig> {
        let text = fs::read_to_string(path).map_err(|e| CliError::input(path.display(), e))?;
        let mut config: RunConfig =
            toml::from_str(&text).map_err(|e| CliError::input(path.display(), e))?;
        let base = path.parent().unwrap_or(Path::new(""));
        let rebase = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        config.dataset.as_mut().map(rebase);
        config.projection.as_mut().map(rebase);
        rebase(&mut config.out_dir);
        Ok(config)
    }

    pub fn session_config(&self) -> CliResult<SessionConfig> {
        let config = SessionConfig {
            params: ClosenessParams::new(self.theta_in, self.theta_out)?,
            lens: LensConfig {
                alpha_fraction: self.alpha_fraction,
                grid_resolution: self.grid_resolution,
                bandwidth_factor: self.bandwidth_factor,
                bandwidth_floor: self.bandwidth_floor,
                margin_fraction: self.margin_fraction,
            },
            pause_threshold_ms: self.pause_threshold_ms,
            painter_radius: self.painter_radius,
            ..SessionConfig::default()
        };
        config.validate()?;
        Ok(config)
    }

    /// Parameters only, for manifests: paths and the run directory are left
    /// out so identical inputs give identical manifests wherever they live.
    fn parameters(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("config serializes");
        let map = v.as_object_mut().expect("config is an object");
        for key in ["dataset", "projection", "outDir"] {
            map.remove(key);
        }
        v
    }

    fn dataset_path(&self) -> CliResult<&Path> {
        self.dataset.as_deref().ok_or_else(|| {
            CliError::Usage("no dataset given (set `dataset` or pass --dataset)".into())
        })
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn read_bytes(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| CliError::input(path.display(), e))
}

/// Write `contents` to `path` through a sibling temporary file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> CliResult<()> {
    let runtime = |e: std::io::Error| CliError::Runtime(format!("{}: {e}", path.display()));
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(runtime)?;
    }
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = path.with_file_name(format!(".{name}.tmp"));
    fs::write(&tmp, contents).map_err(runtime)?;
    fs::rename(&tmp, path).map_err(runtime)
}

fn to_json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut text = serde_json::to_string_pretty(value).expect("output serializes");
    text.push('\n');
    text.into_bytes()
}

/// Inputs of a run, loaded and hashed.
struct Inputs {
    dataset: Dataset,
    dataset_sha: String,
    projection: Projection,
    projection_sha: Option<String>,
}

fn load_inputs(config: &RunConfig) -> CliResult<Inputs> {
    let path = config.dataset_path()?;
    let bytes = read_bytes(path)?;
    let text = String::from_utf8(bytes.clone()).map_err(|e| CliError::input(path.display(), e))?;
    let dataset = match DataFormat::from_path(path) {
        DataFormat::Json => Dataset::parse_json(&text),
        DataFormat::Csv => Dataset::parse_csv(&text),
    }
    .map_err(|e| CliError::input(path.display(), e))?;
    let (projection, projection_sha) = match &config.projection {
        Some(p) => {
            let bytes = read_bytes(p)?;
            let text =
                String::from_utf8(bytes.clone()).map_err(|e| CliError::input(p.display(), e))?;
            let proj = Projection::parse_csv(&text).map_err(|e| CliError::input(p.display(), e))?;
            (proj, Some(sha256_hex(&bytes)))
        }
        None => (dataset.orthogonal_projection(), None),
    };
    if projection.len() != dataset.len() {
        return Err(distbrush::error::Error::Alignment {
            dataset: dataset.len(),
            projection: projection.len(),
        }
        .into());
    }
    Ok(Inputs {
        dataset,
        dataset_sha: sha256_hex(&bytes),
        projection,
        projection_sha,
    })
}

/// On-disk neighbor cache, keyed by the dataset hash and `k`.
#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct KnnCache {
    dataset_sha256: String,
    k: usize,
    neighbors: Vec<Vec<usize>>,
}

/// Cache file for a dataset hash and `k` under `out_dir`.
pub fn cache_path(out_dir: &Path, dataset_sha: &str, k: usize) -> PathBuf {
    out_dir
        .join("cache")
        .join(format!("knn-{}-k{k}.json", &dataset_sha[..16]))
}

fn read_cache(path: &Path, dataset_sha: &str, k: usize) -> Option<KnnIndex> {
    let text = fs::read_to_string(path).ok()?;
    let cache: KnnCache = serde_json::from_str(&text).ok()?;
    if cache.dataset_sha256 != dataset_sha || cache.k != k {
        return None;
    }
    KnnIndex::from_lists(k, cache.neighbors).ok()
}

/// Whether `precompute` found an existing cache.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CacheStatus {
    Hit,
    Written,
}

fn knn_for(config: &RunConfig, inputs: &Inputs) -> CliResult<(KnnIndex, CacheStatus, PathBuf)> {
    let path = cache_path(&config.out_dir, &inputs.dataset_sha, config.k);
    if let Some(index) = read_cache(&path, &inputs.dataset_sha, config.k) {
        return Ok((index, CacheStatus::Hit, path));
    }
    let index = build_knn(&inputs.dataset, config.k)?;
    Ok((index, CacheStatus::Written, path))
}

/// Build the kNN index for the configured dataset and cache it. A cache
/// already present for the same dataset bytes and `k` is left untouched.
pub fn cmd_precompute(config: &RunConfig) -> CliResult<(PathBuf, CacheStatus)> {
    config.session_config()?;
    let inputs = load_inputs(config)?;
    let (index, status, path) = knn_for(config, &inputs)?;
    if status == CacheStatus::Written {
        let cache = KnnCache {
            dataset_sha256: inputs.dataset_sha.clone(),
            k: config.k,
            neighbors: (0..index.len())
                .map(|i| index.neighbors(i).to_vec())
                .collect(),
        };
        write_atomic(
            &path,
            &serde_json::to_vec(&cache).expect("cache serializes"),
        )?;
    }
    Ok((path, status))
}

fn model_for(config: &RunConfig, inputs: &Inputs) -> CliResult<SnnModel> {
    let (index, _, _) = knn_for(config, inputs)?;
    Ok(build_snn_model(&index))
}

/// Labels file: one entry per point, -1 for unbrushed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Labels {
    pub labels: Vec<i64>,
}

impl Labels {
    pub fn load(path: &Path) -> CliResult<Labels> {
        let text = fs::read_to_string(path).map_err(|e| CliError::input(path.display(), e))?;
        serde_json::from_str(&text).map_err(|e| CliError::input(path.display(), e))
    }
}

/// Agreement with the dataset's truth labels, plus the multidimensional
/// silhouette of the brushed points when at least two brushes are nonempty.
fn score_labels(dataset: &Dataset, predicted: &[i64]) -> CliResult<Option<ClusteringScores>> {
    let Some(truth) = dataset.labels() else {
        return Ok(None);
    };
    let mut scores = clustering_scores(predicted, truth)?;
    let assigned: Vec<usize> = (0..predicted.len())
        .filter(|&i| predicted[i] != -1)
        .collect();
    let sub: Vec<i64> = assigned.iter().map(|&i| predicted[i]).collect();
    scores.silhouette = silhouette_with(&sub, |a, b| {
        dataset.dist_sq(assigned[a], assigned[b]).sqrt()
    })
    .ok();
    Ok(Some(scores))
}

fn manifest(
    command: &str,
    config: &RunConfig,
    inputs: serde_json::Value,
    outputs: &[(&str, &[u8])],
) -> Vec<u8> {
    let outputs: serde_json::Map<String, serde_json::Value> = outputs
        .iter()
        .map(|(name, bytes)| (name.to_string(), json!(sha256_hex(bytes))))
        .collect();
    to_json_bytes(&json!({
        "tool": "distbrush",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "config": config.parameters(),
        "inputs": inputs,
        "outputs": outputs,
    }))
}

fn write_run(
    config: &RunConfig,
    command: &str,
    inputs: serde_json::Value,
    files: &[(&str, Vec<u8>)],
) -> CliResult<Vec<PathBuf>> {
    let mut written = Vec::new();
    for (name, bytes) in files {
        let path = config.out_dir.join(name);
        write_atomic(&path, bytes)?;
        written.push(path);
    }
    let listing: Vec<(&str, &[u8])> = files.iter().map(|(n, b)| (*n, b.as_slice())).collect();
    let path = config.out_dir.join("manifest.json");
    write_atomic(&path, &manifest(command, config, inputs, &listing))?;
    written.push(path);
    Ok(written)
}

/// Result of a replay, also written to the run directory.
#[derive(Debug, Clone)]
pub struct ReplayOutcome {
    pub labels: Vec<i64>,
    pub scores: Option<ClusteringScores>,
    pub files: Vec<PathBuf>,
}

/// Replay a trajectory file and write `labels.json`, `snapshot.json`,
/// `scores.json` (when the dataset has truth labels) and `manifest.json`.
pub fn cmd_replay(config: &RunConfig, trajectory: &Path) -> CliResult<ReplayOutcome> {
    let session_config = config.session_config()?;
    let traj_bytes = read_bytes(trajectory)?;
    let text = String::from_utf8(traj_bytes.clone())
        .map_err(|e| CliError::input(trajectory.display(), e))?;
    let traj = Trajectory::parse(&text).map_err(|e| CliError::input(trajectory.display(), e))?;
    let inputs = load_inputs(config)?;
    let model = model_for(config, &inputs)?;
    let mut session = Session::new(&inputs.projection, Arc::new(model), session_config)?;
    session.apply_params(&traj.params)?;
    session.replay(&traj)?;

    let labels = session.export_labels();
    let scores = score_labels(&inputs.dataset, &labels)?;
    let mut files = vec![
        (
            "labels.json",
            to_json_bytes(&Labels {
                labels: labels.clone(),
            }),
        ),
        ("snapshot.json", {
            let mut s = session.snapshot().to_json().into_bytes();
            s.push(b'\n');
            s
        }),
    ];
    if let Some(s) = &scores {
        files.push(("scores.json", to_json_bytes(s)));
    }
    let input_hashes = json!({
        "dataset": inputs.dataset_sha,
        "projection": inputs.projection_sha,
        "trajectory": sha256_hex(&traj_bytes),
    });
    let files = write_run(config, "replay", input_hashes, &files)?;
    Ok(ReplayOutcome {
        labels,
        scores,
        files,
    })
}

/// Write a distorted copy of the layout (normalized to the unit square) to
/// `output`, or to `distorted.csv` in the run directory.
pub fn cmd_distort(
    config: &RunConfig,
    proportion: f64,
    seed: Option<u64>,
    output: Option<&Path>,
) -> CliResult<PathBuf> {
    let positions = match (&config.projection, &config.dataset) {
        (Some(p), _) => {
            Projection::load(p)
                .map_err(|e| CliError::input(p.display(), e))?
                .positions
        }
        (None, Some(_)) => load_inputs(config)?.projection.positions,
        (None, None) => {
            return Err(CliError::Usage("no projection or dataset given".into()));
        }
    };
    let moved = distort_projection(&positions, proportion, seed.unwrap_or(config.seed))?;
    let projection = Projection::new(moved)?;
    let path = output.map_or_else(|| config.out_dir.join("distorted.csv"), Path::to_path_buf);
    write_atomic(&path, projection.to_csv().as_bytes())?;
    Ok(path)
}

/// Scores written by the `metrics` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MetricsReport {
    pub quality: QualityScores,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub clustering: Option<ClusteringScores>,
}

/// Score a layout (trustworthiness and continuity) and, when a labels file
/// is given and the dataset has truth labels, the labeling.
pub fn cmd_metrics(
    config: &RunConfig,
    labels: Option<&Path>,
) -> CliResult<(MetricsReport, PathBuf)> {
    let inputs = load_inputs(config)?;
    let quality = trust_continuity(&inputs.dataset, &inputs.projection.positions, config.k_eval)?;
    let (clustering, labels_sha) = match labels {
        Some(path) => {
            let bytes = read_bytes(path)?;
            let parsed: Labels =
                serde_json::from_slice(&bytes).map_err(|e| CliError::input(path.display(), e))?;
            if parsed.labels.len() != inputs.dataset.len() {
                return Err(CliError::Usage(format!(
                    "{}: {} labels for {} points",
                    path.display(),
                    parsed.labels.len(),
                    inputs.dataset.len()
                )));
            }
            (
                score_labels(&inputs.dataset, &parsed.labels)?,
                Some(sha256_hex(&bytes)),
            )
        }
        None => (None, None),
    };
    let report = MetricsReport {
        quality,
        clustering,
    };
    let input_hashes = json!({
        "dataset": inputs.dataset_sha,
        "projection": inputs.projection_sha,
        "labels": labels_sha,
    });
    let files = write_run(
        config,
        "metrics",
        input_hashes,
        &[("metrics.json", to_json_bytes(&report))],
    )?;
    Ok((report, files[0].clone()))
}

/// Fixtures the bundled golden trajectories were recorded against, by file
/// stem under `tests/golden/`.
pub fn golden_fixtures() -> [(&'static str, distbrush::fixtures::FixtureSpec); 2] {
    use distbrush::fixtures::FixtureSpec;
    [
        ("two_blobs", FixtureSpec::two_blobs(100, 7)),
        ("three_blobs", FixtureSpec::three_blobs(100, 7)),
    ]
}
