use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use distbrush::data::Projection;
use distbrush::fixtures::{generate, FixtureSpec};
use distbrush::metrics::normalize_unit_square;
use distbrush_cli::{cmd_precompute, cmd_replay, CacheStatus, Labels, RunConfig};

fn bin(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_distbrush"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Two-blob dataset written to `dir/data.csv`.
fn write_fixture(dir: &Path, n_per_cluster: usize) -> PathBuf {
    let fx = generate(&FixtureSpec::two_blobs(n_per_cluster, 3)).unwrap();
    let path = dir.join("data.csv");
    fs::write(&path, fx.dataset.to_csv()).unwrap();
    path
}

#[test]
fn precompute_writes_cache_then_hits() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_fixture(dir.path(), 20);
    let config = RunConfig {
        dataset: Some(data),
        out_dir: dir.path().join("run"),
        ..RunConfig::default()
    };
    let (path, status) = cmd_precompute(&config).unwrap();
    assert_eq!(status, CacheStatus::Written);
    let bytes = fs::read(&path).unwrap();
    let (again, status) = cmd_precompute(&config).unwrap();
    assert_eq!(
        (again.as_path(), status),
        (path.as_path(), CacheStatus::Hit)
    );
    assert_eq!(fs::read(&path).unwrap(), bytes);

    let o = bin(
        dir.path(),
        &["precompute", "--dataset", "data.csv", "--out-dir", "run"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("cache hit"));
}

#[test]
fn missing_dataset_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(dir.path(), &["precompute", "--dataset", "nope.csv"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("nope.csv"));
    let o = bin(dir.path(), &["precompute"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn oversized_k_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    write_fixture(dir.path(), 5);
    let o = bin(
        dir.path(),
        &["precompute", "--dataset", "data.csv", "--k", "10"],
    );
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn bad_flags_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(bin(dir.path(), &["replay"]).status.code(), Some(2));
    assert_eq!(bin(dir.path(), &["frobnicate"]).status.code(), Some(2));
    write_fixture(dir.path(), 10);
    let o = bin(
        dir.path(),
        &["precompute", "--dataset", "data.csv", "--theta-in", "1.5"],
    );
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn empty_trajectory_labels_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_fixture(dir.path(), 15);
    let traj = dir.path().join("empty.json");
    fs::write(&traj, r#"{"events": []}"#).unwrap();
    let config = RunConfig {
        dataset: Some(data),
        out_dir: dir.path().join("run"),
        ..RunConfig::default()
    };
    let out = cmd_replay(&config, &traj).unwrap();
    assert_eq!(out.labels, vec![-1; 30]);
    let labels = Labels::load(&config.out_dir.join("labels.json")).unwrap();
    assert_eq!(labels.labels, vec![-1; 30]);
    let names: Vec<_> = out
        .files
        .iter()
        .map(|p| p.file_name().unwrap().to_str().unwrap())
        .collect();
    assert_eq!(
        names,
        [
            "labels.json",
            "snapshot.json",
            "scores.json",
            "manifest.json"
        ]
    );
    let manifest = fs::read_to_string(config.out_dir.join("manifest.json")).unwrap();
    assert!(!manifest.contains(dir.path().to_str().unwrap()));
}

#[test]
fn illegal_event_reports_index() {
    let dir = tempfile::tempdir().unwrap();
    write_fixture(dir.path(), 15);
    fs::write(
        dir.path().join("bad.json"),
        r#"{"events": [{"t": 0, "type": "MoveTo", "x": 0, "y": 0}, {"t": 5, "type": "Release"}]}"#,
    )
    .unwrap();
    let o = bin(dir.path(), &["replay", "bad.json", "--dataset", "data.csv"]);
    assert_eq!(o.status.code(), Some(2));
    let msg = stderr(&o);
    assert!(msg.contains("index 1") && msg.contains("Release"), "{msg}");
    assert!(!dir.path().join("run/labels.json").exists());
}

#[test]
fn config_file_with_overrides() {
    let dir = tempfile::tempdir().unwrap();
    write_fixture(dir.path(), 15);
    fs::write(
        dir.path().join("run.toml"),
        "dataset = \"data.csv\"\nk = 7\noutDir = \"out\"\n",
    )
    .unwrap();
    let o = bin(
        dir.path(),
        &["--config", "run.toml", "precompute", "--k", "9"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let cached: Vec<_> = fs::read_dir(dir.path().join("out/cache"))
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    assert_eq!(cached.len(), 1);
    assert!(cached[0].to_str().unwrap().ends_with("-k9.json"));

    fs::write(dir.path().join("typo.toml"), "thetaInn = 0.3\n").unwrap();
    let o = bin(dir.path(), &["--config", "typo.toml", "precompute"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn distort_examples() {
    let dir = tempfile::tempdir().unwrap();
    write_fixture(dir.path(), 25);
    let original = generate(&FixtureSpec::two_blobs(25, 3))
        .unwrap()
        .projection
        .positions;
    let normalized = normalize_unit_square(&original);

    let o = bin(
        dir.path(),
        &[
            "distort",
            "--dataset",
            "data.csv",
            "--proportion",
            "0",
            "--output",
            "d0.csv",
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let d0 = Projection::load(&dir.path().join("d0.csv"))
        .unwrap()
        .positions;
    assert_eq!(d0, normalized);

    let o = bin(
        dir.path(),
        &[
            "distort",
            "--dataset",
            "data.csv",
            "--proportion",
            "0.5",
            "--seed",
            "7",
            "--output",
            "d5.csv",
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let d5 = Projection::load(&dir.path().join("d5.csv"))
        .unwrap()
        .positions;
    let differ = d5.iter().zip(&normalized).filter(|(a, b)| a != b).count();
    assert_eq!(differ, 25);

    let o = bin(
        dir.path(),
        &["distort", "--dataset", "data.csv", "--proportion", "1.2"],
    );
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn metrics_scores_layout_and_labels() {
    let dir = tempfile::tempdir().unwrap();
    write_fixture(dir.path(), 20);
    let fx = generate(&FixtureSpec::two_blobs(20, 3)).unwrap();
    let labels = serde_json::to_string(&Labels {
        labels: fx.labels.clone(),
    })
    .unwrap();
    fs::write(dir.path().join("labels.json"), labels).unwrap();
    let o = bin(
        dir.path(),
        &[
            "metrics",
            "--dataset",
            "data.csv",
            "--labels",
            "labels.json",
            "--k-eval",
            "5",
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("run/metrics.json")).unwrap())
            .unwrap();
    assert_eq!(report["quality"]["kEval"], 5);
    assert_eq!(report["clustering"]["ami"], 1.0);
    assert!(report["clustering"]["silhouette"].as_f64().unwrap() > 0.5);

    fs::write(dir.path().join("short.json"), r#"{"labels": [0, 1]}"#).unwrap();
    let o = bin(
        dir.path(),
        &["metrics", "--dataset", "data.csv", "--labels", "short.json"],
    );
    assert_eq!(o.status.code(), Some(2));
}
