use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use distbrush_cli::{
    cmd_distort, cmd_metrics, cmd_precompute, cmd_replay, CacheStatus, CliError, CliResult,
    RunConfig, EXIT_USAGE,
};

#[derive(Parser)]
#[command(
    name = "distbrush",
    version,
    about = "Distortion-aware brushing, headless"
)]
struct Cli {
    #[command(flatten)]
    overrides: Overrides,
    #[command(subcommand)]
    command: Command,
}

/// Flags that override the configuration file, field by field.
#[derive(Args)]
struct Overrides {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    dataset: Option<PathBuf>,
    #[arg(long, global = true)]
    projection: Option<PathBuf>,
    #[arg(long, global = true)]
    k: Option<usize>,
    #[arg(long, global = true)]
    theta_in: Option<f64>,
    #[arg(long, global = true)]
    theta_out: Option<f64>,
    #[arg(long, global = true)]
    margin_fraction: Option<f64>,
    #[arg(long, global = true)]
    alpha_fraction: Option<f64>,
    #[arg(long, global = true)]
    grid_resolution: Option<usize>,
    #[arg(long, global = true)]
    bandwidth_factor: Option<f64>,
    #[arg(long, global = true)]
    bandwidth_floor: Option<f64>,
    #[arg(long, global = true)]
    painter_radius: Option<f64>,
    #[arg(long, global = true)]
    pause_threshold_ms: Option<u64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    k_eval: Option<usize>,
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Build and cache the neighbor index.
    Precompute,
    /// Replay a trajectory and write labels, snapshot and scores.
    Replay { trajectory: PathBuf },
    /// Write a distorted copy of the layout.
    Distort {
        /// Fraction of points resampled, in [0, 1].
        #[arg(long)]
        proportion: f64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Score the layout and optionally a labeling.
    Metrics {
        #[arg(long)]
        labels: Option<PathBuf>,
    },
}

impl Overrides {
    fn resolve(&self) -> CliResult<RunConfig> {
        let mut c = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        macro_rules! apply {
            ($($field:ident),*) => {$(
                if let Some(v) = &self.$field {
                    c.$field = v.clone();
                }
            )*};
        }
        apply!(
            k,
            theta_in,
            theta_out,
            margin_fraction,
            alpha_fraction,
            grid_resolution,
            bandwidth_factor,
            bandwidth_floor,
            painter_radius,
            pause_threshold_ms,
            seed,
            k_eval,
            out_dir
        );
        if self.dataset.is_some() {
            c.dataset = self.dataset.clone();
        }
        if self.projection.is_some() {
            c.projection = self.projection.clone();
        }
        Ok(c)
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let config = cli.overrides.resolve()?;
    match cli.command {
        Command::Precompute => {
            let (path, status) = cmd_precompute(&config)?;
            let what = if status == CacheStatus::Hit {
                "cache hit"
            } else {
                "wrote"
            };
            println!("{what} {}", path.display());
        }
        Command::Replay { trajectory } => {
            let outcome = cmd_replay(&config, &trajectory)?;
            if let Some(s) = &outcome.scores {
                println!(
                    "ami {:.4} arand {:.4} vmeasure {:.4}",
                    s.ami, s.arand, s.vmeasure
                );
            }
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
        }
        Command::Distort { proportion, output } => {
            let path = cmd_distort(&config, proportion, cli.overrides.seed, output.as_deref())?;
            println!("wrote {}", path.display());
        }
        Command::Metrics { labels } => {
            let (report, path) = cmd_metrics(&config, labels.as_deref())?;
            println!(
                "trustworthiness {:.4} continuity {:.4}",
                report.quality.trustworthiness, report.quality.continuity
            );
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(CliError::exit_code(&e) as u8)
        }
    }
}
