use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use qdforge::qd_loop::RunConfig;
use qdforge::tasks::TaskSpec;
use qdforge::variation::OperatorKind;
use qdforge_cli::analyze::{analyze_path, AnalyzeOptions};
use qdforge_cli::sweep::{centroid_cache_path, load_or_build_centroids};
use qdforge_cli::{parse_config, run_sweep, SweepOptions};

const SEED_OFFSET_VAR: &str = "QDFORGE_SEED_OFFSET";

#[derive(Parser)]
#[command(name = "qdforge", version, about = "CVT-MAP-Elites experiments with discrete-crossover operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every configuration of an experiment file.
    Run {
        /// Experiment config (JSON).
        config_path: Option<PathBuf>,
        #[arg(long = "config", value_name = "PATH")]
        config: Option<PathBuf>,
        /// Output directory (overrides the config's output_dir).
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
        /// Worker threads for runs and batch evaluation.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Write an archive snapshot every G generations.
        #[arg(long = "snapshot-every", value_name = "G")]
        snapshot_every: Option<usize>,
    },
    /// Rolling statistics and PCA effective dimensionality for run directories.
    Analyze {
        run_dir: PathBuf,
        #[arg(long, default_value_t = qdforge::analysis::DEFAULT_WINDOW)]
        window: usize,
        #[arg(long, default_value_t = qdforge::analysis::DEFAULT_VARIANCE_THRESHOLD)]
        threshold: f64,
    },
    /// Pre-compute and cache a centroid set for a task.
    Centroids {
        k: usize,
        task: String,
        #[arg(long, default_value_t = RunConfig::DEFAULT_CVT_SAMPLES)]
        samples: usize,
        #[arg(long = "cvt-seed", default_value_t = 0)]
        cvt_seed: u64,
        #[arg(long, value_name = "DIR", default_value = "runs")]
        out: PathBuf,
    },
}

fn seed_offset() -> Result<u64> {
    match std::env::var(SEED_OFFSET_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .with_context(|| format!("{SEED_OFFSET_VAR} must be a non-negative integer, got `{v}`")),
        Err(_) => Ok(0),
    }
}

fn main() -> ExitCode {
    match real_main() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn real_main() -> Result<ExitCode> {
    match Cli::parse().command {
        Command::Run {
            config_path,
            config,
            out,
            jobs,
            snapshot_every,
        } => {
            let path = match (config_path, config) {
                (Some(_), Some(_)) => bail!("give the config either positionally or with --config"),
                (Some(p), None) | (None, Some(p)) => p,
                (None, None) => bail!("missing config path"),
            };
            let spec = parse_config(&path)?;
            let out = out
                .or_else(|| spec.output_dir.clone())
                .unwrap_or_else(|| PathBuf::from("runs"));
            let opts = SweepOptions {
                out,
                jobs: jobs.max(1),
                snapshot_every: snapshot_every.unwrap_or(spec.snapshot_every),
                seed_offset: seed_offset()?,
            };
            let summary = run_sweep(&spec, &opts)?;
            for r in &summary.runs {
                match &r.error {
                    None => println!("ok      {}/{}/seed_{}  {:.2}s", r.task, r.operator, r.seed, r.wall_time_secs),
                    Some(e) => println!("FAILED  {}/{}/seed_{}  {e}", r.task, r.operator, r.seed),
                }
            }
            Ok(ExitCode::from(summary.exit_code() as u8))
        }
        Command::Analyze {
            run_dir,
            window,
            threshold,
        } => {
            let dirs = analyze_path(&run_dir, AnalyzeOptions { window, threshold })?;
            for d in dirs {
                println!("analyzed {}", d.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Centroids {
            k,
            task,
            samples,
            cvt_seed,
            out,
        } => {
            let spec = TaskSpec::default_for(&task)
                .with_context(|| format!("unknown task `{task}` (expected arm, rastrigin, mlp_point)"))?;
            let mut config = RunConfig::new(spec, OperatorKind::Iso, 0);
            config.centroids = k;
            config.cvt_samples = samples;
            config.cvt_seed = cvt_seed;
            config.validate()?;
            let set = load_or_build_centroids(&out, &config)?;
            println!("{} centroids -> {}", set.len(), centroid_cache_path(&out, &config).display());
            Ok(ExitCode::SUCCESS)
        }
    }
}
