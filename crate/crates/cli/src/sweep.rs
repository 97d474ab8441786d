//! Executes an experiment grid and writes per-run outputs.
//!
//! Layout under the output directory:
//!
//! ```text
//! <out>/sweep_manifest.json
//! <out>/centroids/<task>_k<k>_n<samples>_seed<cvt_seed>.csv
//! <out>/<task>/<operator>/seed_<s>/metrics.csv
//! <out>/<task>/<operator>/seed_<s>/archive_final.jsonl
//! <out>/<task>/<operator>/seed_<s>/archive_gen_<g>.jsonl   (with snapshot_every > 0)
//! <out>/<task>/<operator>/seed_<s>/manifest.json
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use anyhow::{Context, Result};
use qdforge::analysis::{self, metrics_to_csv};
use qdforge::cvt_archive::{build_centroids, CentroidSet, CvtParams};
use qdforge::qd_loop::{QdRun, RunConfig};
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::ExperimentSpec;

#[derive(Debug, Clone)]
pub struct SweepOptions {
    pub out: PathBuf,
    pub jobs: usize,
    pub snapshot_every: usize,
    /// Added to every run seed (not the CVT seed).
    pub seed_offset: u64,
}

impl SweepOptions {
    pub fn new(out: impl Into<PathBuf>) -> Self {
        SweepOptions {
            out: out.into(),
            jobs: 1,
            snapshot_every: 0,
            seed_offset: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub task: String,
    pub operator: String,
    pub seed: u64,
    pub dir: PathBuf,
    pub config_hash: String,
    pub status: String,
    pub error: Option<String>,
    pub wall_time_secs: f64,
}

impl RunRecord {
    pub fn ok(&self) -> bool {
        self.status == "ok"
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepSummary {
    pub runs: Vec<RunRecord>,
}

impl SweepSummary {
    pub fn all_ok(&self) -> bool {
        self.runs.iter().all(RunRecord::ok)
    }

    pub fn exit_code(&self) -> i32 {
        if self.all_ok() {
            0
        } else {
            1
        }
    }
}

#[derive(Serialize)]
struct RunManifest<'a> {
    config: &'a RunConfig,
    config_hash: &'a str,
    seed: u64,
    status: &'a str,
    error: Option<&'a str>,
    generations_completed: usize,
    initial_qd_score: Option<f64>,
    cumulative_qd_score: Option<f64>,
    final_qd_score: Option<f64>,
    wall_time_secs: f64,
}

/// SHA-256 of the canonical JSON encoding of a run config.
pub fn config_hash(config: &RunConfig) -> String {
    let bytes = serde_json::to_vec(config).expect("config serializes");
    hex::encode(Sha256::digest(&bytes))
}

pub fn run_dir(out: &Path, config: &RunConfig) -> PathBuf {
    out.join(config.task.id())
        .join(config.operator.as_str())
        .join(format!("seed_{}", config.seed))
}

/// Cache file for a niche definition. Non-default Lloyd settings get a suffix
/// so they never alias the default-settings file.
pub fn centroid_cache_path(out: &Path, config: &RunConfig) -> PathBuf {
    let defaults = CvtParams::new(config.centroids, config.cvt_samples);
    let lloyd = if config.cvt_max_iters == defaults.max_iters && config.cvt_tol == defaults.tol {
        String::new()
    } else {
        format!("_it{}_tol{:e}", config.cvt_max_iters, config.cvt_tol)
    };
    out.join("centroids").join(format!(
        "{}_k{}_n{}_seed{}{lloyd}.csv",
        config.task.id(),
        config.centroids,
        config.cvt_samples,
        config.cvt_seed
    ))
}

/// Loads the cached centroid set for `config`, building and caching it if absent.
pub fn load_or_build_centroids(out: &Path, config: &RunConfig) -> Result<CentroidSet> {
    let path = centroid_cache_path(out, config);
    let bounds = config.task.descriptor_bounds();
    if path.exists() {
        let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
        let set = CentroidSet::from_csv(&text, bounds.clone())?;
        if set.len() == config.centroids {
            return Ok(set);
        }
    }
    let set = build_centroids(&config.cvt_params(), &bounds, config.cvt_seed)?;
    write_atomic(&path, set.to_csv().as_bytes())?;
    Ok(set)
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    fs::File::create(&tmp)
        .and_then(|mut f| f.write_all(bytes))
        .with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn centroid_key(c: &RunConfig) -> (String, usize, usize, u64, usize, u64) {
    (
        c.task.id().to_string(),
        c.centroids,
        c.cvt_samples,
        c.cvt_seed,
        c.cvt_max_iters,
        c.cvt_tol.to_bits(),
    )
}

/// Runs every configuration in the spec. Individual run failures are recorded,
/// not propagated; only I/O failures on the sweep manifest abort the sweep.
pub fn run_sweep(spec: &ExperimentSpec, opts: &SweepOptions) -> Result<SweepSummary> {
    fs::create_dir_all(&opts.out)
        .with_context(|| format!("creating {}", opts.out.display()))?;
    let runs: Vec<RunConfig> = spec
        .runs
        .iter()
        .map(|c| {
            let mut c = c.clone();
            c.seed = c.seed.wrapping_add(opts.seed_offset);
            c
        })
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs.max(1))
        .build()?;

    let records = pool.install(|| {
        // One centroid set per distinct niche definition, shared by all operators and seeds.
        let mut keys: Vec<_> = runs.iter().map(centroid_key).collect();
        keys.sort();
        keys.dedup();
        let cache: BTreeMap<_, std::result::Result<Arc<CentroidSet>, String>> = keys
            .into_iter()
            .map(|key| {
                let config = runs.iter().find(|c| centroid_key(c) == key).expect("key from runs");
                let set = load_or_build_centroids(&opts.out, config)
                    .map(Arc::new)
                    .map_err(|e| format!("{e:#}"));
                (key, set)
            })
            .collect();

        runs.par_iter()
            .map(|config| {
                let centroids = cache[&centroid_key(config)].clone();
                execute_run(config, centroids, opts)
            })
            .collect::<Vec<_>>()
    });

    let summary = SweepSummary { runs: records };
    let manifest = serde_json::to_string_pretty(&summary)?;
    write_atomic(&opts.out.join("sweep_manifest.json"), manifest.as_bytes())?;
    Ok(summary)
}

fn execute_run(
    config: &RunConfig,
    centroids: std::result::Result<Arc<CentroidSet>, String>,
    opts: &SweepOptions,
) -> RunRecord {
    let dir = run_dir(&opts.out, config);
    let hash = config_hash(config);
    let start = Instant::now();
    let mut progress = Progress::default();
    let result = centroids
        .map_err(anyhow::Error::msg)
        .and_then(|c| drive(config, c, opts, &dir, &mut progress));
    let wall = start.elapsed().as_secs_f64();
    let error = result.err().map(|e| format!("{e:#}"));
    let status = if error.is_none() { "ok" } else { "failed" };

    let manifest = RunManifest {
        config,
        config_hash: &hash,
        seed: config.seed,
        status,
        error: error.as_deref(),
        generations_completed: progress.generations,
        initial_qd_score: progress.initial_qd,
        cumulative_qd_score: progress.cumulative_qd,
        final_qd_score: progress.final_qd,
        wall_time_secs: wall,
    };
    let written = fs::create_dir_all(&dir).map_err(anyhow::Error::from).and_then(|_| {
        let text = serde_json::to_string_pretty(&manifest)?;
        write_atomic(&dir.join("manifest.json"), text.as_bytes())
    });
    let error = match (error, written) {
        (Some(e), _) => Some(e),
        (None, Err(e)) => Some(format!("writing manifest: {e:#}")),
        (None, Ok(())) => None,
    };

    RunRecord {
        task: config.task.id().to_string(),
        operator: config.operator.as_str().to_string(),
        seed: config.seed,
        dir,
        config_hash: hash,
        status: if error.is_none() { "ok" } else { "failed" }.to_string(),
        error,
        wall_time_secs: wall,
    }
}

#[derive(Default)]
struct Progress {
    generations: usize,
    initial_qd: Option<f64>,
    cumulative_qd: Option<f64>,
    final_qd: Option<f64>,
}

fn drive(
    config: &RunConfig,
    centroids: Arc<CentroidSet>,
    opts: &SweepOptions,
    dir: &Path,
    progress: &mut Progress,
) -> Result<()> {
    let mut run = QdRun::new(config.clone(), Some(centroids))?.with_parallel_evaluation(opts.jobs > 1);
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    progress.initial_qd = Some(run.initial_qd_score());

    let mut metrics = Vec::with_capacity(config.generations);
    while !run.is_finished() {
        let report = run.step()?;
        metrics.push(run.metrics(&report));
        progress.generations = run.generation();
        if opts.snapshot_every > 0 && run.generation() % opts.snapshot_every == 0 {
            let path = dir.join(format!("archive_gen_{}.jsonl", run.generation()));
            write_atomic(&path, run.archive().to_jsonl().as_bytes())?;
        }
    }
    write_atomic(&dir.join("metrics.csv"), metrics_to_csv(&metrics).as_bytes())?;
    write_atomic(&dir.join("archive_final.jsonl"), run.archive().to_jsonl().as_bytes())?;
    progress.cumulative_qd = Some(run.cumulative_qd_score());
    progress.final_qd = Some(analysis::qd_score(run.archive(), run.task().min_fitness()));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use qdforge::tasks::TaskSpec;
    use qdforge::variation::OperatorKind;

    #[test]
    fn paths() {
        let mut c = RunConfig::new(TaskSpec::default_for("arm").unwrap(), OperatorKind::IsoLineCross, 7);
        let out = Path::new("o");
        assert_eq!(run_dir(out, &c), Path::new("o/arm/iso_line_cross/seed_7"));
        assert_eq!(centroid_cache_path(out, &c), Path::new("o/centroids/arm_k1024_n50000_seed0.csv"));
        c.cvt_max_iters = 5;
        assert_eq!(
            centroid_cache_path(out, &c),
            Path::new("o/centroids/arm_k1024_n50000_seed0_it5_tol1e-6.csv")
        );
    }

    #[test]
    fn hash_tracks_config() {
        let a = RunConfig::new(TaskSpec::default_for("arm").unwrap(), OperatorKind::Iso, 1);
        let mut b = a.clone();
        assert_eq!(config_hash(&a), config_hash(&b));
        assert_eq!(config_hash(&a).len(), 64);
        b.seed = 2;
        assert_ne!(config_hash(&a), config_hash(&b));
    }
}
