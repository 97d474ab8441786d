//! Offline analysis of run directories.
//!
//! For each directory holding `metrics.csv` and `archive_final.jsonl`, writes:
//!
//! * `analysis.csv`: `generation,offspring_added,qd_score_added_per_offspring`
//!   (trailing-window means).
//! * `effective_dim.csv`: `num_elites,genotype_dim,threshold,num_components`.
//! * `pca_spectrum.csv`: `component,eigenvalue,variance_fraction,cumulative_fraction`.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use qdforge::analysis::{effective_dimensionality, metrics_from_csv, rolling_stats, EffectiveDimReport};
use qdforge::cvt_archive::read_snapshot;

#[derive(Debug, Clone, Copy)]
pub struct AnalyzeOptions {
    pub window: usize,
    pub threshold: f64,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions {
            window: qdforge::analysis::DEFAULT_WINDOW,
            threshold: qdforge::analysis::DEFAULT_VARIANCE_THRESHOLD,
        }
    }
}

/// Analyzes `dir` if it is a run directory, otherwise every run directory below it.
/// Returns the run directories processed.
pub fn analyze_path(dir: &Path, opts: AnalyzeOptions) -> Result<Vec<PathBuf>> {
    let mut found = Vec::new();
    collect_run_dirs(dir, &mut found)?;
    if found.is_empty() {
        bail!("no run directories (with metrics.csv) under {}", dir.display());
    }
    found.sort();
    for run in &found {
        analyze_run(run, opts).with_context(|| format!("analyzing {}", run.display()))?;
    }
    Ok(found)
}

fn collect_run_dirs(dir: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
    if dir.join("metrics.csv").is_file() {
        out.push(dir.to_path_buf());
        return Ok(());
    }
    for entry in fs::read_dir(dir).with_context(|| format!("reading {}", dir.display()))? {
        let path = entry?.path();
        if path.is_dir() {
            collect_run_dirs(&path, out)?;
        }
    }
    Ok(())
}

pub fn analyze_run(dir: &Path, opts: AnalyzeOptions) -> Result<Option<EffectiveDimReport>> {
    let metrics = metrics_from_csv(&fs::read_to_string(dir.join("metrics.csv"))?)?;
    let rolling = rolling_stats(&metrics, opts.window)?;
    let mut text = String::from("generation,offspring_added,qd_score_added_per_offspring\n");
    for p in &rolling {
        text.push_str(&format!(
            "{},{},{}\n",
            p.generation, p.offspring_added, p.qd_score_added_per_offspring
        ));
    }
    fs::write(dir.join("analysis.csv"), text)?;

    let archive_path = dir.join("archive_final.jsonl");
    if !archive_path.is_file() {
        return Ok(None);
    }
    let records = read_snapshot(&fs::read_to_string(&archive_path)?)?;
    let genotypes: Vec<&[f64]> = records.iter().map(|r| r.genotype.as_slice()).collect();
    let genotype_dim = genotypes.first().map_or(0, |g| g.len());
    let report = match effective_dimensionality(&genotypes, opts.threshold) {
        Ok(r) => r,
        Err(qdforge::Error::DegenerateData(why)) => {
            fs::write(
                dir.join("effective_dim.csv"),
                format!(
                    "num_elites,genotype_dim,threshold,num_components\n{},{},{},\n",
                    records.len(),
                    genotype_dim,
                    opts.threshold
                ),
            )?;
            eprintln!("{}: effective dimensionality undefined ({why})", dir.display());
            return Ok(None);
        }
        Err(e) => return Err(e.into()),
    };
    fs::write(
        dir.join("effective_dim.csv"),
        format!(
            "num_elites,genotype_dim,threshold,num_components\n{},{},{},{}\n",
            records.len(),
            genotype_dim,
            opts.threshold,
            report.num_components
        ),
    )?;
    let mut spectrum = String::from("component,eigenvalue,variance_fraction,cumulative_fraction\n");
    let mut cumulative = 0.0;
    for (i, (ev, frac)) in report.eigenvalues.iter().zip(&report.variance_fractions).enumerate() {
        cumulative += frac;
        spectrum.push_str(&format!("{},{},{},{}\n", i + 1, ev, frac, cumulative));
    }
    fs::write(dir.join("pca_spectrum.csv"), spectrum)?;
    Ok(Some(report))
}
