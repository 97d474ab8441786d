//! Generational CVT-MAP-Elites driver.
//!
//! Each generation draws `B` parent pairs uniformly from the archive as it
//! stood at the start of the generation, varies and evaluates the offspring
//! (optionally in parallel), then offers them to the archive in offspring
//! index order. Offspring `i` of generation `g` uses its own random stream, so
//! the result is independent of how evaluation is scheduled.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::analysis::{self, MetricsRecord, OffspringStats};
use crate::cvt_archive::{build_centroids, CentroidSet, CvtArchive, CvtParams, InsertOutcome};
use crate::error::{Error, Result};
use crate::genome::{Genotype, ScoredSolution};
use crate::rng::{self, Purpose, StreamKey};
use crate::tasks::{Evaluation, Task, TaskSpec};
use crate::variation::{OperatorKind, OperatorParams, VariationOperator};

/// Everything that determines a single run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub task: TaskSpec,
    pub operator: OperatorKind,
    pub params: OperatorParams,
    pub seed: u64,
    pub generations: usize,
    pub batch_size: usize,
    pub centroids: usize,
    pub cvt_samples: usize,
    pub cvt_max_iters: usize,
    pub cvt_tol: f64,
    pub cvt_seed: u64,
    pub initial_population_size: usize,
}

impl RunConfig {
    pub const DEFAULT_GENERATIONS: usize = 4000;
    pub const DEFAULT_BATCH_SIZE: usize = 256;
    pub const DEFAULT_CENTROIDS: usize = 1024;
    pub const DEFAULT_CVT_SAMPLES: usize = 50_000;

    pub fn new(task: TaskSpec, operator: OperatorKind, seed: u64) -> Self {
        RunConfig {
            task,
            operator,
            params: OperatorParams::default(),
            seed,
            generations: Self::DEFAULT_GENERATIONS,
            batch_size: Self::DEFAULT_BATCH_SIZE,
            centroids: Self::DEFAULT_CENTROIDS,
            cvt_samples: Self::DEFAULT_CVT_SAMPLES,
            cvt_max_iters: 100,
            cvt_tol: 1e-6,
            cvt_seed: 0,
            initial_population_size: Self::DEFAULT_BATCH_SIZE,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(Error::invalid("batch_size", "must be >= 1"));
        }
        if self.centroids == 0 {
            return Err(Error::invalid("centroids", "must be >= 1"));
        }
        if self.cvt_samples < self.centroids {
            return Err(Error::invalid("cvt_samples", "must be >= centroids"));
        }
        if self.initial_population_size == 0 {
            return Err(Error::invalid("initial_population_size", "must be >= 1"));
        }
        if !(self.cvt_tol.is_finite() && self.cvt_tol >= 0.0) {
            return Err(Error::invalid("cvt_tol", "must be finite and >= 0"));
        }
        self.params.validate()
    }

    pub fn cvt_params(&self) -> CvtParams {
        CvtParams {
            k: self.centroids,
            samples: self.cvt_samples,
            max_iters: self.cvt_max_iters,
            tol: self.cvt_tol,
        }
    }

    pub fn variation_operator(&self) -> Result<VariationOperator> {
        VariationOperator::new(self.operator, self.params)
    }

    /// Centroids for this config's task, `k`, sample count and CVT seed.
    pub fn build_centroids(&self) -> Result<CentroidSet> {
        build_centroids(&self.cvt_params(), &self.task.descriptor_bounds(), self.cvt_seed)
    }
}

/// Per-generation bookkeeping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationReport {
    pub generation: usize,
    pub offspring_evaluated: usize,
    /// Inserted plus replaced.
    pub offspring_added: usize,
    /// Increase of the normalized QD score caused by this generation.
    pub qd_score_added: f64,
}

impl OffspringStats for GenerationReport {
    fn generation(&self) -> usize {
        self.generation
    }
    fn offspring_added(&self) -> usize {
        self.offspring_added
    }
    fn qd_score_added(&self) -> f64 {
        self.qd_score_added
    }
}

/// Normalized-QD change caused by one insertion outcome.
pub fn qd_delta(outcome: &InsertOutcome, fitness: f64, min_fitness: f64) -> f64 {
    match *outcome {
        InsertOutcome::Inserted { .. } => fitness - min_fitness,
        InsertOutcome::Replaced {
            previous_fitness, ..
        } => fitness - previous_fitness,
        InsertOutcome::Discarded { .. } => 0.0,
    }
}

fn evaluate_indexed<F>(count: usize, parallel: bool, produce: F) -> Result<Vec<(Genotype, Evaluation)>>
where
    F: Fn(usize) -> Result<(Genotype, Evaluation)> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel {
        return (0..count).into_par_iter().map(produce).collect();
    }
    let _ = parallel;
    (0..count).map(produce).collect()
}

/// Fresh archive seeded with `initial_population_size` task-initialized genotypes.
/// Returns the archive and the QD score contributed by the initial insertions.
pub fn initialize(
    config: &RunConfig,
    task: &dyn Task,
    centroids: Arc<CentroidSet>,
    parallel: bool,
) -> Result<(CvtArchive, f64)> {
    let mut archive = CvtArchive::new(centroids, task.genotype_dim());
    let produce = |i: usize| {
        let mut rng = rng::stream(config.seed, StreamKey::new(Purpose::Initial, 0, i as u64));
        let genotype = task.random_genotype(&mut rng);
        let eval = task.evaluate(&genotype)?;
        Ok((genotype, eval))
    };
    let population = evaluate_indexed(config.initial_population_size, parallel, produce)?;
    let min_fitness = task.min_fitness();
    let mut qd = 0.0;
    for (genotype, eval) in population {
        let fitness = eval.fitness;
        let outcome = archive.try_insert(ScoredSolution::new(genotype, fitness, eval.descriptor))?;
        qd += qd_delta(&outcome, fitness, min_fitness);
    }
    Ok((archive, qd))
}

/// One generation: select, vary, evaluate, insert in offspring order.
pub fn step(
    archive: &mut CvtArchive,
    config: &RunConfig,
    operator: &VariationOperator,
    task: &dyn Task,
    generation: usize,
    parallel: bool,
) -> Result<GenerationReport> {
    let snapshot: &CvtArchive = archive;
    let produce = |i: usize| {
        let mut rng = rng::offspring_stream(config.seed, generation as u64, i as u64);
        let parents = snapshot.sample_cells(2, &mut rng)?;
        let pi = &snapshot.get(parents[0]).expect("occupied").genotype;
        let pj = &snapshot.get(parents[1]).expect("occupied").genotype;
        let child = operator.vary(pi, pj, &mut rng)?;
        let eval = task.evaluate(&child)?;
        Ok((child, eval))
    };
    let offspring = evaluate_indexed(config.batch_size, parallel, produce)?;

    let min_fitness = task.min_fitness();
    let mut report = GenerationReport {
        generation,
        offspring_evaluated: offspring.len(),
        offspring_added: 0,
        qd_score_added: 0.0,
    };
    for (genotype, eval) in offspring {
        let fitness = eval.fitness;
        let outcome = archive.try_insert(ScoredSolution::new(genotype, fitness, eval.descriptor))?;
        if outcome.is_added() {
            report.offspring_added += 1;
            report.qd_score_added += qd_delta(&outcome, fitness, min_fitness);
        }
    }
    Ok(report)
}

/// A run in progress.
pub struct QdRun {
    config: RunConfig,
    task: Box<dyn Task>,
    operator: VariationOperator,
    archive: CvtArchive,
    generation: usize,
    initial_qd: f64,
    cumulative_qd: f64,
    parallel: bool,
}

impl QdRun {
    /// Validates the config, builds (or checks the supplied) centroids, and
    /// initializes the archive.
    pub fn new(config: RunConfig, centroids: Option<Arc<CentroidSet>>) -> Result<Self> {
        config.validate()?;
        let task = config.task.build()?;
        let operator = config.variation_operator()?;
        let centroids = match centroids {
            Some(c) => {
                if c.len() != config.centroids {
                    return Err(Error::invalid(
                        "centroids",
                        format!("supplied set has {} centroids, config wants {}", c.len(), config.centroids),
                    ));
                }
                if c.bounds() != task.descriptor_bounds().as_slice() {
                    return Err(Error::invalid("centroids", "bounds do not match the task"));
                }
                c
            }
            None => Arc::new(config.build_centroids()?),
        };
        let (archive, initial_qd) = initialize(&config, task.as_ref(), centroids, false)?;
        Ok(QdRun {
            config,
            task,
            operator,
            archive,
            generation: 0,
            initial_qd,
            cumulative_qd: initial_qd,
            parallel: false,
        })
    }

    /// Evaluate offspring batches on the current rayon pool.
    pub fn with_parallel_evaluation(mut self, parallel: bool) -> Self {
        self.parallel = parallel;
        self
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    pub fn task(&self) -> &dyn Task {
        self.task.as_ref()
    }

    pub fn archive(&self) -> &CvtArchive {
        &self.archive
    }

    pub fn into_archive(self) -> CvtArchive {
        self.archive
    }

    /// Generations completed so far.
    pub fn generation(&self) -> usize {
        self.generation
    }

    pub fn is_finished(&self) -> bool {
        self.generation >= self.config.generations
    }

    /// QD score from the initial population alone.
    pub fn initial_qd_score(&self) -> f64 {
        self.initial_qd
    }

    /// Initial QD score plus every reported `qd_score_added` so far.
    pub fn cumulative_qd_score(&self) -> f64 {
        self.cumulative_qd
    }

    pub fn step(&mut self) -> Result<GenerationReport> {
        let generation = self.generation + 1;
        let report = step(
            &mut self.archive,
            &self.config,
            &self.operator,
            self.task.as_ref(),
            generation,
            self.parallel,
        )?;
        self.generation = generation;
        self.cumulative_qd += report.qd_score_added;
        Ok(report)
    }

    pub fn metrics(&self, report: &GenerationReport) -> MetricsRecord {
        MetricsRecord {
            generation: report.generation,
            qd_score: analysis::qd_score(&self.archive, self.task.min_fitness()),
            coverage: analysis::coverage(&self.archive),
            max_fitness: analysis::max_fitness(&self.archive).expect("archive is never empty after init"),
            offspring_added: report.offspring_added,
            qd_score_added: report.qd_score_added,
        }
    }
}

/// Output of [`run`].
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub archive: CvtArchive,
    pub reports: Vec<GenerationReport>,
    pub metrics: Vec<MetricsRecord>,
    pub initial_qd_score: f64,
    pub cumulative_qd_score: f64,
}

/// Initializes and runs all generations. `jobs > 1` evaluates batches on a
/// dedicated thread pool of that size; results are identical either way.
pub fn run(config: &RunConfig, centroids: Option<Arc<CentroidSet>>, jobs: usize) -> Result<RunOutput> {
    let go = || -> Result<RunOutput> {
        let mut qd = QdRun::new(config.clone(), centroids)?.with_parallel_evaluation(jobs > 1);
        let mut reports = Vec::with_capacity(config.generations);
        let mut metrics = Vec::with_capacity(config.generations);
        while !qd.is_finished() {
            let report = qd.step()?;
            metrics.push(qd.metrics(&report));
            reports.push(report);
        }
        let initial_qd_score = qd.initial_qd_score();
        let cumulative_qd_score = qd.cumulative_qd_score();
        Ok(RunOutput {
            archive: qd.into_archive(),
            reports,
            metrics,
            initial_qd_score,
            cumulative_qd_score,
        })
    };
    #[cfg(feature = "parallel")]
    if jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::invalid("jobs", e.to_string()))?;
        return pool.install(go);
    }
    go()
}
