//! Browser bindings for the interactive demo page in `www/`.
//!
//! The exported functions are thin wrappers over plain Rust functions
//! (`*_native`) so the logic is testable without a JS host.

use qdforge::analysis;
use qdforge::qd_loop::{QdRun, RunConfig};
use qdforge::tasks::TaskSpec;
use qdforge::variation::{generate_mask, OperatorKind, OperatorParams, VariationOperator};
use qdforge::Genotype;
use rand::SeedableRng;
use wasm_bindgen::prelude::*;

type StreamRng = qdforge::rng::StreamRng;

/// Mask as 0/1 bytes, 1 selecting parent a.
pub fn crossover_mask_native(n: usize, lambda: f64, seed: u64) -> qdforge::Result<Vec<u8>> {
    if n == 0 {
        return Err(qdforge::Error::InvalidParameter {
            name: "n",
            reason: "must be >= 1".into(),
        });
    }
    OperatorParams {
        lambda_cross: lambda,
        ..OperatorParams::default()
    }
    .validate()?;
    Ok(generate_mask(n, lambda, &mut StreamRng::seed_from_u64(seed)).to_u8())
}

#[wasm_bindgen]
pub fn crossover_mask(n: usize, lambda: f64, seed: u64) -> Result<Vec<u8>, JsError> {
    crossover_mask_native(n, lambda, seed).map_err(js)
}

/// `count` offspring of two 2-D parents, flattened as `[x0, y0, x1, y1, ...]`.
#[allow(clippy::too_many_arguments)]
pub fn offspring_cloud_native(
    operator: &str,
    parent_a: &[f64],
    parent_b: &[f64],
    sigma_iso: f64,
    sigma_line: f64,
    p_cross: f64,
    count: usize,
    seed: u64,
) -> qdforge::Result<Vec<f64>> {
    let kind: OperatorKind = operator.parse()?;
    let params = OperatorParams {
        sigma_iso,
        sigma_line,
        p_cross,
        ..OperatorParams::default()
    };
    let op = VariationOperator::new(kind, params)?;
    let a = Genotype::new(parent_a.to_vec());
    let b = Genotype::new(parent_b.to_vec());
    let mut rng = StreamRng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count * a.len());
    for _ in 0..count {
        out.extend_from_slice(op.vary(&a, &b, &mut rng)?.genes());
    }
    Ok(out)
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn offspring_cloud(
    operator: &str,
    parent_a: &[f64],
    parent_b: &[f64],
    sigma_iso: f64,
    sigma_line: f64,
    p_cross: f64,
    count: usize,
    seed: u64,
) -> Result<Vec<f64>, JsError> {
    offspring_cloud_native(operator, parent_a, parent_b, sigma_iso, sigma_line, p_cross, count, seed)
        .map_err(js)
}

/// A small planar-arm repertoire run, stepped from the page.
#[wasm_bindgen]
pub struct ArmDemo {
    run: QdRun,
}

impl ArmDemo {
    pub fn new_native(operator: &str, links: usize, centroids: usize, batch: usize, seed: u64) -> qdforge::Result<ArmDemo> {
        let kind: OperatorKind = operator.parse()?;
        let mut config = RunConfig::new(TaskSpec::Arm { links, init_scale: 1.0 }, kind, seed);
        config.centroids = centroids;
        config.batch_size = batch;
        config.initial_population_size = batch;
        config.cvt_samples = (centroids * 40).max(2000);
        config.generations = usize::MAX;
        Ok(ArmDemo {
            run: QdRun::new(config, None)?,
        })
    }

    pub fn step_native(&mut self, generations: usize) -> qdforge::Result<()> {
        for _ in 0..generations {
            self.run.step()?;
        }
        Ok(())
    }
}

#[wasm_bindgen]
impl ArmDemo {
    #[wasm_bindgen(constructor)]
    pub fn new(operator: &str, links: usize, centroids: usize, batch: usize, seed: u64) -> Result<ArmDemo, JsError> {
        ArmDemo::new_native(operator, links, centroids, batch, seed).map_err(js)
    }

    pub fn step(&mut self, generations: usize) -> Result<(), JsError> {
        self.step_native(generations).map_err(js)
    }

    /// Occupied cells as `[cx, cy, fitness, ...]` using the cell centroids.
    pub fn cells(&self) -> Vec<f64> {
        let archive = self.run.archive();
        let mut out = Vec::with_capacity(archive.occupied_count() * 3);
        for (cell, elite) in archive.iter() {
            out.extend_from_slice(archive.centroids().centroid(cell));
            out.push(elite.fitness);
        }
        out
    }

    /// All centroids as `[cx, cy, ...]`.
    pub fn centroids(&self) -> Vec<f64> {
        self.run.archive().centroids().iter().flatten().copied().collect()
    }

    /// `[generation, qd_score, coverage, max_fitness]`.
    pub fn metrics(&self) -> Vec<f64> {
        let archive = self.run.archive();
        vec![
            self.run.generation() as f64,
            analysis::qd_score(archive, self.run.task().min_fitness()),
            analysis::coverage(archive),
            analysis::max_fitness(archive).unwrap_or(f64::NAN),
        ]
    }

    /// Lowest attainable fitness, for colour scaling.
    pub fn min_fitness(&self) -> f64 {
        self.run.task().min_fitness()
    }
}

fn js(e: qdforge::Error) -> JsError {
    JsError::new(&e.to_string())
}
