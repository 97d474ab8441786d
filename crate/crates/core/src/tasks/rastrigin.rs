use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::genome::{BehaviorDescriptor, Genotype};

use super::{uniform_genotype, Evaluation, Task};

const LIMIT: f64 = 5.12;

/// Negative Rastrigin with the first two genes as descriptor.
///
/// Genes are clamped to `[-5.12, 5.12]` for the fitness as well, which keeps
/// `-N(5.12² + 20)` a valid lower bound.
#[derive(Debug, Clone, PartialEq)]
pub struct RastriginTask {
    dims: usize,
}

impl RastriginTask {
    pub fn new(dims: usize) -> Result<Self> {
        if dims < 2 {
            return Err(Error::invalid("dims", "rastrigin needs at least 2 genes"));
        }
        Ok(RastriginTask { dims })
    }

    pub(crate) fn default_dims() -> usize {
        10
    }
}

pub fn rastrigin(x: &[f64]) -> f64 {
    10.0 * x.len() as f64
        + x.iter()
            .map(|&v| v * v - 10.0 * (2.0 * PI * v).cos())
            .sum::<f64>()
}

impl Task for RastriginTask {
    fn id(&self) -> &'static str {
        "rastrigin"
    }

    fn genotype_dim(&self) -> usize {
        self.dims
    }

    fn descriptor_bounds(&self) -> Vec<(f64, f64)> {
        vec![(-LIMIT, LIMIT); 2]
    }

    fn min_fitness(&self) -> f64 {
        -(self.dims as f64) * (LIMIT * LIMIT + 20.0)
    }

    fn random_genotype(&self, rng: &mut dyn rand::RngCore) -> Genotype {
        uniform_genotype(self.dims, -LIMIT, LIMIT, rng)
    }

    fn evaluate(&self, genotype: &Genotype) -> Result<Evaluation> {
        let g = genotype.genes();
        if g.len() != self.dims {
            return Err(Error::DimensionMismatch {
                what: "rastrigin genotype",
                expected: self.dims,
                found: g.len(),
            });
        }
        let clamped: Vec<f64> = g.iter().map(|v| v.clamp(-LIMIT, LIMIT)).collect();
        let fitness = -rastrigin(&clamped);
        let descriptor = BehaviorDescriptor::new(clamped[..2].to_vec());
        Ok(Evaluation {
            fitness,
            descriptor,
        })
    }
}
