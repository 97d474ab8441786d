//! Evaluation functions. Each maps a genotype to `(fitness, descriptor)`.

mod arm;
mod mlp_point;
mod rastrigin;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::genome::{BehaviorDescriptor, Genotype, TaskDims};

pub use arm::ArmTask;
pub use mlp_point::MlpPointTask;
pub use rastrigin::RastriginTask;

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub fitness: f64,
    pub descriptor: BehaviorDescriptor,
}

/// A deterministic, stateless evaluation problem.
pub trait Task: Send + Sync {
    fn id(&self) -> &'static str;

    fn genotype_dim(&self) -> usize;

    fn descriptor_bounds(&self) -> Vec<(f64, f64)>;

    /// Finite lower bound on every fitness the task can return; QD-score offset.
    fn min_fitness(&self) -> f64;

    fn random_genotype(&self, rng: &mut dyn rand::RngCore) -> Genotype;

    /// Pure evaluation; descriptors are returned already clamped into bounds.
    fn evaluate(&self, genotype: &Genotype) -> Result<Evaluation>;

    fn dims(&self) -> TaskDims {
        TaskDims::new(self.genotype_dim(), self.descriptor_bounds().len())
    }
}

/// Serializable task selection, as it appears in run configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "snake_case", deny_unknown_fields)]
pub enum TaskSpec {
    Arm {
        #[serde(default = "ArmTask::default_links")]
        links: usize,
        #[serde(default = "ArmTask::default_init_scale")]
        init_scale: f64,
    },
    Rastrigin {
        #[serde(default = "RastriginTask::default_dims")]
        dims: usize,
    },
    MlpPoint {
        #[serde(default = "MlpPointTask::default_hidden")]
        hidden: Vec<usize>,
        #[serde(default = "MlpPointTask::default_steps")]
        steps: usize,
        #[serde(default = "MlpPointTask::default_dt")]
        dt: f64,
    },
}

impl TaskSpec {
    pub const IDS: [&'static str; 3] = ["arm", "rastrigin", "mlp_point"];

    /// Task with default parameters for an id string.
    pub fn default_for(id: &str) -> Option<TaskSpec> {
        match id {
            "arm" => Some(TaskSpec::Arm {
                links: ArmTask::default_links(),
                init_scale: ArmTask::default_init_scale(),
            }),
            "rastrigin" => Some(TaskSpec::Rastrigin {
                dims: RastriginTask::default_dims(),
            }),
            "mlp_point" => Some(TaskSpec::MlpPoint {
                hidden: MlpPointTask::default_hidden(),
                steps: MlpPointTask::default_steps(),
                dt: MlpPointTask::default_dt(),
            }),
            _ => None,
        }
    }

    pub fn id(&self) -> &'static str {
        match self {
            TaskSpec::Arm { .. } => "arm",
            TaskSpec::Rastrigin { .. } => "rastrigin",
            TaskSpec::MlpPoint { .. } => "mlp_point",
        }
    }

    /// Descriptor bounds; fixed per task id, independent of task parameters.
    pub fn descriptor_bounds(&self) -> Vec<(f64, f64)> {
        match self {
            TaskSpec::Rastrigin { .. } => vec![(-5.12, 5.12); 2],
            TaskSpec::Arm { .. } | TaskSpec::MlpPoint { .. } => vec![(-1.0, 1.0); 2],
        }
    }

    pub fn build(&self) -> Result<Box<dyn Task>> {
        Ok(match self {
            TaskSpec::Arm { links, init_scale } => Box::new(ArmTask::new(*links, *init_scale)?),
            TaskSpec::Rastrigin { dims } => Box::new(RastriginTask::new(*dims)?),
            TaskSpec::MlpPoint { hidden, steps, dt } => {
                Box::new(MlpPointTask::new(hidden.clone(), *steps, *dt)?)
            }
        })
    }
}

pub(crate) fn uniform_genotype(n: usize, lo: f64, hi: f64, rng: &mut dyn rand::RngCore) -> Genotype {
    Genotype::new((0..n).map(|_| rng.random_range(lo..=hi)).collect())
}
