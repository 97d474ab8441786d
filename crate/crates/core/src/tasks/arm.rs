use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::genome::{BehaviorDescriptor, Genotype};

use super::{uniform_genotype, Evaluation, Task};

/// Planar arm with `links` equal links of total length 1.
///
/// Genes are joint angles in radians. The descriptor is the end-effector
/// position; fitness is the negative variance of the joint angles, with angles
/// wrapped into `[-π, π)` first so the variance never exceeds `π²`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArmTask {
    links: usize,
    init_scale: f64,
}

impl ArmTask {
    pub fn new(links: usize, init_scale: f64) -> Result<Self> {
        if links == 0 {
            return Err(Error::invalid("links", "arm needs at least one link"));
        }
        if !(init_scale.is_finite() && init_scale > 0.0) {
            return Err(Error::invalid("init_scale", "must be finite and > 0"));
        }
        Ok(ArmTask { links, init_scale })
    }

    pub(crate) fn default_links() -> usize {
        8
    }

    pub(crate) fn default_init_scale() -> f64 {
        1.0
    }

    /// End-effector position by forward kinematics over cumulative angles.
    pub fn end_effector(angles: &[f64]) -> (f64, f64) {
        let link = 1.0 / angles.len() as f64;
        let mut heading = 0.0;
        let (mut x, mut y) = (0.0, 0.0);
        for a in angles {
            heading += a;
            x += link * heading.cos();
            y += link * heading.sin();
        }
        (x, y)
    }
}

fn wrap_angle(a: f64) -> f64 {
    (a + PI).rem_euclid(2.0 * PI) - PI
}

fn variance(xs: impl Iterator<Item = f64> + Clone) -> f64 {
    let n = xs.clone().count() as f64;
    let mean = xs.clone().sum::<f64>() / n;
    xs.map(|x| (x - mean) * (x - mean)).sum::<f64>() / n
}

impl Task for ArmTask {
    fn id(&self) -> &'static str {
        "arm"
    }

    fn genotype_dim(&self) -> usize {
        self.links
    }

    fn descriptor_bounds(&self) -> Vec<(f64, f64)> {
        vec![(-1.0, 1.0); 2]
    }

    fn min_fitness(&self) -> f64 {
        -PI * PI
    }

    fn random_genotype(&self, rng: &mut dyn rand::RngCore) -> Genotype {
        let half = PI / self.links as f64 * self.init_scale;
        uniform_genotype(self.links, -half, half, rng)
    }

    fn evaluate(&self, genotype: &Genotype) -> Result<Evaluation> {
        let angles = genotype.genes();
        if angles.len() != self.links {
            return Err(Error::DimensionMismatch {
                what: "arm genotype",
                expected: self.links,
                found: angles.len(),
            });
        }
        let (x, y) = Self::end_effector(angles);
        let fitness = -variance(angles.iter().map(|&a| wrap_angle(a)));
        let mut descriptor = BehaviorDescriptor::new(vec![x, y]);
        descriptor.clamp_to(&self.descriptor_bounds());
        Ok(Evaluation {
            fitness,
            descriptor,
        })
    }
}
