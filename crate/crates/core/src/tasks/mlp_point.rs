use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::genome::{BehaviorDescriptor, Genotype};

use super::{Evaluation, Task};

const INIT_STD: f64 = 0.1;

/// A small tanh MLP steering a kinematic point in `[-1, 1]²`.
///
/// Input is the current position, output is a velocity clamped to unit norm.
/// Starting at the origin the point is integrated for `steps` Euler steps of
/// length `dt`, staying inside the box. The descriptor is the final position;
/// fitness is minus the mean squared (clamped) speed.
///
/// Parameter layout is layer by layer, each layer's row-major weights
/// (`out × in`) followed by its biases.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpPointTask {
    hidden: Vec<usize>,
    steps: usize,
    dt: f64,
    // Layer shapes as (inputs, outputs).
    layers: Vec<(usize, usize)>,
}

impl MlpPointTask {
    pub fn new(hidden: Vec<usize>, steps: usize, dt: f64) -> Result<Self> {
        if hidden.contains(&0) {
            return Err(Error::invalid("hidden", "hidden widths must be >= 1"));
        }
        if steps == 0 {
            return Err(Error::invalid("steps", "must be >= 1"));
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::invalid("dt", "must be finite and > 0"));
        }
        let mut widths = vec![2];
        widths.extend_from_slice(&hidden);
        widths.push(2);
        let layers = widths.windows(2).map(|w| (w[0], w[1])).collect();
        Ok(MlpPointTask {
            hidden,
            steps,
            dt,
            layers,
        })
    }

    pub(crate) fn default_hidden() -> Vec<usize> {
        vec![16, 16]
    }

    pub(crate) fn default_steps() -> usize {
        50
    }

    pub(crate) fn default_dt() -> f64 {
        0.1
    }

    pub fn hidden(&self) -> &[usize] {
        &self.hidden
    }

    pub fn parameter_count(&self) -> usize {
        self.layers.iter().map(|&(i, o)| i * o + o).sum()
    }

    fn forward(&self, params: &[f64], input: [f64; 2]) -> [f64; 2] {
        let mut activ = input.to_vec();
        let mut offset = 0;
        let last = self.layers.len() - 1;
        for (l, &(inputs, outputs)) in self.layers.iter().enumerate() {
            let weights = &params[offset..offset + inputs * outputs];
            let biases = &params[offset + inputs * outputs..offset + inputs * outputs + outputs];
            offset += inputs * outputs + outputs;
            activ = (0..outputs)
                .map(|o| {
                    let row = &weights[o * inputs..(o + 1) * inputs];
                    let z = biases[o] + row.iter().zip(&activ).map(|(w, a)| w * a).sum::<f64>();
                    if l == last {
                        z
                    } else {
                        z.tanh()
                    }
                })
                .collect();
        }
        [activ[0], activ[1]]
    }
}

impl Task for MlpPointTask {
    fn id(&self) -> &'static str {
        "mlp_point"
    }

    fn genotype_dim(&self) -> usize {
        self.parameter_count()
    }

    fn descriptor_bounds(&self) -> Vec<(f64, f64)> {
        vec![(-1.0, 1.0); 2]
    }

    fn min_fitness(&self) -> f64 {
        -1.0
    }

    fn random_genotype(&self, rng: &mut dyn rand::RngCore) -> Genotype {
        let normal = Normal::new(0.0, INIT_STD).expect("valid std");
        Genotype::new((0..self.parameter_count()).map(|_| normal.sample(rng)).collect())
    }

    fn evaluate(&self, genotype: &Genotype) -> Result<Evaluation> {
        let params = genotype.genes();
        if params.len() != self.parameter_count() {
            return Err(Error::DimensionMismatch {
                what: "mlp_point genotype",
                expected: self.parameter_count(),
                found: params.len(),
            });
        }
        let mut pos = [0.0f64, 0.0];
        let mut energy = 0.0;
        for _ in 0..self.steps {
            let [mut vx, mut vy] = self.forward(params, pos);
            let speed = vx.hypot(vy);
            if speed > 1.0 {
                vx /= speed;
                vy /= speed;
            }
            energy += vx * vx + vy * vy;
            pos[0] = (pos[0] + self.dt * vx).clamp(-1.0, 1.0);
            pos[1] = (pos[1] + self.dt * vy).clamp(-1.0, 1.0);
        }
        let fitness = -energy / self.steps as f64;
        let mut descriptor = BehaviorDescriptor::new(pos.to_vec());
        descriptor.clamp_to(&self.descriptor_bounds());
        Ok(Evaluation {
            fitness,
            descriptor,
        })
    }
}
