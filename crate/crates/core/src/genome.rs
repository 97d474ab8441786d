//! Core value types: genotypes, behavior descriptors and scored solutions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Flat real-valued parameter vector; the unit of variation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Genotype(pub Vec<f64>);

impl Genotype {
    pub fn new(genes: Vec<f64>) -> Self {
        Genotype(genes)
    }

    pub fn zeros(len: usize) -> Self {
        Genotype(vec![0.0; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn genes(&self) -> &[f64] {
        &self.0
    }

    pub fn into_genes(self) -> Vec<f64> {
        self.0
    }
}

impl From<Vec<f64>> for Genotype {
    fn from(genes: Vec<f64>) -> Self {
        Genotype(genes)
    }
}

/// Point in behavior space. Bounds live with the task and the centroid set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BehaviorDescriptor(pub Vec<f64>);

impl BehaviorDescriptor {
    pub fn new(values: Vec<f64>) -> Self {
        BehaviorDescriptor(values)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    /// Clamps every component into its `[lo, hi]` range.
    pub fn clamp_to(&mut self, bounds: &[(f64, f64)]) {
        for (v, &(lo, hi)) in self.0.iter_mut().zip(bounds) {
            *v = v.clamp(lo, hi);
        }
    }
}

impl From<Vec<f64>> for BehaviorDescriptor {
    fn from(values: Vec<f64>) -> Self {
        BehaviorDescriptor(values)
    }
}

/// Genotype/dimension pair a task fixes for the lifetime of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TaskDims {
    pub genotype: usize,
    pub descriptor: usize,
}

impl TaskDims {
    pub fn new(genotype: usize, descriptor: usize) -> Self {
        TaskDims {
            genotype,
            descriptor,
        }
    }
}

/// An evaluated genotype: the archive's payload.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredSolution {
    pub genotype: Genotype,
    pub fitness: f64,
    pub descriptor: BehaviorDescriptor,
}

impl ScoredSolution {
    pub fn new(genotype: Genotype, fitness: f64, descriptor: BehaviorDescriptor) -> Self {
        ScoredSolution {
            genotype,
            fitness,
            descriptor,
        }
    }

    /// Checks dimensions and finiteness against the task's `(N, D)`.
    pub fn validate(&self, dims: TaskDims) -> Result<()> {
        validate(self, dims)
    }
}

pub fn validate(solution: &ScoredSolution, dims: TaskDims) -> Result<()> {
    if dims.genotype == 0 {
        return Err(Error::invalid("genotype_dim", "must be at least 1"));
    }
    if solution.genotype.len() != dims.genotype {
        return Err(Error::DimensionMismatch {
            what: "genotype",
            expected: dims.genotype,
            found: solution.genotype.len(),
        });
    }
    if solution.descriptor.len() != dims.descriptor {
        return Err(Error::DimensionMismatch {
            what: "descriptor",
            expected: dims.descriptor,
            found: solution.descriptor.len(),
        });
    }
    if !all_finite(solution.genotype.genes()) {
        return Err(Error::NonFiniteValue { what: "genotype" });
    }
    if !solution.fitness.is_finite() {
        return Err(Error::NonFiniteValue { what: "fitness" });
    }
    if !all_finite(solution.descriptor.values()) {
        return Err(Error::NonFiniteValue {
            what: "descriptor",
        });
    }
    Ok(())
}

pub(crate) fn all_finite(xs: &[f64]) -> bool {
    xs.iter().all(|x| x.is_finite())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solution(genes: usize, desc: usize) -> ScoredSolution {
        ScoredSolution::new(
            Genotype::zeros(genes),
            1.0,
            BehaviorDescriptor::new(vec![0.5; desc]),
        )
    }

    #[test]
    fn matching_dims_validate() {
        assert_eq!(solution(5, 2).validate(TaskDims::new(5, 2)), Ok(()));
    }

    #[test]
    fn descriptor_mismatch() {
        let err = solution(5, 3).validate(TaskDims::new(5, 2)).unwrap_err();
        assert!(matches!(
            err,
            Error::DimensionMismatch {
                what: "descriptor",
                expected: 2,
                found: 3
            }
        ));
    }

    #[test]
    fn genotype_mismatch() {
        let err = solution(4, 2).validate(TaskDims::new(5, 2)).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { what: "genotype", .. }));
    }

    #[test]
    fn nan_rejected() {
        let mut s = solution(5, 2);
        s.genotype.0[3] = f64::NAN;
        assert_eq!(
            s.validate(TaskDims::new(5, 2)),
            Err(Error::NonFiniteValue { what: "genotype" })
        );
        let mut s = solution(5, 2);
        s.fitness = f64::INFINITY;
        assert!(s.validate(TaskDims::new(5, 2)).is_err());
    }

    #[test]
    fn validate_is_pure() {
        let s = solution(3, 2);
        let dims = TaskDims::new(3, 1);
        assert_eq!(s.validate(dims), s.validate(dims));
    }

    #[test]
    fn clamp_descriptor() {
        let mut d = BehaviorDescriptor::new(vec![-3.0, 0.2, 9.0]);
        d.clamp_to(&[(-1.0, 1.0), (-1.0, 1.0), (0.0, 5.0)]);
        assert_eq!(d.values(), &[-1.0, 0.2, 5.0]);
    }
}
